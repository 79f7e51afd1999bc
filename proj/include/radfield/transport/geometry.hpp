// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace radfield {

/// Parametric interval [enter, exit] of a ray inside a convex body.
template <typename Scalar>
struct RayInterval {
    Scalar enter;
    Scalar exit;
};

/// Ray against a sphere of `radius` centred at the local origin.
template <typename Scalar>
std::optional<RayInterval<Scalar>> intersect_sphere(Scalar radius, const Eigen::Matrix<Scalar, 3, 1>& origin,
                                                    const Eigen::Matrix<Scalar, 3, 1>& dir) {
    const Scalar a = dir.squaredNorm();
    const Scalar b = origin.dot(dir);
    const Scalar c = origin.squaredNorm() - radius * radius;
    const Scalar disc = b * b - a * c;
    if (disc < Scalar(0)) {
        return std::nullopt;
    }
    const Scalar root = std::sqrt(disc);
    return RayInterval<Scalar>{(-b - root) / a, (-b + root) / a};
}

/// Ray against an axis-aligned box [-half, half] (slab method).
template <typename Scalar>
std::optional<RayInterval<Scalar>> intersect_box(const Eigen::Matrix<Scalar, 3, 1>& half,
                                                 const Eigen::Matrix<Scalar, 3, 1>& origin,
                                                 const Eigen::Matrix<Scalar, 3, 1>& dir) {
    Scalar enter = -std::numeric_limits<Scalar>::infinity();
    Scalar exit = std::numeric_limits<Scalar>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (dir[a] == Scalar(0)) {
            if (origin[a] < -half[a] || origin[a] > half[a]) {
                return std::nullopt;
            }
            continue;
        }
        Scalar t0 = (-half[a] - origin[a]) / dir[a];
        Scalar t1 = (half[a] - origin[a]) / dir[a];
        if (t0 > t1) {
            std::swap(t0, t1);
        }
        enter = std::max(enter, t0);
        exit = std::min(exit, t1);
    }
    if (enter > exit) {
        return std::nullopt;
    }
    return RayInterval<Scalar>{enter, exit};
}

/// Ray against a finite cylinder along the local z axis, |z| <= half_height.
template <typename Scalar>
std::optional<RayInterval<Scalar>> intersect_cylinder(Scalar radius, Scalar half_height,
                                                      const Eigen::Matrix<Scalar, 3, 1>& origin,
                                                      const Eigen::Matrix<Scalar, 3, 1>& dir) {
    Scalar enter = -std::numeric_limits<Scalar>::infinity();
    Scalar exit = std::numeric_limits<Scalar>::infinity();

    const Scalar a = dir.x() * dir.x() + dir.y() * dir.y();
    const Scalar c = origin.x() * origin.x() + origin.y() * origin.y() - radius * radius;
    if (a == Scalar(0)) {
        if (c > Scalar(0)) {
            return std::nullopt;
        }
    } else {
        const Scalar b = origin.x() * dir.x() + origin.y() * dir.y();
        const Scalar disc = b * b - a * c;
        if (disc < Scalar(0)) {
            return std::nullopt;
        }
        const Scalar root = std::sqrt(disc);
        enter = (-b - root) / a;
        exit = (-b + root) / a;
    }

    if (dir.z() == Scalar(0)) {
        if (std::abs(origin.z()) > half_height) {
            return std::nullopt;
        }
    } else {
        Scalar t0 = (-half_height - origin.z()) / dir.z();
        Scalar t1 = (half_height - origin.z()) / dir.z();
        if (t0 > t1) {
            std::swap(t0, t1);
        }
        enter = std::max(enter, t0);
        exit = std::min(exit, t1);
    }
    if (enter > exit) {
        return std::nullopt;
    }
    return RayInterval<Scalar>{enter, exit};
}

/// Any unit vector u with u . v = 0, plus w = v x u, forming a right-handed
/// frame (u, w, v). The reference is world z unless v is nearly parallel to it,
/// in which case world y is used.
template <typename Derived>
std::pair<Eigen::Matrix<typename Derived::Scalar, 3, 1>, Eigen::Matrix<typename Derived::Scalar, 3, 1>>
orthonormal_frame(const Eigen::MatrixBase<Derived>& v) {
    using Vec = Eigen::Matrix<typename Derived::Scalar, 3, 1>;
    const Vec ref = std::abs(v.z()) < 0.999 ? Vec::UnitZ() : Vec::UnitY();
    const Vec u = ref.cross(v).normalized();
    return {u, v.cross(u)};
}

/// Rotates unit vector `dir` by polar angle acos(cos_theta) and azimuth phi.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 1> rotate_direction(const Eigen::MatrixBase<Derived>& dir,
                                                               typename Derived::Scalar cos_theta,
                                                               typename Derived::Scalar phi) {
    using Scalar = typename Derived::Scalar;
    const Scalar sin_theta = std::sqrt(std::max(Scalar(0), Scalar(1) - cos_theta * cos_theta));
    const auto [u, w] = orthonormal_frame(dir);
    Eigen::Matrix<Scalar, 3, 1> out =
        cos_theta * dir + sin_theta * (std::cos(phi) * u + std::sin(phi) * w);
    return out.normalized();
}

}  // namespace radfield
