// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include <Eigen/Core>

namespace radfield {

using Vector3u = Eigen::Matrix<std::uint32_t, 3, 1>;
using Vector3i = Eigen::Matrix<std::int64_t, 3, 1>;

/// Regular axis-aligned voxel grid. Flat voxel order is row-major with x
/// fastest: flat = (iz * ny + iy) * nx + ix.
struct GridSpec {
    Eigen::Vector3d extent_m = Eigen::Vector3d::Ones();
    Eigen::Vector3d voxel_m = Eigen::Vector3d::Constant(0.02);
    Vector3u counts = Vector3u::Constant(50);
    Eigen::Vector3d origin_m = Eigen::Vector3d::Constant(-0.5);

    /// Builds a grid whose counts are round(extent / voxel). Throws
    /// std::invalid_argument when the invariants cannot hold.
    static GridSpec make(const Eigen::Vector3d& extent_m, const Eigen::Vector3d& voxel_m,
                         const Eigen::Vector3d& origin_m);

    /// Builds a grid centered on `center_m`.
    static GridSpec centered(const Eigen::Vector3d& extent_m, const Eigen::Vector3d& voxel_m,
                             const Eigen::Vector3d& center_m = Eigen::Vector3d::Zero());

    /// Throws std::invalid_argument naming the violated invariant.
    void validate() const;

    std::uint64_t voxel_count() const {
        return std::uint64_t{counts.x()} * counts.y() * counts.z();
    }

    double min_voxel_extent() const { return voxel_m.minCoeff(); }

    Eigen::Vector3d upper_corner() const {
        return origin_m + voxel_m.cwiseProduct(counts.cast<double>());
    }

    std::uint64_t flat_index(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) const {
        return (std::uint64_t{iz} * counts.y() + iy) * counts.x() + ix;
    }

    Vector3u unflatten(std::uint64_t flat) const {
        const std::uint64_t nx = counts.x();
        const std::uint64_t ny = counts.y();
        return {static_cast<std::uint32_t>(flat % nx), static_cast<std::uint32_t>((flat / nx) % ny),
                static_cast<std::uint32_t>(flat / (nx * ny))};
    }

    /// Voxel containing `p`; a point on an interior face belongs to the upper voxel.
    std::optional<Vector3u> voxel_of(const Eigen::Vector3d& p) const {
        Vector3u out;
        for (int a = 0; a < 3; ++a) {
            const double g = std::floor((p[a] - origin_m[a]) / voxel_m[a]);
            if (!(g >= 0.0 && g < static_cast<double>(counts[a]))) {
                return std::nullopt;
            }
            out[a] = static_cast<std::uint32_t>(g);
        }
        return out;
    }

    Eigen::Vector3d voxel_center(const Vector3u& idx) const {
        return origin_m + voxel_m.cwiseProduct(idx.cast<double>() + Eigen::Vector3d::Constant(0.5));
    }

    bool operator==(const GridSpec& other) const = default;
};

/// Uniform energy histogram starting at 0 keV.
struct EnergyBinning {
    std::uint32_t bin_count = 32;
    double bin_width_keV = 4.68;

    void validate() const;

    double max_energy_keV() const { return bin_count * bin_width_keV; }

    /// floor(E / width) clamped into [0, bin_count - 1]. Above-range energies
    /// land in the top bin.
    std::uint32_t bin_index(double energy_keV) const {
        const double b = std::floor(energy_keV / bin_width_keV);
        if (!(b > 0.0)) {
            return 0;
        }
        if (b >= static_cast<double>(bin_count - 1)) {
            return bin_count - 1;
        }
        return static_cast<std::uint32_t>(b);
    }

    /// Bin midpoint, (b + 0.5) * width.
    double bin_center_keV(std::uint32_t b) const { return (b + 0.5) * bin_width_keV; }

    bool operator==(const EnergyBinning& other) const = default;
};

}  // namespace radfield
