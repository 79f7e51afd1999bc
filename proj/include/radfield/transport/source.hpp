// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include <Eigen/Core>

#include "radfield/field/field.hpp"
#include "radfield/transport/geometry.hpp"
#include "radfield/transport/rng.hpp"
#include "radfield/transport/spectrum.hpp"

namespace radfield {

enum class Component : std::uint8_t { Beam = 0, Patient = 1, Scatter = 2 };

inline constexpr std::array<Component, 3> k_components{Component::Beam, Component::Patient,
                                                       Component::Scatter};

/// Channel name used in field files: "beam", "patient" or "scatter".
const char* channel_name(Component c);

struct PhotonState {
    Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
    Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
    double energy_keV = 0.0;
    std::uint32_t scatter_count = 0;
    Component component = Component::Beam;
};

/// Point source with a cone or pyramid field. The cone's opening angle is the
/// full apex angle. The pyramid's rectangle lies at `at_distance_m` along
/// `direction`; its width runs along the first axis of
/// orthonormal_frame(direction) and its height along the second.
struct SourceConfig {
    Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
    Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
    FieldShape shape = ConeShape{};

    /// Throws InputError on a non-unit direction or degenerate shape.
    void validate() const;
};

/// Direction of a primary photon drawn from the source's field shape.
template <class Rng>
Eigen::Vector3d sample_direction(const SourceConfig& source, Rng& rng) {
    if (const auto* cone = std::get_if<ConeShape>(&source.shape)) {
        // Uniform over the spherical cap: cos(theta) uniform in [cos(half), 1].
        const double half = 0.5 * cone->opening_angle_deg * (EIGEN_PI / 180.0);
        const double cos_theta = 1.0 - uniform01(rng) * (1.0 - std::cos(half));
        const double phi = 2.0 * EIGEN_PI * uniform01(rng);
        return rotate_direction(source.direction, cos_theta, phi);
    }
    const auto& p = std::get<PyramidShape>(source.shape);
    const auto [u, w] = orthonormal_frame(source.direction);
    const double x = (uniform01(rng) - 0.5) * p.rect_w_m;
    const double y = (uniform01(rng) - 0.5) * p.rect_h_m;
    return (p.at_distance_m * source.direction + x * u + y * w).normalized();
}

template <class Rng>
PhotonState emit_primary(const SourceConfig& source, const Spectrum& spectrum, Rng& rng) {
    PhotonState photon;
    photon.position_m = source.position_m;
    photon.direction = sample_direction(source, rng);
    photon.energy_keV = spectrum.sample(uniform01(rng));
    return photon;
}

}  // namespace radfield
