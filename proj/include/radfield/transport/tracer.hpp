// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "radfield/transport/compton.hpp"
#include "radfield/transport/material.hpp"
#include "radfield/transport/rng.hpp"
#include "radfield/transport/scene.hpp"
#include "radfield/transport/source.hpp"

namespace radfield {

inline constexpr double k_energy_cutoff_keV = 1.0;
inline constexpr std::uint32_t k_step_cap = 10'000;

constexpr Component classify_segment(std::uint32_t scatter_count, bool inside_patient) {
    if (scatter_count == 0) {
        return Component::Beam;
    }
    return inside_patient ? Component::Patient : Component::Scatter;
}

inline Component classify_segment(const PhotonState& photon, bool inside_patient) {
    return classify_segment(photon.scatter_count, inside_patient);
}

/// One straight piece of a track. `continues` is set when the segment picks
/// up exactly where the previous one stopped at a body surface, with the same
/// direction and energy.
struct Segment {
    Eigen::Vector3d start_m;
    Eigen::Vector3d end_m;
    Eigen::Vector3d direction;
    double energy_keV;
    Component component;
    bool continues;
};

enum class Termination : std::uint8_t { Absorbed, Cutoff, Exit, StepCap };

/// Follows one photon until absorption, cutoff or world exit, handing every
/// segment to `sink(const Segment&)`. Photons below the current material's
/// tabulated range are treated like the cutoff. Rayleigh attenuation in the
/// tables is kept in the free path and its events are shared between
/// photoabsorption and Compton in proportion to their coefficients.
template <class Sink, class Rng>
Termination trace_photon(PhotonState& photon, const Scene& scene, Sink&& sink, Rng& rng) {
    constexpr double k_nudge = 1e-9;
    std::optional<std::size_t> body = scene.locate(photon.position_m);
    bool continues = false;
    for (std::uint32_t step = 0; step < k_step_cap; ++step) {
        const Material& material = scene.material_of(body);
        if (photon.energy_keV < k_energy_cutoff_keV ||
            (!material.is_vacuum() && photon.energy_keV < material.min_energy_keV())) {
            return Termination::Cutoff;
        }
        const bool in_patient = body && scene.bodies()[*body].is_patient;
        photon.component = classify_segment(photon, in_patient);

        const Scene::Boundary boundary = scene.next_boundary(photon.position_m, photon.direction, body);
        LinearAttenuation mu;
        double free_path = std::numeric_limits<double>::infinity();
        if (!material.is_vacuum()) {
            mu = material.attenuation(photon.energy_keV);
            free_path = -std::log1p(-uniform01(rng)) / mu.total;
        }

        const bool interacts = free_path < boundary.distance_m;
        const double length = interacts ? free_path : boundary.distance_m;
        const Eigen::Vector3d end = photon.position_m + length * photon.direction;
        sink(Segment{photon.position_m, end, photon.direction, photon.energy_keV, photon.component, continues});
        photon.position_m = end;

        if (!interacts) {
            if (boundary.leaves_world) {
                return Termination::Exit;
            }
            body = scene.locate(photon.position_m + k_nudge * photon.direction);
            continues = true;
            continue;
        }

        const double photo_share = mu.photoelectric / (mu.photoelectric + mu.compton);
        if (uniform01(rng) < photo_share) {
            return Termination::Absorbed;
        }
        const ComptonSample scattered = compton_scatter(photon.energy_keV, rng);
        const double phi = 2.0 * EIGEN_PI * uniform01(rng);
        photon.direction = rotate_direction(photon.direction, scattered.cos_theta, phi);
        photon.energy_keV = scattered.energy_keV;
        ++photon.scatter_count;
        continues = false;
    }
    return Termination::StepCap;
}

}  // namespace radfield
