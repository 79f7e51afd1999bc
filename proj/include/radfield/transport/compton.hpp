// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "radfield/transport/rng.hpp"

namespace radfield {

inline constexpr double k_electron_rest_energy_keV = 510.99895;

/// Scattered photon energy for a given scattering angle.
inline double compton_energy(double energy_keV, double cos_theta) {
    return energy_keV / (1.0 + (energy_keV / k_electron_rest_energy_keV) * (1.0 - cos_theta));
}

/// Klein-Nishina dsigma/dOmega up to a constant factor.
inline double klein_nishina_density(double energy_keV, double cos_theta) {
    const double ratio = compton_energy(energy_keV, cos_theta) / energy_keV;
    return ratio * ratio * (ratio + 1.0 / ratio - (1.0 - cos_theta * cos_theta));
}

struct ComptonSample {
    double energy_keV;
    double cos_theta;

    double angle_rad() const { return std::acos(cos_theta); }
};

/// Samples the Klein-Nishina distribution with Kahn's rejection method.
/// x = E / E' is drawn from one of two branches and accepted against the
/// remaining factor of the cross-section.
template <class Rng>
ComptonSample compton_scatter(double energy_keV, Rng& rng) {
    const double alpha = energy_keV / k_electron_rest_energy_keV;
    const double beta = 1.0 + 2.0 * alpha;
    const double left_branch = beta / (beta + 8.0);
    double x = 1.0;
    double mu = 1.0;
    while (true) {
        if (uniform01(rng) < left_branch) {
            const double r = 2.0 * uniform01(rng);
            x = 1.0 + alpha * r;
            if (uniform01(rng) < 4.0 / x * (1.0 - 1.0 / x)) {
                mu = 1.0 - r;
                break;
            }
        } else {
            x = beta / (1.0 + 2.0 * alpha * uniform01(rng));
            mu = 1.0 + (1.0 - x) / alpha;
            if (uniform01(rng) < 0.5 * (mu * mu + 1.0 / x)) {
                break;
            }
        }
    }
    return {energy_keV / x, mu};
}

}  // namespace radfield
