// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

namespace radfield {

/// One row of a mass attenuation table, cm^2/g.
struct AttenuationPoint {
    double energy_keV;
    double total;
    double photoelectric;
    double compton;
};

/// Linear attenuation coefficients at one energy, 1/m.
struct LinearAttenuation {
    double total = 0.0;
    double photoelectric = 0.0;
    double compton = 0.0;
};

class Material {
  public:
    /// Throws InputError on an invalid table: fewer than two rows, energies not
    /// strictly increasing, a non-positive total (partials may be zero), or photoelectric +
    /// compton exceeding total (the remainder is Rayleigh, which is not simulated).
    Material(std::string name, double density_g_cm3, std::vector<AttenuationPoint> table);

    /// Material that never interacts.
    static Material vacuum();

    /// Log-log interpolated coefficients scaled by density. Throws
    /// std::out_of_range outside the tabulated energies.
    LinearAttenuation attenuation(double energy_keV) const;

    bool covers(double energy_keV) const {
        return is_vacuum() || (energy_keV >= min_energy_keV() && energy_keV <= max_energy_keV());
    }

    const std::string& name() const { return name_; }
    double density_g_cm3() const { return density_; }
    bool is_vacuum() const { return table_.empty(); }
    std::span<const AttenuationPoint> table() const { return table_; }
    double min_energy_keV() const;
    double max_energy_keV() const;

  private:
    Material() = default;

    std::string name_;
    double density_ = 0.0;
    std::vector<AttenuationPoint> table_;
};

/// Built-in materials: "vacuum", "air", "water", "soft_tissue" (ICRU
/// four-component). Tables span 10-150 keV. Throws InputError for other names.
const Material& builtin_material(std::string_view name);

/// Exponential free path, -ln(1 - u) / mu(E) in metres; +inf in vacuum.
/// Throws std::out_of_range when E lies outside the material's table.
double sample_free_path(const Material& material, double energy_keV, double u);

/// Log-log interpolation in a table of strictly increasing x; y must be positive.
double loglog_interpolate(std::span<const double> x, std::span<const double> y, double at);

}  // namespace radfield
