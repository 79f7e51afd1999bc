// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "radfield/transport/material.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "radfield/errors.hpp"

namespace radfield {
namespace {

struct MaterialTableData {
    const char* name;
    double density;
    std::vector<AttenuationPoint> rows;
};

#include "material_tables.inc"

// Index of the interval [x_i, x_i+1] that contains `at`.
std::size_t bracket(std::span<const double> x, double at) {
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x.begin(), 1)) - 1;
    return std::min(i, x.size() - 2);
}

double interpolate(double e0, double v0, double e1, double v1, double e) {
    const double t = std::log(e / e0) / std::log(e1 / e0);
    if (v0 <= 0.0 || v1 <= 0.0) {
        return v0 + t * (v1 - v0);  // a component switched off in a synthetic table
    }
    return std::exp(std::log(v0) + t * std::log(v1 / v0));
}

}  // namespace

double loglog_interpolate(std::span<const double> x, std::span<const double> y, double at) {
    if (x.size() < 2 || at < x.front() || at > x.back()) {
        throw std::out_of_range("energy " + std::to_string(at) + " keV outside table");
    }
    const std::size_t i = bracket(x, at);
    return interpolate(x[i], y[i], x[i + 1], y[i + 1], at);
}

Material::Material(std::string name, double density_g_cm3, std::vector<AttenuationPoint> table)
    : name_(std::move(name)), density_(density_g_cm3), table_(std::move(table)) {
    if (!(density_ > 0.0) || !std::isfinite(density_)) {
        throw InputError("material '" + name_ + "': density must be positive");
    }
    if (table_.size() < 2) {
        throw InputError("material '" + name_ + "': attenuation table needs two rows");
    }
    for (std::size_t i = 0; i < table_.size(); ++i) {
        const AttenuationPoint& p = table_[i];
        if (!(p.energy_keV > 0.0) || !(p.total > 0.0) || !(p.photoelectric >= 0.0) || !(p.compton >= 0.0) ||
            !(p.photoelectric + p.compton > 0.0) || !std::isfinite(p.total)) {
            throw InputError("material '" + name_ + "': coefficients must be positive");
        }
        if (i > 0 && !(p.energy_keV > table_[i - 1].energy_keV)) {
            throw InputError("material '" + name_ + "': energies must strictly increase");
        }
        if (p.photoelectric + p.compton > p.total * (1.0 + 1e-9)) {
            throw InputError("material '" + name_ + "': photoelectric + compton exceeds total");
        }
    }
}

Material Material::vacuum() {
    Material m;
    m.name_ = "vacuum";
    return m;
}

double Material::min_energy_keV() const {
    return is_vacuum() ? 0.0 : table_.front().energy_keV;
}

double Material::max_energy_keV() const {
    return is_vacuum() ? std::numeric_limits<double>::infinity() : table_.back().energy_keV;
}

LinearAttenuation Material::attenuation(double energy_keV) const {
    if (is_vacuum()) {
        return {};
    }
    if (!(energy_keV >= min_energy_keV() && energy_keV <= max_energy_keV())) {
        throw std::out_of_range("material '" + name_ + "': energy " + std::to_string(energy_keV) +
                                " keV outside table");
    }
    const auto it = std::upper_bound(table_.begin(), table_.end(), energy_keV,
                                     [](double e, const AttenuationPoint& p) { return e < p.energy_keV; });
    const auto i = std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - table_.begin(), 1)) - 1,
                            table_.size() - 2);
    const AttenuationPoint& a = table_[i];
    const AttenuationPoint& b = table_[i + 1];
    // density [g/cm^3] * mu/rho [cm^2/g] = 1/cm; x100 for 1/m.
    const double scale = density_ * 100.0;
    return {scale * interpolate(a.energy_keV, a.total, b.energy_keV, b.total, energy_keV),
            scale * interpolate(a.energy_keV, a.photoelectric, b.energy_keV, b.photoelectric, energy_keV),
            scale * interpolate(a.energy_keV, a.compton, b.energy_keV, b.compton, energy_keV)};
}

const Material& builtin_material(std::string_view name) {
    static const std::map<std::string, Material, std::less<>> materials = [] {
        std::map<std::string, Material, std::less<>> m;
        m.emplace("vacuum", Material::vacuum());
        for (const MaterialTableData* d : {&k_air_table, &k_water_table, &k_soft_tissue_table}) {
            m.emplace(d->name, Material(d->name, d->density, d->rows));
        }
        return m;
    }();
    const auto it = materials.find(name);
    if (it == materials.end()) {
        throw InputError("unknown material '" + std::string(name) +
                         "' (known: vacuum, air, water, soft_tissue)");
    }
    return it->second;
}

double sample_free_path(const Material& material, double energy_keV, double u) {
    const double mu = material.attenuation(energy_keV).total;
    if (mu <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log1p(-u) / mu;
}

}  // namespace radfield
