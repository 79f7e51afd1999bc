// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "radfield/transport/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "radfield/errors.hpp"
#include "util/csv.hpp"

namespace radfield {
Spectrum::Spectrum(std::vector<SpectrumPoint> points, std::string id)
    : points_(std::move(points)), id_(std::move(id)) {
    if (points_.size() < 2) {
        throw InputError("spectrum needs at least two points");
    }
    cdf_.assign(points_.size(), 0.0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const SpectrumPoint& p = points_[i];
        if (!std::isfinite(p.energy_keV) || p.energy_keV <= 0.0 || !std::isfinite(p.relative_intensity) ||
            p.relative_intensity < 0.0) {
            throw InputError("spectrum point " + std::to_string(i) + " is invalid");
        }
        if (i > 0) {
            const SpectrumPoint& q = points_[i - 1];
            if (!(p.energy_keV > q.energy_keV)) {
                throw InputError("spectrum energies must strictly increase");
            }
            cdf_[i] = cdf_[i - 1] + 0.5 * (p.relative_intensity + q.relative_intensity) *
                                        (p.energy_keV - q.energy_keV);
        }
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) {
        throw InputError("spectrum has no probability mass");
    }
    for (double& c : cdf_) {
        c /= total;
    }
    cdf_.back() = 1.0;
}

Spectrum Spectrum::load_csv(std::istream& in, std::string id) {
    std::vector<SpectrumPoint> points;
    for (const auto& [e, w] : detail::read_two_column_csv(in, "energy_keV", "relative_intensity", "spectrum CSV")) {
        points.push_back({e, w});
    }
    return Spectrum(std::move(points), std::move(id));
}

Spectrum Spectrum::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open spectrum '" + path.string() + "'");
    }
    return load_csv(in, path.filename().string());
}

double Spectrum::sample(double u) const {
    // First cdf entry strictly above u; the interval before it has positive mass.
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) {
        return points_.front().energy_keV;
    }
    if (it == cdf_.end()) {
        return points_.back().energy_keV;
    }
    const auto i = static_cast<std::size_t>(it - cdf_.begin()) - 1;
    const double t = (u - cdf_[i]) / (cdf_[i + 1] - cdf_[i]);
    return points_[i].energy_keV + t * (points_[i + 1].energy_keV - points_[i].energy_keV);
}

}  // namespace radfield
