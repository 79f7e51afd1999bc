// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace radfield {

struct SpectrumPoint {
    double energy_keV;
    double relative_intensity;
};

/// Tabulated photon spectrum. Intensities are per-energy densities at the
/// tabulated energies; the probability mass of [E_i, E_i+1] is the trapezoid
/// (w_i + w_i+1) / 2 * (E_i+1 - E_i), spread uniformly inside the interval.
class Spectrum {
  public:
    /// Throws InputError unless energies strictly increase, intensities are
    /// non-negative, there are at least two points and the total mass is positive.
    explicit Spectrum(std::vector<SpectrumPoint> points, std::string id = {});

    /// Two-column CSV `energy_keV,relative_intensity` with a header line.
    static Spectrum load_csv(std::istream& in, std::string id = {});
    static Spectrum load_csv(const std::filesystem::path& path);

    /// Inverse-CDF sample, linear within an interval; u in [0, 1).
    double sample(double u) const;

    /// Probability mass of interval i (between points i and i + 1).
    double interval_probability(std::size_t i) const { return cdf_[i + 1] - cdf_[i]; }

    std::span<const SpectrumPoint> points() const { return points_; }
    std::span<const double> cdf() const { return cdf_; }
    double min_energy_keV() const { return points_.front().energy_keV; }
    double max_energy_keV() const { return points_.back().energy_keV; }
    const std::string& id() const { return id_; }

  private:
    std::vector<SpectrumPoint> points_;
    std::vector<double> cdf_;
    std::string id_;
};

inline double sample_energy(const Spectrum& spectrum, double u) { return spectrum.sample(u); }

}  // namespace radfield
