// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "radfield/dosimetry/dosimetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "radfield/errors.hpp"
#include "radfield/transport/material.hpp"
#include "util/csv.hpp"

namespace radfield {
namespace {

#include "air_mu_tr_table.inc"

constexpr double k_angle_tol = 1e-9;

std::string format_angle(double deg) {
    std::ostringstream s;
    s << deg;
    return s.str();
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> plane_axes(ScanPlane plane) {
    switch (plane) {
        case ScanPlane::XY:
            return {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()};
        case ScanPlane::XZ:
            return {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitZ()};
        case ScanPlane::YZ:
            return {Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
    }
    return {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()};
}

std::optional<double> trilinear(const KermaTensor& t, const Eigen::Vector3d& p) {
    const GridSpec& g = t.grid;
    std::array<std::uint32_t, 3> lo{};
    std::array<double, 3> frac{};
    for (int a = 0; a < 3; ++a) {
        // Continuous index relative to voxel centres.
        const double c = (p[a] - g.origin_m[a]) / g.voxel_m[a] - 0.5;
        const double top = static_cast<double>(g.counts[a] - 1);
        if (c < -k_angle_tol || c > top + k_angle_tol) {
            return std::nullopt;
        }
        const double clamped = std::clamp(c, 0.0, top);
        const double base = std::min(std::floor(clamped), std::max(top - 1.0, 0.0));
        lo[a] = static_cast<std::uint32_t>(base);
        frac[a] = g.counts[a] == 1 ? 0.0 : clamped - base;
    }
    double value = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
        double w = 1.0;
        std::array<std::uint32_t, 3> idx{};
        for (int a = 0; a < 3; ++a) {
            const bool up = (corner >> a) & 1;
            w *= up ? frac[a] : 1.0 - frac[a];
            idx[a] = lo[a] + (up && g.counts[a] > 1 ? 1u : 0u);
        }
        if (w != 0.0) {
            value += w * t.values[g.flat_index(idx[0], idx[1], idx[2])];
        }
    }
    return value;
}

// Samples at angles present in both curves, in increasing order.
std::vector<std::pair<ScanSample, ScanSample>> common_angles(const PolarScanCurve& a, const PolarScanCurve& b) {
    std::vector<std::pair<ScanSample, ScanSample>> out;
    std::size_t j = 0;
    for (const ScanSample& s : a.samples) {
        while (j < b.samples.size() && b.samples[j].angle_deg < s.angle_deg - k_angle_tol) {
            ++j;
        }
        if (j < b.samples.size() && std::abs(b.samples[j].angle_deg - s.angle_deg) <= k_angle_tol) {
            out.emplace_back(s, b.samples[j]);
        }
    }
    return out;
}

}  // namespace

TransmissionTable::TransmissionTable(std::vector<std::pair<double, double>> entries) : entries_(std::move(entries)) {
    if (entries_.size() < 2) {
        throw InputError("transmission table needs at least two entries");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto [e, mu] = entries_[i];
        if (!(e > 0.0) || !(mu > 0.0) || !std::isfinite(e) || !std::isfinite(mu)) {
            throw InputError("transmission table entries must be positive");
        }
        if (i > 0 && !(e > entries_[i - 1].first)) {
            throw InputError("transmission table energies must strictly increase");
        }
        energies_.push_back(e);
        values_.push_back(mu);
    }
}

const TransmissionTable& TransmissionTable::air() {
    static const TransmissionTable table(
        std::vector<std::pair<double, double>>(k_air_mu_tr_table.begin(), k_air_mu_tr_table.end()));
    return table;
}

double TransmissionTable::operator()(double energy_keV) const {
    return loglog_interpolate(energies_, values_, energy_keV);
}

bool TransmissionTable::covers(double energy_keV) const {
    return energy_keV >= energies_.front() && energy_keV <= energies_.back();
}

KermaTensor kerma_tensor(const RadiationField& field, const std::vector<std::string>& channels,
                         const TransmissionTable& table) {
    const std::size_t voxels = field.grid.voxel_count();
    const std::uint32_t bins = field.binning.bin_count;

    std::vector<std::pair<std::span<const float>, std::span<const float>>> inputs;
    for (const std::string& name : channels) {
        const Channel& channel = field.at(name);
        inputs.emplace_back(channel.at("spectrum").values<float>(), channel.at("hits").values<float>());
    }

    // Weight per bin, mu_tr(E_b) * E_b, for bins that hold probability anywhere.
    std::vector<double> mu_tr(bins, 0.0);
    std::vector<double> energy(bins, 0.0);
    std::vector<bool> occupied(bins, false);
    for (const auto& [spectrum, hits] : inputs) {
        for (std::size_t v = 0; v < voxels; ++v) {
            for (std::uint32_t b = 0; b < bins; ++b) {
                occupied[b] = occupied[b] || spectrum[v * bins + b] != 0.0f;
            }
        }
    }
    for (std::uint32_t b = 0; b < bins; ++b) {
        energy[b] = field.binning.bin_center_keV(b);
        if (!occupied[b]) {
            continue;
        }
        if (!table.covers(energy[b])) {
            throw InputError("transmission table does not cover energy bin " + std::to_string(b) + " (" +
                             std::to_string(energy[b]) + " keV)");
        }
        mu_tr[b] = table(energy[b]);
    }

    KermaTensor out{field.grid, std::vector<double>(voxels, 0.0)};
    for (const auto& [spectrum, hits] : inputs) {
        for (std::size_t v = 0; v < voxels; ++v) {
            const double f = hits[v];
            double sum = out.values[v];
            for (std::uint32_t b = 0; b < bins; ++b) {
                const double p = spectrum[v * bins + b];
                if (p != 0.0) {
                    sum += p * f * mu_tr[b] * energy[b];
                }
            }
            out.values[v] = sum;
        }
    }
    return out;
}

ScanPlane parse_scan_plane(std::string_view text) {
    if (text == "xy") return ScanPlane::XY;
    if (text == "xz") return ScanPlane::XZ;
    if (text == "yz") return ScanPlane::YZ;
    throw InputError("scan plane must be one of xy, xz, yz");
}

const char* to_string(ScanPlane plane) {
    switch (plane) {
        case ScanPlane::XY:
            return "xy";
        case ScanPlane::XZ:
            return "xz";
        case ScanPlane::YZ:
            return "yz";
    }
    return "?";
}

void PolarScanCurve::validate() const {
    if (!(radius_m > 0.0)) {
        throw InputError("scan radius must be positive");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double a = samples[i].angle_deg;
        if (!(a >= 0.0 && a < 360.0)) {
            throw InputError("scan angle " + format_angle(a) + " outside [0, 360)");
        }
        if (i > 0 && !(a > samples[i - 1].angle_deg)) {
            throw InputError("scan angles must strictly increase (at " + format_angle(a) + ")");
        }
    }
}

PolarScanCurve polar_scan(const KermaTensor& tensor, const Eigen::Vector3d& center_m, double radius_m,
                          ScanPlane plane, double step_deg, ScanSampling sampling) {
    if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
        throw InputError("scan radius must be positive");
    }
    if (!(step_deg > 0.0 && step_deg <= 360.0)) {
        throw InputError("scan step must lie in (0, 360] degrees");
    }
    PolarScanCurve curve{center_m, radius_m, plane, {}};
    const auto [e1, e2] = plane_axes(plane);
    for (std::size_t i = 0;; ++i) {
        const double angle = static_cast<double>(i) * step_deg;
        if (angle >= 360.0 - k_angle_tol) {
            break;
        }
        const double rad = angle * (EIGEN_PI / 180.0);
        const Eigen::Vector3d p = center_m + radius_m * (std::cos(rad) * e1 + std::sin(rad) * e2);
        std::optional<double> value;
        if (sampling == ScanSampling::Trilinear) {
            value = trilinear(tensor, p);
        } else if (const auto v = tensor.grid.voxel_of(p)) {
            value = tensor.values[tensor.grid.flat_index(v->x(), v->y(), v->z())];
        }
        if (!value) {
            throw InputError("scan circle leaves the grid at angle " + format_angle(angle) + " deg");
        }
        curve.samples.push_back({angle, *value});
    }
    return curve;
}

double conversion_factor(const PolarScanCurve& measured, const PolarScanCurve& simulated) {
    const auto common = common_angles(measured, simulated);
    if (common.size() < 2) {
        throw InputError("measured and simulated curves share fewer than two angles");
    }
    double m = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < common.size(); ++i) {
        const double h = common[i + 1].first.angle_deg - common[i].first.angle_deg;
        m += 0.5 * h * (common[i].first.value + common[i + 1].first.value);
        s += 0.5 * h * (common[i].second.value + common[i + 1].second.value);
    }
    if (!(s > 0.0)) {
        throw InputError("simulated curve integrates to zero");
    }
    return m / s;
}

PolarScanCurve scaled(PolarScanCurve curve, double factor) {
    for (ScanSample& s : curve.samples) {
        s.value *= factor;
    }
    return curve;
}

ErrorStats error_stats(const PolarScanCurve& measured, const PolarScanCurve& simulated_scaled,
                       const std::vector<double>& excluded_angles) {
    ErrorStats stats;
    stats.excluded_angles = excluded_angles;
    for (const auto& [m, s] : common_angles(measured, simulated_scaled)) {
        const double angle = m.angle_deg;
        const bool excluded = std::any_of(excluded_angles.begin(), excluded_angles.end(),
                                          [angle](double a) { return std::abs(a - angle) <= k_angle_tol; });
        if (excluded) {
            continue;
        }
        if (!(m.value > 0.0)) {
            throw InputError("measured value at angle " + format_angle(m.angle_deg) + " deg is not positive");
        }
        stats.points.push_back({m.angle_deg, m.value, s.value, std::abs(m.value - s.value) / m.value});
    }
    if (stats.points.empty()) {
        throw InputError("no matched angles left for error statistics");
    }
    std::vector<double> e;
    for (const PointError& p : stats.points) {
        e.push_back(p.e_rel);
    }
    const Eigen::Map<const Eigen::ArrayXd> arr(e.data(), static_cast<Eigen::Index>(e.size()));
    stats.mean_rel = arr.mean();
    stats.std_rel = std::sqrt((arr - stats.mean_rel).square().mean());
    std::sort(e.begin(), e.end());
    const std::size_t n = e.size();
    stats.median_rel = n % 2 == 1 ? e[n / 2] : 0.5 * (e[n / 2 - 1] + e[n / 2]);
    return stats;
}

PolarScanCurve read_curve_csv(std::istream& in) {
    PolarScanCurve curve;
    curve.radius_m = 1.0;  // unknown for measured data; only angles and values matter
    for (const auto& [angle, value] : detail::read_two_column_csv(in, "angle_deg", "value", "curve CSV")) {
        curve.samples.push_back({angle, value});
    }
    curve.validate();
    return curve;
}

PolarScanCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open curve '" + path.string() + "'");
    }
    return read_curve_csv(in);
}

void write_curve_csv(std::ostream& out, const PolarScanCurve& curve) {
    out << "angle_deg,value\n" << std::setprecision(17);
    for (const ScanSample& s : curve.samples) {
        out << s.angle_deg << ',' << s.value << '\n';
    }
}

void write_comparison_csv(std::ostream& out, const ErrorStats& stats) {
    out << "angle_deg,measured,simulated_scaled,e_rel\n" << std::setprecision(17);
    for (const PointError& p : stats.points) {
        out << p.angle_deg << ',' << p.measured << ',' << p.simulated << ',' << p.e_rel << '\n';
    }
}

}  // namespace radfield
