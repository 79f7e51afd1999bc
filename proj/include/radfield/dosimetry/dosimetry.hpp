// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "radfield/field/field.hpp"

namespace radfield {

/// Mass energy-transfer coefficients of air, log-log interpolated.
class TransmissionTable {
  public:
    /// (energy_keV, mu_tr/rho in cm^2/g). Throws InputError unless energies
    /// strictly increase and coefficients are positive.
    explicit TransmissionTable(std::vector<std::pair<double, double>> entries);

    /// The embedded dry-air table (10-150 keV).
    static const TransmissionTable& air();

    /// Throws std::out_of_range outside the table.
    double operator()(double energy_keV) const;
    bool covers(double energy_keV) const;

    const std::vector<std::pair<double, double>>& entries() const { return entries_; }

  private:
    std::vector<std::pair<double, double>> entries_;
    std::vector<double> energies_;
    std::vector<double> values_;
};

/// Relative air kerma per primary photon, one value per voxel in flat order.
struct KermaTensor {
    GridSpec grid;
    std::vector<double> values;
};

/// Sum over `channels` (in the given order), then over bins b ascending, of
/// p_b * F * mu_tr(E_b) * E_b with E_b = (b + 0.5) * bin width, each term
/// evaluated left to right. Bins with zero probability are skipped; the table
/// must cover every bin that carries probability somewhere in the field.
/// Throws FieldError(NotFound) for missing channels or layers and InputError
/// when the table does not cover an occupied bin.
KermaTensor kerma_tensor(const RadiationField& field, const std::vector<std::string>& channels,
                         const TransmissionTable& table = TransmissionTable::air());

enum class ScanPlane { XY, XZ, YZ };

/// Parses "xy", "xz" or "yz". Throws InputError.
ScanPlane parse_scan_plane(std::string_view text);
const char* to_string(ScanPlane plane);

struct ScanSample {
    double angle_deg;
    double value;
};

struct PolarScanCurve {
    Eigen::Vector3d center_m = Eigen::Vector3d::Zero();
    double radius_m = 0.0;
    ScanPlane plane = ScanPlane::XY;
    std::vector<ScanSample> samples;

    /// Throws InputError unless angles strictly increase within [0, 360).
    void validate() const;
};

enum class ScanSampling { Trilinear, Nearest };

/// Samples the tensor on a circle at angles 0, step, 2*step, ... below 360.
/// Angle 0 points along the first axis of the plane, 90 along the second.
/// Trilinear sampling needs every point inside the hull of voxel centres,
/// nearest sampling inside the grid; otherwise InputError names the first
/// offending angle.
PolarScanCurve polar_scan(const KermaTensor& tensor, const Eigen::Vector3d& center_m, double radius_m,
                          ScanPlane plane, double step_deg, ScanSampling sampling = ScanSampling::Trilinear);

/// Trapezoidal integral of measured over simulated across their common
/// angles. Throws InputError with fewer than two common angles or a
/// non-positive simulated integral.
double conversion_factor(const PolarScanCurve& measured, const PolarScanCurve& simulated);

/// Returns `curve` with every value multiplied by `factor`.
PolarScanCurve scaled(PolarScanCurve curve, double factor);

struct PointError {
    double angle_deg;
    double measured;
    double simulated;
    double e_rel;
};

struct ErrorStats {
    double median_rel = 0.0;
    double mean_rel = 0.0;
    double std_rel = 0.0;
    std::vector<double> excluded_angles;
    std::vector<PointError> points;
};

/// e_rel = |m - s| / m over angles present in both curves and not excluded.
/// The median of an even count is the mean of the middle pair; the standard
/// deviation is the population one. Throws InputError on a non-positive
/// measured value or when no angle remains.
ErrorStats error_stats(const PolarScanCurve& measured, const PolarScanCurve& simulated_scaled,
                       const std::vector<double>& excluded_angles);

/// `angle_deg,value` with a header line. Throws InputError.
PolarScanCurve read_curve_csv(std::istream& in);
PolarScanCurve read_curve_csv(const std::filesystem::path& path);
void write_curve_csv(std::ostream& out, const PolarScanCurve& curve);

/// `angle_deg,measured,simulated_scaled,e_rel`.
void write_comparison_csv(std::ostream& out, const ErrorStats& stats);

}  // namespace radfield
