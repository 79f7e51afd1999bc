// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "radfield/dosimetry/dosimetry.hpp"
#include "radfield/errors.hpp"

#include "kerma_oracle.hpp"

using namespace radfield;

namespace {

constexpr double k_pi = 3.14159265358979323846;

PolarScanCurve curve_of(std::vector<ScanSample> samples) {
    PolarScanCurve c;
    c.radius_m = 0.3;
    c.samples = std::move(samples);
    return c;
}

KermaTensor tensor_from(const GridSpec& grid, const std::function<double(const Eigen::Vector3d&)>& f) {
    KermaTensor t{grid, std::vector<double>(grid.voxel_count())};
    for (std::uint64_t v = 0; v < grid.voxel_count(); ++v) {
        t.values[v] = f(grid.voxel_center(grid.unflatten(v)));
    }
    return t;
}

}  // namespace

TEST_CASE("transmission table") {
    const TransmissionTable& air = TransmissionTable::air();
    CHECK(air.entries().size() == 15);
    CHECK(air(100.0) == doctest::Approx(air.entries()[12].second));
    CHECK(air(std::sqrt(50.0 * 60.0)) ==
          doctest::Approx(std::sqrt(air.entries()[8].second * air.entries()[9].second)));
    CHECK_THROWS_AS(air(5.0), std::out_of_range);
    CHECK_THROWS_AS(TransmissionTable({{10.0, 1.0}, {10.0, 2.0}}), InputError);
    CHECK_THROWS_AS(TransmissionTable({{10.0, 1.0}, {20.0, 0.0}}), InputError);
}

TEST_CASE("kerma tensor") {
    const TransmissionTable& air = TransmissionTable::air();

    SUBCASE("single bin") {
        RadiationField f = oracle::kerma_test_field({1, 1, 1}, 8, 15.0, 1, {});
        auto spectrum = f.channels[0].layers[0].values<float>();
        std::fill(spectrum.begin(), spectrum.end(), 0.0f);
        spectrum[3] = 1.0f;
        f.channels[0].layers[1].values<float>()[0] = 1.0f;
        const KermaTensor k = kerma_tensor(f, {"beam"}, air);
        const double e = 3.5 * 15.0;
        CHECK(k.values[0] == air(e) * e);
    }

    SUBCASE("brute force over random fields") {
        std::mt19937_64 rng(77);
        for (std::uint32_t nx = 1; nx <= 4; ++nx) {
            for (std::uint32_t bins = 1; bins <= 8; ++bins) {
                const RadiationField f = oracle::kerma_test_field({nx, 4, 3}, bins, 150.0 / (bins + 1), 2, rng);
                const std::vector<std::string> channels{"scatter", "beam"};
                const KermaTensor k = kerma_tensor(f, channels, air);
                const std::vector<double> expected = oracle::kerma_brute_force(f, channels, air.entries());
                REQUIRE(k.values.size() == expected.size());
                for (std::size_t v = 0; v < expected.size(); ++v) {
                    CHECK(std::abs(k.values[v] - expected[v]) <= 1e-12 * std::abs(expected[v]));
                    CHECK(k.values[v] >= 0.0);
                }
            }
        }
    }

    SUBCASE("linear in hits and zero where unhit") {
        std::mt19937_64 rng(5);
        RadiationField f = oracle::kerma_test_field({3, 3, 3}, 8, 18.0, 1, rng);
        auto hits = f.channels[0].layers[1].values<float>();
        hits[4] = 0.0f;
        auto spectrum = f.channels[0].layers[0].values<float>();
        std::fill(spectrum.begin() + 4 * 8, spectrum.begin() + 5 * 8, 0.0f);
        const KermaTensor once = kerma_tensor(f, {"beam"}, air);
        CHECK(once.values[4] == 0.0);
        for (float& h : hits) {
            h *= 2.0f;
        }
        const KermaTensor twice = kerma_tensor(f, {"beam"}, air);
        for (std::size_t v = 0; v < once.values.size(); ++v) {
            CHECK(twice.values[v] == doctest::Approx(2.0 * once.values[v]).epsilon(1e-12));
        }
    }

    SUBCASE("errors") {
        RadiationField f = oracle::kerma_test_field({1, 1, 1}, 32, 4.68, 1, {});
        auto spectrum = f.channels[0].layers[0].values<float>();
        std::fill(spectrum.begin(), spectrum.end(), 0.0f);
        spectrum[0] = 1.0f;  // 2.34 keV, below the table
        CHECK_THROWS_AS(kerma_tensor(f, {"beam"}, air), InputError);
        CHECK_THROWS_AS(kerma_tensor(f, {"patient"}, air), FieldError);
    }
}

TEST_CASE("polar scan") {
    const GridSpec grid = GridSpec::make({1.0, 1.0, 1.0}, {0.02, 0.02, 0.02}, {-0.5, -0.5, -0.5});

    SUBCASE("uniform tensor") {
        const KermaTensor t = tensor_from(grid, [](const Eigen::Vector3d&) { return 3.0; });
        const PolarScanCurve c = polar_scan(t, Eigen::Vector3d::Zero(), 0.3, ScanPlane::XY, 10.0);
        REQUIRE(c.samples.size() == 36);
        CHECK(c.samples.back().angle_deg == doctest::Approx(350.0));
        for (const ScanSample& s : c.samples) {
            CHECK(s.value == doctest::Approx(3.0).epsilon(1e-14));
        }
        c.validate();
    }

    SUBCASE("linear tensor is reproduced exactly by trilinear sampling") {
        const KermaTensor t = tensor_from(grid, [](const Eigen::Vector3d& p) { return 1.0 + p.x() - 2.0 * p.z(); });
        const PolarScanCurve c = polar_scan(t, Eigen::Vector3d(0.0, 0.1, 0.0), 0.25, ScanPlane::XZ, 15.0);
        for (const ScanSample& s : c.samples) {
            const double r = s.angle_deg * k_pi / 180.0;
            CHECK(s.value == doctest::Approx(1.0 + 0.25 * std::cos(r) - 0.5 * std::sin(r)).epsilon(1e-12));
        }
    }

    SUBCASE("inverse square ratio between two radii") {
        const Eigen::Vector3d source(0.0, 0.0, 0.0);
        const KermaTensor t = tensor_from(grid, [&](const Eigen::Vector3d& p) { return 1.0 / (p - source).squaredNorm(); });
        const PolarScanCurve inner = polar_scan(t, source, 0.195, ScanPlane::XY, 10.0);
        const PolarScanCurve outer = polar_scan(t, source, 0.295, ScanPlane::XY, 10.0);
        const double expected = std::pow(29.5 / 19.5, 2.0);
        CHECK(expected == doctest::Approx(2.289).epsilon(1e-3));
        for (std::size_t i = 0; i < inner.samples.size(); ++i) {
            CHECK(inner.samples[i].value / outer.samples[i].value == doctest::Approx(expected).epsilon(0.05));
        }
    }

    SUBCASE("out of bounds names the angle") {
        const KermaTensor t = tensor_from(grid, [](const Eigen::Vector3d&) { return 1.0; });
        try {
            polar_scan(t, Eigen::Vector3d(0.1, 0.0, 0.0), 0.395, ScanPlane::XY, 10.0);
            FAIL("expected an error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("angle 0 deg") != std::string::npos);
        }
        CHECK_NOTHROW(polar_scan(t, Eigen::Vector3d(0.1, 0.0, 0.0), 0.395, ScanPlane::XY, 10.0, ScanSampling::Nearest));
        CHECK_THROWS_AS(polar_scan(t, Eigen::Vector3d::Zero(), 0.0, ScanPlane::XY, 10.0), InputError);
    }

    SUBCASE("nearest sampling reads the containing voxel") {
        const KermaTensor t = tensor_from(grid, [](const Eigen::Vector3d& p) { return p.x(); });
        const PolarScanCurve c =
            polar_scan(t, Eigen::Vector3d(0.001, 0.001, 0.001), 0.1, ScanPlane::XY, 90.0, ScanSampling::Nearest);
        REQUIRE(c.samples.size() == 4);
        CHECK(c.samples[0].value == doctest::Approx(0.11));
        CHECK(c.samples[2].value == doctest::Approx(-0.09));
    }
}

TEST_CASE("conversion factor") {
    std::vector<ScanSample> sim;
    std::vector<ScanSample> meas;
    std::vector<ScanSample> sine;
    for (int a = 0; a < 360; a += 10) {
        const double s = 1.0 + 0.3 * std::cos(a * k_pi / 180.0) + 0.01 * a;
        sim.push_back({double(a), s});
        meas.push_back({double(a), 3.7 * s});
        sine.push_back({double(a), 2.0 + std::sin(a * k_pi / 180.0)});
    }
    const PolarScanCurve s = curve_of(sim);
    const PolarScanCurve m = curve_of(meas);
    CHECK(std::abs(conversion_factor(m, s) - 3.7) <= 1e-12 * 3.7);
    CHECK(conversion_factor(s, s) == 1.0);

    // Independent quadrature oracle: composite trapezoid written out per panel.
    std::vector<ScanSample> ones;
    for (int a = 0; a < 360; a += 10) {
        ones.push_back({double(a), 1.0});
    }
    double num = 0.0;
    for (int a = 0; a < 350; a += 10) {
        num += 5.0 * ((2.0 + std::sin(a * k_pi / 180.0)) + (2.0 + std::sin((a + 10) * k_pi / 180.0)));
    }
    CHECK(conversion_factor(curve_of(sine), curve_of(ones)) == doctest::Approx(num / 350.0).epsilon(1e-14));

    const double c = 2.25;
    CHECK(conversion_factor(scaled(m, c), s) == doctest::Approx(c * conversion_factor(m, s)).epsilon(1e-14));
    const PolarScanCurve calibrated = scaled(curve_of(sine), conversion_factor(m, curve_of(sine)));
    CHECK(std::abs(conversion_factor(m, calibrated) - 1.0) <= 1e-12);

    CHECK_THROWS_AS(conversion_factor(curve_of({{0.0, 1.0}}), curve_of({{10.0, 1.0}})), InputError);
    CHECK_THROWS_AS(conversion_factor(m, curve_of({{0.0, 0.0}, {10.0, 0.0}})), InputError);
}

TEST_CASE("error statistics") {
    const PolarScanCurve m = curve_of({{0.0, 1.0}, {10.0, 2.0}, {20.0, 4.0}});
    SUBCASE("identical") {
        const ErrorStats e = error_stats(m, m, {});
        CHECK(e.median_rel == 0.0);
        CHECK(e.mean_rel == 0.0);
        CHECK(e.std_rel == 0.0);
    }
    SUBCASE("uniform ten percent") {
        const ErrorStats e = error_stats(m, scaled(m, 1.1), {});
        CHECK(e.median_rel == doctest::Approx(0.1));
        CHECK(e.mean_rel == doctest::Approx(0.1));
        CHECK(e.std_rel == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("known per-point errors") {
        const PolarScanCurve s = curve_of({{0.0, 1.02}, {10.0, 2.0 * 0.96}, {20.0, 4.0 * 1.40}});
        const ErrorStats e = error_stats(m, s, {});
        const double mean = (0.02 + 0.04 + 0.40) / 3.0;
        const double var = ((0.02 - mean) * (0.02 - mean) + (0.04 - mean) * (0.04 - mean) +
                            (0.40 - mean) * (0.40 - mean)) / 3.0;
        CHECK(e.median_rel == doctest::Approx(0.04));
        CHECK(e.mean_rel == doctest::Approx(0.1533).epsilon(1e-3));
        CHECK(e.mean_rel == doctest::Approx(mean).epsilon(1e-12));
        CHECK(e.std_rel == doctest::Approx(std::sqrt(var)).epsilon(1e-12));

        const ErrorStats scaled_both = error_stats(scaled(m, 7.5), scaled(s, 7.5), {});
        CHECK(std::abs(scaled_both.median_rel - e.median_rel) <= 1e-12);
        CHECK(std::abs(scaled_both.mean_rel - e.mean_rel) <= 1e-12);
        CHECK(std::abs(scaled_both.std_rel - e.std_rel) <= 1e-12);

        const ErrorStats without = error_stats(m, s, {20.0});
        CHECK(without.points.size() == 2);
        CHECK(without.median_rel == doctest::Approx(0.03));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(error_stats(curve_of({{0.0, 0.0}}), curve_of({{0.0, 1.0}}), {}), InputError);
        CHECK_THROWS_AS(error_stats(m, m, {0.0, 10.0, 20.0}), InputError);
    }
}

TEST_CASE("curve csv") {
    std::istringstream in("angle_deg,value\n0,1.5\n10,2.5\n");
    const PolarScanCurve c = read_curve_csv(in);
    REQUIRE(c.samples.size() == 2);
    std::ostringstream out;
    write_curve_csv(out, c);
    std::istringstream back(out.str());
    CHECK(read_curve_csv(back).samples[1].value == 2.5);
    std::istringstream unordered("angle_deg,value\n10,1\n0,2\n");
    CHECK_THROWS_AS(read_curve_csv(unordered), InputError);
    std::istringstream bad_header("angle,value\n0,1\n");
    CHECK_THROWS_AS(read_curve_csv(bad_header), InputError);

    const ErrorStats e = error_stats(c, c, {});
    std::ostringstream cmp;
    write_comparison_csv(cmp, e);
    CHECK(cmp.str().rfind("angle_deg,measured,simulated_scaled,e_rel\n", 0) == 0);
}
