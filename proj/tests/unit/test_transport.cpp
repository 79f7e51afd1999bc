// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "radfield/errors.hpp"
#include "radfield/transport/compton.hpp"
#include "radfield/transport/material.hpp"
#include "radfield/transport/scene.hpp"
#include "radfield/transport/source.hpp"
#include "radfield/transport/spectrum.hpp"
#include "radfield/transport/tracer.hpp"

using namespace radfield;

namespace {

constexpr double k_pi = 3.14159265358979323846;

// Simpson's rule, n even.
template <class F>
double simpson(F f, double a, double b, int n = 200) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

Scene vacuum_scene(const Eigen::AlignedBox3d& world) {
    Scene scene(builtin_material("vacuum"));
    scene.set_world(world);
    return scene;
}

Scene water_slab_scene(double thickness_m) {
    Scene scene(builtin_material("vacuum"));
    Body slab;
    slab.shape = BoxShape{Eigen::Vector3d(0.5 * thickness_m, 1.0, 1.0)};
    slab.material = scene.add_material(builtin_material("water"));
    scene.add_body(slab);
    scene.fit_world(Eigen::AlignedBox3d(Eigen::Vector3d(-0.2, -0.1, -0.1), Eigen::Vector3d(0.2, 0.1, 0.1)));
    return scene;
}

}  // namespace

TEST_CASE("spectrum sampling") {
    const Spectrum flat({{50.0, 1.0}, {100.0, 1.0}});
    CHECK(flat.sample(0.0) == doctest::Approx(50.0));
    CHECK(flat.sample(0.5) == doctest::Approx(75.0));

    const Spectrum delta({{99.9, 0.0}, {100.0, 1.0}});
    for (double u : {0.0, 0.1, 0.5, 0.999999}) {
        const double e = delta.sample(u);
        CHECK(e >= 99.9);
        CHECK(e <= 100.0);
    }

    SUBCASE("histogram follows the interval masses") {
        const Spectrum s({{10.0, 0.0}, {20.0, 2.0}, {30.0, 1.0}, {50.0, 0.5}, {60.0, 3.0}});
        // Oracle: trapezoid areas of the piecewise-linear density.
        std::vector<double> mass;
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < s.points().size(); ++i) {
            const auto& a = s.points()[i];
            const auto& b = s.points()[i + 1];
            mass.push_back(0.5 * (a.relative_intensity + b.relative_intensity) * (b.energy_keV - a.energy_keV));
            total += mass.back();
        }
        std::vector<double> counts(mass.size(), 0.0);
        StreamRng rng(7, 0);
        constexpr int n = 1'000'000;
        for (int i = 0; i < n; ++i) {
            const double e = s.sample(uniform01(rng));
            for (std::size_t k = 0; k < mass.size(); ++k) {
                if (e < s.points()[k + 1].energy_keV || k + 1 == mass.size()) {
                    counts[k] += 1.0;
                    break;
                }
            }
        }
        for (std::size_t k = 0; k < mass.size(); ++k) {
            CHECK(counts[k] / n == doctest::Approx(mass[k] / total).epsilon(0.01));
        }
    }

    SUBCASE("csv") {
        std::istringstream ok("energy_keV,relative_intensity\n10,0\n20,1\n30,0.5\n");
        CHECK(Spectrum::load_csv(ok).points().size() == 3);
        std::istringstream no_header("10,0\n20,1\n");
        CHECK_THROWS_AS(Spectrum::load_csv(no_header), InputError);
        std::istringstream decreasing("energy_keV,relative_intensity\n20,1\n10,1\n");
        CHECK_THROWS_AS(Spectrum::load_csv(decreasing), InputError);
        std::istringstream negative("energy_keV,relative_intensity\n10,1\n20,-1\n");
        CHECK_THROWS_AS(Spectrum::load_csv(negative), InputError);
    }
}

TEST_CASE("free path sampling") {
    const Material& water = builtin_material("water");
    CHECK(sample_free_path(water, 100.0, 0.0) == 0.0);
    CHECK_THROWS_AS(sample_free_path(water, 5.0, 0.5), std::out_of_range);
    CHECK_THROWS_AS(sample_free_path(water, 200.0, 0.5), std::out_of_range);

    // Table entry at 100 keV, cross-checked against the shipped table row itself.
    double row_total = 0.0;
    for (const auto& p : water.table()) {
        if (p.energy_keV == 100.0) {
            row_total = p.total;
        }
    }
    REQUIRE(row_total == doctest::Approx(0.1707).epsilon(0.002));
    const double mu = water.attenuation(100.0).total;
    CHECK(mu == doctest::Approx(row_total * 100.0));
    CHECK(1.0 / mu == doctest::Approx(0.0586).epsilon(0.002));

    StreamRng rng(11, 0);
    double sum = 0.0;
    constexpr int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        sum += sample_free_path(water, 100.0, uniform01(rng));
    }
    CHECK(sum / n == doctest::Approx(1.0 / mu).epsilon(0.005));
}

TEST_CASE("attenuation interpolation") {
    const Material& water = builtin_material("water");
    const auto t = water.table();
    // Exact at nodes, log-log linear between them.
    const double e0 = t[3].energy_keV;
    const double e1 = t[4].energy_keV;
    CHECK(water.attenuation(e0).total == doctest::Approx(t[3].total * 100.0));
    const double mid = std::sqrt(e0 * e1);
    CHECK(water.attenuation(mid).total == doctest::Approx(std::sqrt(t[3].total * t[4].total) * 100.0));
    CHECK(builtin_material("vacuum").attenuation(1e6).total == 0.0);
    CHECK_THROWS_AS(builtin_material("lead"), InputError);
    CHECK_THROWS_AS(Material("bad", 1.0, {{10.0, 1.0, 0.5, 0.1}}), InputError);
    CHECK_THROWS_AS(Material("bad", 1.0, {{10.0, 1.0, 0.9, 0.5}, {20.0, 1.0, 0.5, 0.1}}), InputError);
}

TEST_CASE("compton kinematics and Klein-Nishina sampling") {
    CHECK(compton_energy(100.0, 1.0) == 100.0);
    CHECK(compton_energy(k_electron_rest_energy_keV, -1.0) == doctest::Approx(k_electron_rest_energy_keV / 3.0));

    constexpr double energy = 100.0;
    constexpr int bins = 36;
    constexpr long n = 40'000'000;
    std::vector<double> hist(bins, 0.0);
    StreamRng rng(3, 0);
    for (long i = 0; i < n; ++i) {
        const ComptonSample s = compton_scatter(energy, rng);
        REQUIRE(s.energy_keV <= energy);
        REQUIRE(s.energy_keV == doctest::Approx(compton_energy(energy, s.cos_theta)));
        const int b = std::min(bins - 1, static_cast<int>(s.angle_rad() / (k_pi / bins)));
        hist[b] += 1.0;
    }
    // Oracle: numerically integrated dsigma/dtheta = KN(cos theta) sin theta.
    const auto pdf = [&](double theta) { return klein_nishina_density(energy, std::cos(theta)) * std::sin(theta); };
    const double total = simpson(pdf, 0.0, k_pi, 3600);
    for (int b = 0; b < bins; ++b) {
        const double expected = simpson(pdf, b * k_pi / bins, (b + 1) * k_pi / bins) / total;
        CHECK_MESSAGE(hist[b] / n == doctest::Approx(expected).epsilon(0.02), "bin " << b);
    }
}

TEST_CASE("source emission") {
    StreamRng rng(5, 0);
    const Spectrum spectrum({{50.0, 1.0}, {60.0, 1.0}});
    SourceConfig source;
    source.position_m = Eigen::Vector3d(0.1, 0.2, 0.3);
    source.direction = Eigen::Vector3d(1.0, 1.0, 0.0).normalized();

    SUBCASE("degenerate cone") {
        source.shape = ConeShape{0.0001};
        for (int i = 0; i < 1000; ++i) {
            const PhotonState p = emit_primary(source, spectrum, rng);
            CHECK(std::acos(std::min(1.0, p.direction.dot(source.direction))) < 1e-5);
        }
    }
    SUBCASE("10 degree cone stays within its half angle") {
        source.shape = ConeShape{10.0};
        const double cos_half = std::cos(5.0 * k_pi / 180.0);
        double max_angle = 0.0;
        for (int i = 0; i < 100'000; ++i) {
            const PhotonState p = emit_primary(source, spectrum, rng);
            REQUIRE(p.position_m == source.position_m);
            REQUIRE(p.scatter_count == 0);
            REQUIRE(p.component == Component::Beam);
            REQUIRE(std::abs(p.direction.norm() - 1.0) < 1e-12);
            REQUIRE(p.direction.dot(source.direction) >= cos_half - 1e-12);
            max_angle = std::max(max_angle, std::acos(std::min(1.0, p.direction.dot(source.direction))));
        }
        CHECK(max_angle > 4.9 * k_pi / 180.0);
    }
    SUBCASE("pyramid hits its rectangle and reaches the corners") {
        source.position_m = Eigen::Vector3d::Zero();
        source.direction = Eigen::Vector3d::UnitX();
        source.shape = PyramidShape{1.0, 1.0, 1.0};
        bool corner[4] = {false, false, false, false};
        for (int i = 0; i < 100'000; ++i) {
            const PhotonState p = emit_primary(source, spectrum, rng);
            // Oracle: intersect the ray with the plane x = 1.
            const Eigen::Vector3d hit = p.direction / p.direction.x();
            REQUIRE(std::abs(hit.y()) <= 0.5 + 1e-12);
            REQUIRE(std::abs(hit.z()) <= 0.5 + 1e-12);
            const int q = (hit.y() > 0 ? 1 : 0) + (hit.z() > 0 ? 2 : 0);
            if (std::abs(hit.y()) > 0.49 && std::abs(hit.z()) > 0.49) {
                corner[q] = true;
            }
        }
        CHECK((corner[0] && corner[1] && corner[2] && corner[3]));
    }
    SUBCASE("validation") {
        source.shape = ConeShape{180.0};
        CHECK_THROWS_AS(source.validate(), InputError);
        source.shape = PyramidShape{1.0, 0.0, 1.0};
        CHECK_THROWS_AS(source.validate(), InputError);
        source.shape = ConeShape{10.0};
        source.direction = Eigen::Vector3d(1.0, 1.0, 0.0);
        CHECK_THROWS_AS(source.validate(), InputError);
    }
}

TEST_CASE("segment classification") {
    CHECK(classify_segment(0u, true) == Component::Beam);
    CHECK(classify_segment(0u, false) == Component::Beam);
    CHECK(classify_segment(2u, false) == Component::Scatter);
    CHECK(classify_segment(1u, true) == Component::Patient);
    CHECK(std::string(channel_name(Component::Patient)) == "patient");
}

TEST_CASE("tracing") {
    SUBCASE("vacuum world gives a single segment to the boundary") {
        const Scene scene = vacuum_scene(Eigen::AlignedBox3d(Eigen::Vector3d::Constant(-1.0), Eigen::Vector3d::Constant(1.0)));
        PhotonState p;
        p.energy_keV = 60.0;
        p.direction = Eigen::Vector3d(0.0, 1.0, 0.0);
        std::vector<Segment> segments;
        StreamRng rng(1, 0);
        CHECK(trace_photon(p, scene, [&](const Segment& s) { segments.push_back(s); }, rng) == Termination::Exit);
        REQUIRE(segments.size() == 1);
        CHECK((segments[0].end_m - Eigen::Vector3d(0.0, 1.0, 0.0)).norm() < 1e-12);
        CHECK(segments[0].component == Component::Beam);
        CHECK(segments[0].energy_keV == 60.0);
    }

    SUBCASE("opaque slab absorbs") {
        Scene scene(builtin_material("vacuum"));
        Body slab;
        slab.shape = BoxShape{Eigen::Vector3d(0.01, 0.5, 0.5)};
        slab.translation_m = Eigen::Vector3d(0.5, 0.0, 0.0);
        slab.material = scene.add_material(Material("opaque", 1.0, {{1.0, 1e6, 1e6, 0.0}, {1000.0, 1e6, 1e6, 0.0}}));
        scene.add_body(slab);
        scene.fit_world(Eigen::AlignedBox3d(Eigen::Vector3d::Constant(-1.0), Eigen::Vector3d::Constant(1.0)));
        StreamRng rng(2, 0);
        for (int i = 0; i < 100; ++i) {
            PhotonState p;
            p.energy_keV = 80.0;
            std::vector<Segment> segments;
            CHECK(trace_photon(p, scene, [&](const Segment& s) { segments.push_back(s); }, rng) == Termination::Absorbed);
            REQUIRE(segments.size() == 2);
            CHECK(segments.back().component == Component::Beam);
            CHECK(segments.back().continues);
            CHECK(segments.back().end_m.x() >= 0.49);
            CHECK(segments.back().end_m.x() <= 0.51);
        }
    }

    SUBCASE("Beer-Lambert transmission through water") {
        constexpr double thickness = 0.05;
        const Scene scene = water_slab_scene(thickness);
        const double mu = builtin_material("water").attenuation(100.0).total;
        const double expected = std::exp(-mu * thickness);
        StreamRng rng(9, 0);
        constexpr int n = 100'000;
        int transmitted = 0;
        for (int i = 0; i < n; ++i) {
            PhotonState p;
            p.position_m = Eigen::Vector3d(-0.15, 0.0, 0.0);
            p.energy_keV = 100.0;
            if (trace_photon(p, scene, [](const Segment&) {}, rng) == Termination::Exit && p.scatter_count == 0) {
                ++transmitted;
            }
        }
        CHECK(static_cast<double>(transmitted) / n == doctest::Approx(expected).epsilon(0.01));
    }

    SUBCASE("track invariants and determinism") {
        const Scene scene = Scene::from_json_text(
            R"({"bodies":[{"shape":{"type":"cylinder","radius_m":0.1,"height_m":0.2,"axis":"z"},)"
            R"("translation_m":[0,0,0],"material":"water","is_patient":true}],"ambient":"air"})");
        Scene world = scene;
        world.fit_world(Eigen::AlignedBox3d(Eigen::Vector3d::Constant(-0.5), Eigen::Vector3d::Constant(0.5)));
        SourceConfig source;
        source.position_m = Eigen::Vector3d(-0.45, 0.0, 0.0);
        source.shape = ConeShape{20.0};
        const Spectrum spectrum({{20.0, 1.0}, {120.0, 1.0}});

        const auto run = [&](std::uint64_t seed) {
            std::vector<Segment> all;
            int scattered = 0;
            for (std::uint64_t i = 0; i < 2000; ++i) {
                StreamRng rng(seed, i);
                PhotonState p = emit_primary(source, spectrum, rng);
                double last_energy = p.energy_keV;
                bool seen_scatter = false;
                trace_photon(p, world, [&](const Segment& s) {
                    CHECK(s.energy_keV <= last_energy);
                    CHECK(std::abs(s.direction.norm() - 1.0) < 1e-9);
                    if (seen_scatter) {
                        CHECK(s.component != Component::Beam);
                    }
                    seen_scatter = seen_scatter || s.component != Component::Beam;
                    last_energy = s.energy_keV;
                    all.push_back(s);
                }, rng);
                scattered += p.scatter_count > 0;
            }
            CHECK(scattered > 100);
            return all;
        };
        const auto a = run(42);
        const auto b = run(42);
        REQUIRE(a.size() == b.size());
        bool identical = true;
        for (std::size_t i = 0; i < a.size(); ++i) {
            identical = identical && a[i].start_m == b[i].start_m && a[i].end_m == b[i].end_m &&
                        a[i].energy_keV == b[i].energy_keV && a[i].component == b[i].component;
        }
        CHECK(identical);
        bool patient_seen = false;
        for (const Segment& s : a) {
            patient_seen = patient_seen || s.component == Component::Patient;
        }
        CHECK(patient_seen);
    }
}

TEST_CASE("scene description") {
    const Scene scene = Scene::from_json_text(
        R"({"bodies":[{"shape":{"type":"cylinder","radius_m":0.1,"height_m":0.2,"axis":"x"},)"
        R"("translation_m":[1,0,0],"rotation_deg":[0,0,0],"material":"water","is_patient":true},)"
        R"({"shape":{"type":"sphere","radius_m":0.05},"translation_m":[0,1,0],"material":"soft_tissue"},)"
        R"({"shape":{"type":"box","half_extents_m":[0.1,0.1,0.1]},"translation_m":[0,0,1],"rotation_deg":[0,0,45],"material":"air"}],"ambient":"air"})");
    REQUIRE(scene.bodies().size() == 3);
    CHECK(scene.ambient().name() == "air");
    // Cylinder along x: long in x, narrow in z.
    CHECK(scene.locate(Eigen::Vector3d(1.09, 0.0, 0.0)) == std::optional<std::size_t>(0));
    CHECK_FALSE(scene.locate(Eigen::Vector3d(1.0, 0.0, 0.15)).has_value());
    CHECK(scene.bodies()[0].is_patient);
    CHECK(scene.locate(Eigen::Vector3d(0.0, 1.04, 0.0)) == std::optional<std::size_t>(1));
    // Box rotated 45 degrees about z reaches further along the diagonal axes.
    CHECK(scene.locate(Eigen::Vector3d(0.13, 0.0, 1.0)) == std::optional<std::size_t>(2));
    CHECK(scene.material_of(std::size_t{1}).name() == "soft_tissue");
    CHECK(scene.digest().size() == 16);
    CHECK(scene.world().contains(Eigen::Vector3d(1.09, 0.0, 0.0)));

    CHECK_THROWS_AS(Scene::from_json_text(
                        R"({"bodies":[{"shape":{"type":"sphere","radius_m":0.1},"material":"water"},)"
                        R"({"shape":{"type":"sphere","radius_m":0.1},"translation_m":[0.15,0,0],"material":"water"}]})"),
                    InputError);
    CHECK_THROWS_AS(Scene::from_json_text(R"({"bodies":[{"shape":{"type":"cone"},"material":"water"}]})"), InputError);
    CHECK_THROWS_AS(Scene::from_json_text(R"({"bodies":[{"shape":{"type":"sphere","radius_m":-1},"material":"water"}]})"),
                    InputError);
    CHECK_THROWS_AS(Scene::from_json_text("{"), InputError);
}
