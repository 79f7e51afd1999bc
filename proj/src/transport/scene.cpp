// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "radfield/transport/scene.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "radfield/errors.hpp"
#include "radfield/transport/rng.hpp"

namespace radfield {
namespace {

using nlohmann::json;

Eigen::Vector3d vec3_of(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 3) {
        throw InputError(std::string("scene: '") + key + "' must be a 3-element array");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

double positive(const json& j, const char* key) {
    const double v = j.at(key).get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InputError(std::string("scene: '") + key + "' must be positive");
    }
    return v;
}

// Maps the local cylinder axis (z) onto the requested world axis.
Eigen::Matrix3d axis_alignment(const std::string& axis) {
    if (axis == "z") {
        return Eigen::Matrix3d::Identity();
    }
    if (axis == "x") {
        return Eigen::AngleAxisd(EIGEN_PI / 2, Eigen::Vector3d::UnitY()).toRotationMatrix();
    }
    if (axis == "y") {
        return Eigen::AngleAxisd(-EIGEN_PI / 2, Eigen::Vector3d::UnitX()).toRotationMatrix();
    }
    throw InputError("scene: cylinder axis must be one of x, y, z");
}

}  // namespace

std::optional<RayInterval<double>> Body::intersect(const Eigen::Vector3d& origin,
                                                   const Eigen::Vector3d& dir) const {
    const Eigen::Vector3d o = rotation.transpose() * (origin - translation_m);
    const Eigen::Vector3d d = rotation.transpose() * dir;
    return std::visit(
        [&](const auto& s) -> std::optional<RayInterval<double>> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CylinderShape>) {
                return intersect_cylinder(s.radius_m, 0.5 * s.height_m, o, d);
            } else if constexpr (std::is_same_v<T, SphereShape>) {
                return intersect_sphere(s.radius_m, o, d);
            } else {
                return intersect_box(s.half_extents_m, o, d);
            }
        },
        shape);
}

bool Body::contains(const Eigen::Vector3d& p) const {
    const Eigen::Vector3d l = rotation.transpose() * (p - translation_m);
    return std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CylinderShape>) {
                return l.head<2>().squaredNorm() <= s.radius_m * s.radius_m && std::abs(l.z()) <= 0.5 * s.height_m;
            } else if constexpr (std::is_same_v<T, SphereShape>) {
                return l.squaredNorm() <= s.radius_m * s.radius_m;
            } else {
                return (l.cwiseAbs().array() <= s.half_extents_m.array()).all();
            }
        },
        shape);
}

Eigen::AlignedBox3d Body::bounds() const {
    const Eigen::Vector3d half = std::visit(
        [](const auto& s) -> Eigen::Vector3d {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CylinderShape>) {
                return {s.radius_m, s.radius_m, 0.5 * s.height_m};
            } else if constexpr (std::is_same_v<T, SphereShape>) {
                return Eigen::Vector3d::Constant(s.radius_m);
            } else {
                return s.half_extents_m;
            }
        },
        shape);
    // Extent of a rotated box: |R| * half.
    const Eigen::Vector3d world_half = rotation.cwiseAbs() * half;
    return {translation_m - world_half, translation_m + world_half};
}

Eigen::Matrix3d rotation_from_euler_deg(const Eigen::Vector3d& deg) {
    const Eigen::Vector3d rad = deg * (EIGEN_PI / 180.0);
    return (Eigen::AngleAxisd(rad.z(), Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(rad.y(), Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(rad.x(), Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

Scene::Scene(const Material& ambient) : materials_{ambient}, ambient_(0) {}

std::size_t Scene::add_material(const Material& material) {
    for (std::size_t i = 0; i < materials_.size(); ++i) {
        if (materials_[i].name() == material.name()) {
            return i;
        }
    }
    materials_.push_back(material);
    return materials_.size() - 1;
}

void Scene::add_body(Body body) {
    if (body.material >= materials_.size()) {
        throw InputError("scene: body references an unknown material index");
    }
    bodies_.push_back(std::move(body));
    fit_world(bodies_.back().bounds(), 0.0);
}

std::optional<std::size_t> Scene::locate(const Eigen::Vector3d& p) const {
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
        if (bodies_[i].contains(p)) {
            return i;
        }
    }
    return std::nullopt;
}

Scene::Boundary Scene::next_boundary(const Eigen::Vector3d& pos, const Eigen::Vector3d& dir,
                                     std::optional<std::size_t> body) const {
    constexpr double k_ahead = 1e-9;
    double world_exit = 0.0;
    if (!world_.isEmpty()) {
        const Eigen::Vector3d half = 0.5 * world_.sizes();
        if (const auto hit = intersect_box<double>(half, pos - world_.center(), dir)) {
            world_exit = std::max(hit->exit, 0.0);
        }
    }
    double nearest = std::numeric_limits<double>::infinity();
    if (body) {
        if (const auto hit = bodies_[*body].intersect(pos, dir)) {
            nearest = std::max(hit->exit, 0.0);
        } else {
            nearest = 0.0;
        }
    } else {
        for (const Body& b : bodies_) {
            const auto hit = b.intersect(pos, dir);
            if (hit && hit->enter > k_ahead && hit->enter < nearest) {
                nearest = hit->enter;
            }
        }
    }
    if (world_exit <= nearest) {
        return {world_exit, true};
    }
    return {nearest, false};
}

void Scene::check_overlap(std::size_t samples, std::uint64_t seed) const {
    if (bodies_.size() < 2) {
        return;
    }
    Eigen::AlignedBox3d box;
    for (const Body& b : bodies_) {
        box.extend(b.bounds());
    }
    StreamRng rng(seed, 0);
    for (std::size_t s = 0; s < samples; ++s) {
        const Eigen::Vector3d u(uniform01(rng), uniform01(rng), uniform01(rng));
        const Eigen::Vector3d p = box.min() + u.cwiseProduct(box.sizes());
        int inside = 0;
        for (std::size_t i = 0; i < bodies_.size(); ++i) {
            if (bodies_[i].contains(p) && ++inside > 1) {
                throw InputError("scene: bodies overlap near (" + std::to_string(p.x()) + ", " +
                                 std::to_string(p.y()) + ", " + std::to_string(p.z()) + ")");
            }
        }
    }
}

void Scene::fit_world(const Eigen::AlignedBox3d& extra, double margin_m) {
    for (const Body& b : bodies_) {
        world_.extend(b.bounds());
    }
    world_.extend(extra);
    if (world_.isEmpty()) {
        return;
    }
    world_.min().array() -= margin_m;
    world_.max().array() += margin_m;
}

double Scene::min_energy_keV() const {
    double lo = 0.0;
    for (const Material& m : materials_) {
        lo = std::max(lo, m.min_energy_keV());
    }
    return lo;
}

double Scene::max_energy_keV() const {
    double hi = std::numeric_limits<double>::infinity();
    for (const Material& m : materials_) {
        hi = std::min(hi, m.max_energy_keV());
    }
    return hi;
}

Scene Scene::from_json_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("scene: ") + e.what());
    }
    try {
        Scene scene(builtin_material(doc.value("ambient", std::string("air"))));
        for (const json& jb : doc.value("bodies", json::array())) {
            const json& js = jb.at("shape");
            const std::string type = js.at("type").get<std::string>();
            Body body;
            Eigen::Matrix3d align = Eigen::Matrix3d::Identity();
            if (type == "cylinder") {
                body.shape = CylinderShape{positive(js, "radius_m"), positive(js, "height_m")};
                align = axis_alignment(js.value("axis", std::string("z")));
            } else if (type == "sphere") {
                body.shape = SphereShape{positive(js, "radius_m")};
            } else if (type == "box") {
                const Eigen::Vector3d half = vec3_of(js, "half_extents_m");
                if (!(half.array() > 0.0).all()) {
                    throw InputError("scene: box half extents must be positive");
                }
                body.shape = BoxShape{half};
            } else {
                throw InputError("scene: unknown shape type '" + type + "'");
            }
            const Eigen::Vector3d rot =
                jb.contains("rotation_deg") ? vec3_of(jb, "rotation_deg") : Eigen::Vector3d::Zero();
            body.rotation = rotation_from_euler_deg(rot) * align;
            body.translation_m =
                jb.contains("translation_m") ? vec3_of(jb, "translation_m") : Eigen::Vector3d::Zero();
            body.material = scene.add_material(builtin_material(jb.at("material").get<std::string>()));
            body.is_patient = jb.value("is_patient", false);
            scene.add_body(std::move(body));
        }
        scene.check_overlap();
        scene.digest_ = fnv1a64_hex(doc.dump());
        return scene;
    } catch (const json::exception& e) {
        throw InputError(std::string("scene: ") + e.what());
    }
}

Scene Scene::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scene '" + path.string() + "'");
    }
    std::stringstream text;
    text << in.rdbuf();
    return from_json_text(text.str());
}

std::string fnv1a64_hex(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace radfield
