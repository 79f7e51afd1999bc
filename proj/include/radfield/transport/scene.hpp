// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Geometry>

#include "radfield/transport/geometry.hpp"
#include "radfield/transport/material.hpp"

namespace radfield {

/// Cylinder along the local z axis, centred on the local origin.
struct CylinderShape {
    double radius_m;
    double height_m;
};

struct SphereShape {
    double radius_m;
};

struct BoxShape {
    Eigen::Vector3d half_extents_m;
};

using Shape = std::variant<CylinderShape, SphereShape, BoxShape>;

/// A convex primitive placed in the world. `rotation` maps local to world
/// directions; world = rotation * local + translation.
struct Body {
    Shape shape;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation_m = Eigen::Vector3d::Zero();
    std::size_t material = 0;
    bool is_patient = false;

    std::optional<RayInterval<double>> intersect(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const;
    bool contains(const Eigen::Vector3d& p) const;
    Eigen::AlignedBox3d bounds() const;
};

/// Rotation for the scene file's Euler angles (degrees): x first, then y, then z,
/// about the fixed world axes.
Eigen::Matrix3d rotation_from_euler_deg(const Eigen::Vector3d& deg);

class Scene {
  public:
    /// Scene with no bodies.
    explicit Scene(const Material& ambient = builtin_material("air"));

    /// Parses the scene JSON document; rejects overlapping bodies. Throws InputError.
    static Scene from_json_text(std::string_view text);
    static Scene load_json(const std::filesystem::path& path);

    std::size_t add_material(const Material& material);
    void add_body(Body body);

    /// Index of the body containing `p`, or nullopt for the ambient medium.
    std::optional<std::size_t> locate(const Eigen::Vector3d& p) const;

    struct Boundary {
        double distance_m;
        bool leaves_world;
    };

    /// Distance along `dir` to the next surface: the exit of `body` when inside
    /// one, otherwise the nearest body entry ahead or the world boundary,
    /// whichever comes first.
    Boundary next_boundary(const Eigen::Vector3d& pos, const Eigen::Vector3d& dir,
                           std::optional<std::size_t> body) const;

    /// Rejection-samples `samples` points over the bodies' common bounding box
    /// and throws InputError if any lies inside two bodies.
    void check_overlap(std::size_t samples = 10'000, std::uint64_t seed = 0x5CE7E) const;

    const Material& material_of(std::optional<std::size_t> body) const {
        return materials_[body ? bodies_[*body].material : ambient_];
    }
    const Material& ambient() const { return materials_[ambient_]; }
    const std::vector<Body>& bodies() const { return bodies_; }
    const std::vector<Material>& materials() const { return materials_; }

    /// Tracking stops when a photon leaves this box. Starts empty and grows
    /// with every added body.
    const Eigen::AlignedBox3d& world() const { return world_; }
    void set_world(const Eigen::AlignedBox3d& world) { world_ = world; }
    /// Grows the world to cover all bodies and `extra`, plus `margin_m` on every side.
    void fit_world(const Eigen::AlignedBox3d& extra, double margin_m = 0.01);

    /// FNV-1a 64 of the canonical scene description, hex encoded.
    const std::string& digest() const { return digest_; }

    /// Lowest and highest energies every non-vacuum material can transport.
    double min_energy_keV() const;
    double max_energy_keV() const;

  private:
    std::vector<Material> materials_;
    std::size_t ambient_ = 0;
    std::vector<Body> bodies_;
    Eigen::AlignedBox3d world_;
    std::string digest_ = "0000000000000000";
};

std::string fnv1a64_hex(std::string_view text);

}  // namespace radfield
