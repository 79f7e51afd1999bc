// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "radfield/field/error.hpp"
#include "radfield/field/grid.hpp"

namespace radfield {

/// Per-voxel element layout of a layer. The numeric values are the on-disk tags.
enum class ElementKind : std::uint8_t {
    ScalarF32 = 0,
    ScalarF64 = 1,
    VectorF32 = 2,
    HistogramF32 = 3,
};

const char* to_string(ElementKind kind);

/// One named per-voxel quantity. `data` holds voxel_count * arity elements in
/// the grid's flat voxel order; f64 storage is used only by ScalarF64.
struct Layer {
    std::string name;
    std::string unit;
    double statistical_error = 0.0;
    ElementKind kind = ElementKind::ScalarF32;
    std::uint32_t arity = 1;
    std::variant<std::vector<float>, std::vector<double>> data;

    static Layer scalar_f32(std::string name, std::string unit, std::vector<float> values);
    static Layer scalar_f64(std::string name, std::string unit, std::vector<double> values);
    static Layer vector_f32(std::string name, std::string unit, std::uint32_t n, std::vector<float> values);
    static Layer histogram_f32(std::string name, std::string unit, std::uint32_t bins,
                               std::vector<float> values);

    std::size_t element_count() const;
    std::size_t element_size() const { return kind == ElementKind::ScalarF64 ? 8 : 4; }
    std::uint64_t byte_length() const { return element_count() * element_size(); }

    /// Raw little-endian view of the data (host order is asserted little-endian).
    std::span<const std::byte> bytes() const;

    template <typename T>
    std::span<const T> values() const {
        return std::span<const T>(std::get<std::vector<T>>(data));
    }
    template <typename T>
    std::span<T> values() {
        return std::span<T>(std::get<std::vector<T>>(data));
    }

    /// Bitwise equality on data, exact equality on the rest.
    bool operator==(const Layer& other) const;
};

struct Channel {
    std::string name;
    std::vector<Layer> layers;

    const Layer* find(std::string_view layer) const;
    Layer* find(std::string_view layer);
    /// Throws FieldError(NotFound) listing available layer names.
    const Layer& at(std::string_view layer) const;

    bool operator==(const Channel& other) const = default;
};

struct ConeShape {
    double opening_angle_deg = 10.0;
    bool operator==(const ConeShape&) const = default;
};

struct PyramidShape {
    double rect_w_m = 1.0;
    double rect_h_m = 1.0;
    double at_distance_m = 1.0;
    bool operator==(const PyramidShape&) const = default;
};

using FieldShape = std::variant<ConeShape, PyramidShape>;

/// Values admitted in the dynamic metadata block. Index order is the on-disk tag.
using DynamicValue = std::variant<std::int64_t, double, std::string, Eigen::Vector3d>;

/// Mandatory simulation record written with every field.
struct FixedMetadata {
    std::string software_name = "radfield";
    std::string software_version = "1.0.0";
    std::string physics_model_id;
    std::string scene_digest;
    Eigen::Vector3d tube_position_m = Eigen::Vector3d::Zero();
    Eigen::Vector3d tube_direction = Eigen::Vector3d::UnitX();
    FieldShape field_shape = ConeShape{};
    std::string spectrum_id;
    std::uint64_t primary_count = 0;
    std::uint64_t rng_seed = 0;
    double epsilon_rel_achieved = 1.0;
    std::string timestamp_utc;

    bool operator==(const FixedMetadata&) const = default;
};

struct FieldMetadata {
    FixedMetadata fixed;
    std::vector<std::pair<std::string, DynamicValue>> dynamic;

    /// Inserts or replaces, keeping first-insertion order.
    void set(std::string key, DynamicValue value);
    const DynamicValue* get(std::string_view key) const;

    bool operator==(const FieldMetadata&) const = default;
};

struct RadiationField {
    GridSpec grid;
    EnergyBinning binning;
    FieldMetadata metadata;
    std::vector<Channel> channels;

    const Channel* find(std::string_view channel) const;
    Channel* find(std::string_view channel);
    /// Throws FieldError(NotFound) listing available channel names.
    const Channel& at(std::string_view channel) const;
    Channel& add_channel(std::string name);

    /// Checks every type invariant; throws FieldError(InvalidField) naming the
    /// offending channel or layer.
    void validate() const;

    bool operator==(const RadiationField&) const = default;
};

/// Checks one layer against the grid and binning it belongs to; throws
/// FieldError(InvalidField).
void validate_layer(const Layer& layer, const std::string& channel, const GridSpec& grid,
                    const EnergyBinning& binning);

/// Throws FieldError(InvalidField).
void validate_metadata(const FieldMetadata& metadata);

/// Flat element offset of voxel (ix, iy, iz) in a layer of the given arity.
/// Throws FieldError(OutOfRange).
std::uint64_t voxel_offset(const GridSpec& grid, std::uint32_t arity, std::uint32_t ix,
                           std::uint32_t iy, std::uint32_t iz);

/// Elements of one voxel.
template <typename T>
std::span<const T> voxel_at(const Layer& layer, const GridSpec& grid, std::uint32_t ix,
                            std::uint32_t iy, std::uint32_t iz) {
    const auto* values = std::get_if<std::vector<T>>(&layer.data);
    if (values == nullptr) {
        throw FieldError(FieldErrc::InvalidField,
                         "layer '" + layer.name + "' does not hold the requested element type");
    }
    const std::uint64_t off = voxel_offset(grid, layer.arity, ix, iy, iz);
    return std::span<const T>(*values).subspan(off, layer.arity);
}

}  // namespace radfield
