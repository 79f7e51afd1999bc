// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "radfield/field/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <stdexcept>

namespace radfield {

static_assert(std::endian::native == std::endian::little,
              "the field codec maps data blocks directly and needs a little-endian host");

namespace {

constexpr std::size_t k_max_string = std::numeric_limits<std::uint16_t>::max();

// Voxel count above which a grid is rejected outright (about 1.1e12).
constexpr double k_max_voxels = 1099511627776.0;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw FieldError(FieldErrc::InvalidField, what);
    }
}

void check_string(const std::string& s, const std::string& what) {
    require(s.size() <= k_max_string, what + " exceeds 65535 bytes");
}

std::string join_names(const auto& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) {
            out += ", ";
        }
        out += item.name;
    }
    return "[" + out + "]";
}

}  // namespace

const char* to_string(FieldErrc code) {
    switch (code) {
        case FieldErrc::InvalidField: return "invalid-field";
        case FieldErrc::BadMagic: return "bad-magic";
        case FieldErrc::UnsupportedVersion: return "unsupported-version";
        case FieldErrc::Truncated: return "truncated";
        case FieldErrc::ChecksumMismatch: return "checksum-mismatch";
        case FieldErrc::Malformed: return "malformed";
        case FieldErrc::NotFound: return "not-found";
        case FieldErrc::OutOfRange: return "out-of-range";
        case FieldErrc::Io: return "io";
    }
    return "unknown";
}

const char* to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::ScalarF32: return "scalar-f32";
        case ElementKind::ScalarF64: return "scalar-f64";
        case ElementKind::VectorF32: return "vector-f32";
        case ElementKind::HistogramF32: return "histogram-f32";
    }
    return "unknown";
}

GridSpec GridSpec::make(const Eigen::Vector3d& extent_m, const Eigen::Vector3d& voxel_m,
                        const Eigen::Vector3d& origin_m) {
    GridSpec g;
    g.extent_m = extent_m;
    g.voxel_m = voxel_m;
    g.origin_m = origin_m;
    for (int a = 0; a < 3; ++a) {
        if (!finite_positive(extent_m[a]) || !finite_positive(voxel_m[a])) {
            throw std::invalid_argument("grid extents and voxel sizes must be positive");
        }
        const double n = std::round(extent_m[a] / voxel_m[a]);
        if (n < 1.0 || n > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
            throw std::invalid_argument("grid voxel count per axis must be in [1, 2^32)");
        }
        g.counts[a] = static_cast<std::uint32_t>(n);
    }
    g.validate();
    return g;
}

GridSpec GridSpec::centered(const Eigen::Vector3d& extent_m, const Eigen::Vector3d& voxel_m,
                            const Eigen::Vector3d& center_m) {
    return make(extent_m, voxel_m, center_m - 0.5 * extent_m);
}

void GridSpec::validate() const {
    double volume = 1.0;
    for (int a = 0; a < 3; ++a) {
        require(finite_positive(extent_m[a]), "grid extent must be finite and positive");
        require(finite_positive(voxel_m[a]), "grid voxel size must be finite and positive");
        require(std::isfinite(origin_m[a]), "grid origin must be finite");
        require(counts[a] >= 1, "grid counts must be at least 1");
        require(static_cast<double>(counts[a]) == std::round(extent_m[a] / voxel_m[a]),
                "grid counts must equal round(extent / voxel)");
        volume *= counts[a];
    }
    require(volume <= k_max_voxels, "grid has too many voxels");
}

void EnergyBinning::validate() const {
    require(bin_count >= 1, "energy binning needs at least one bin");
    require(finite_positive(bin_width_keV), "energy bin width must be finite and positive");
}

Layer Layer::scalar_f32(std::string name, std::string unit, std::vector<float> values) {
    return Layer{std::move(name), std::move(unit), 0.0, ElementKind::ScalarF32, 1, std::move(values)};
}

Layer Layer::scalar_f64(std::string name, std::string unit, std::vector<double> values) {
    return Layer{std::move(name), std::move(unit), 0.0, ElementKind::ScalarF64, 1, std::move(values)};
}

Layer Layer::vector_f32(std::string name, std::string unit, std::uint32_t n, std::vector<float> values) {
    return Layer{std::move(name), std::move(unit), 0.0, ElementKind::VectorF32, n, std::move(values)};
}

Layer Layer::histogram_f32(std::string name, std::string unit, std::uint32_t bins,
                           std::vector<float> values) {
    return Layer{std::move(name), std::move(unit), 0.0, ElementKind::HistogramF32, bins,
                 std::move(values)};
}

std::size_t Layer::element_count() const {
    return std::visit([](const auto& v) { return v.size(); }, data);
}

std::span<const std::byte> Layer::bytes() const {
    return std::visit([](const auto& v) { return std::as_bytes(std::span(v)); }, data);
}

bool Layer::operator==(const Layer& other) const {
    if (name != other.name || unit != other.unit || kind != other.kind || arity != other.arity ||
        data.index() != other.data.index() ||
        std::bit_cast<std::uint64_t>(statistical_error) !=
            std::bit_cast<std::uint64_t>(other.statistical_error)) {
        return false;
    }
    const auto a = bytes();
    const auto b = other.bytes();
    return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size()) == 0);
}

const Layer* Channel::find(std::string_view layer) const {
    auto it = std::ranges::find(layers, layer, &Layer::name);
    return it == layers.end() ? nullptr : &*it;
}

Layer* Channel::find(std::string_view layer) {
    auto it = std::ranges::find(layers, layer, &Layer::name);
    return it == layers.end() ? nullptr : &*it;
}

const Layer& Channel::at(std::string_view layer) const {
    if (const Layer* l = find(layer)) {
        return *l;
    }
    throw FieldError(FieldErrc::NotFound, "no layer '" + std::string(layer) + "' in channel '" +
                                              name + "'; available: " + join_names(layers));
}

void FieldMetadata::set(std::string key, DynamicValue value) {
    for (auto& [k, v] : dynamic) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    dynamic.emplace_back(std::move(key), std::move(value));
}

const DynamicValue* FieldMetadata::get(std::string_view key) const {
    for (const auto& [k, v] : dynamic) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

const Channel* RadiationField::find(std::string_view channel) const {
    auto it = std::ranges::find(channels, channel, &Channel::name);
    return it == channels.end() ? nullptr : &*it;
}

Channel* RadiationField::find(std::string_view channel) {
    auto it = std::ranges::find(channels, channel, &Channel::name);
    return it == channels.end() ? nullptr : &*it;
}

const Channel& RadiationField::at(std::string_view channel) const {
    if (const Channel* c = find(channel)) {
        return *c;
    }
    throw FieldError(FieldErrc::NotFound,
                     "no channel '" + std::string(channel) + "'; available: " + join_names(channels));
}

Channel& RadiationField::add_channel(std::string name) {
    channels.push_back(Channel{std::move(name), {}});
    return channels.back();
}

void validate_metadata(const FieldMetadata& meta) {
    const FixedMetadata& f = meta.fixed;
    for (const auto* s : {&f.software_name, &f.software_version, &f.physics_model_id,
                          &f.scene_digest, &f.spectrum_id, &f.timestamp_utc}) {
        check_string(*s, "fixed metadata string");
    }
    require(f.tube_position_m.allFinite(), "tube position must be finite");
    require(f.tube_direction.allFinite() && std::abs(f.tube_direction.norm() - 1.0) < 1e-6,
            "tube direction must be a unit vector");
    require(std::isfinite(f.epsilon_rel_achieved) && f.epsilon_rel_achieved >= 0.0 &&
                f.epsilon_rel_achieved <= 1.0,
            "epsilon_rel_achieved must lie in [0, 1]");
    if (const auto* cone = std::get_if<ConeShape>(&f.field_shape)) {
        require(cone->opening_angle_deg > 0.0 && cone->opening_angle_deg < 180.0,
                "cone opening angle must lie in (0, 180)");
    } else {
        const auto& p = std::get<PyramidShape>(f.field_shape);
        require(finite_positive(p.rect_w_m) && finite_positive(p.rect_h_m) &&
                    finite_positive(p.at_distance_m),
                "pyramid rectangle and distance must be positive");
    }
    require(meta.dynamic.size() <= std::numeric_limits<std::uint32_t>::max(),
            "too many dynamic metadata entries");
    std::set<std::string_view> keys;
    for (const auto& [key, value] : meta.dynamic) {
        check_string(key, "dynamic metadata key");
        require(keys.insert(key).second, "duplicate dynamic metadata key '" + key + "'");
        if (const auto* s = std::get_if<std::string>(&value)) {
            check_string(*s, "dynamic metadata value '" + key + "'");
        }
    }
}

void validate_layer(const Layer& layer, const std::string& channel, const GridSpec& grid,
                    const EnergyBinning& binning) {
    const std::string where = "layer '" + channel + "/" + layer.name + "'";
    check_string(layer.name, where + " name");
    check_string(layer.unit, where + " unit");
    require(layer.statistical_error >= 0.0 && layer.statistical_error <= 1.0,
            where + ": statistical error must lie in [0, 1]");
    const bool f64 = std::holds_alternative<std::vector<double>>(layer.data);
    switch (layer.kind) {
        case ElementKind::ScalarF32:
            require(layer.arity == 1 && !f64, where + ": scalar-f32 needs arity 1 and f32 data");
            break;
        case ElementKind::ScalarF64:
            require(layer.arity == 1 && f64, where + ": scalar-f64 needs arity 1 and f64 data");
            break;
        case ElementKind::VectorF32:
            require(layer.arity >= 1 && !f64, where + ": vector-f32 needs arity >= 1 and f32 data");
            break;
        case ElementKind::HistogramF32:
            require(layer.arity == binning.bin_count && !f64,
                    where + ": histogram arity must equal the field's bin count");
            break;
        default:
            require(false, where + ": unknown element kind");
    }
    require(layer.element_count() == grid.voxel_count() * layer.arity,
            where + ": data length does not match grid volume times arity");
    if (layer.kind == ElementKind::HistogramF32) {
        const auto values = layer.values<float>();
        for (std::size_t v = 0; v < grid.voxel_count(); ++v) {
            double sum = 0.0;
            bool all_zero = true;
            for (const float x : values.subspan(v * layer.arity, layer.arity)) {
                sum += x;
                all_zero = all_zero && x == 0.0f;
            }
            require(all_zero || std::abs(sum - 1.0) <= 1e-6,
                    where + ": histogram of voxel " + std::to_string(v) +
                        " neither sums to 1 nor is all-zero");
        }
    }
}

void RadiationField::validate() const {
    try {
        grid.validate();
        binning.validate();
    } catch (const std::invalid_argument& e) {
        throw FieldError(FieldErrc::InvalidField, e.what());
    }
    validate_metadata(metadata);
    require(channels.size() <= std::numeric_limits<std::uint32_t>::max(), "too many channels");
    std::set<std::string_view> channel_names;
    for (const Channel& channel : channels) {
        check_string(channel.name, "channel name");
        require(channel_names.insert(channel.name).second,
                "duplicate channel name '" + channel.name + "'");
        std::set<std::string_view> layer_names;
        for (const Layer& layer : channel.layers) {
            require(layer_names.insert(layer.name).second,
                    "duplicate layer name '" + layer.name + "' in channel '" + channel.name + "'");
            validate_layer(layer, channel.name, grid, binning);
        }
    }
}

std::uint64_t voxel_offset(const GridSpec& grid, std::uint32_t arity, std::uint32_t ix,
                           std::uint32_t iy, std::uint32_t iz) {
    if (ix >= grid.counts.x() || iy >= grid.counts.y() || iz >= grid.counts.z()) {
        throw FieldError(FieldErrc::OutOfRange,
                         "voxel (" + std::to_string(ix) + ", " + std::to_string(iy) + ", " +
                             std::to_string(iz) + ") outside grid");
    }
    return grid.flat_index(ix, iy, iz) * arity;
}

}  // namespace radfield
