// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "radfield/field/codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include <zlib.h>

namespace radfield {
namespace {

// Minimum encoded sizes, used to bound counts read from untrusted input.
constexpr std::uint64_t k_min_dynamic_entry = 2 + 1 + 2;
constexpr std::uint64_t k_min_channel_entry = 2 + 4;
constexpr std::uint64_t k_min_layer_entry = 2 + 2 + 8 + 1 + 4 + 8 + 8 + 4;

enum class DynamicTag : std::uint8_t { Int64 = 0, Float64 = 1, String = 2, Vector3 = 3 };
enum class ShapeTag : std::uint8_t { Cone = 0, Pyramid = 1 };

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= s.size()) {
            return false;
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) {
                return false;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        constexpr std::uint32_t min_cp[] = {0, 0x80, 0x800, 0x10000};
        if (cp < min_cp[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += extra + 1;
    }
    return true;
}

class ByteWriter {
  public:
    void u8(std::uint8_t v) { buf_.push_back(std::byte{v}); }
    void u16(std::uint16_t v) { raw(v); }
    void u32(std::uint32_t v) { raw(v); }
    void u64(std::uint64_t v) { raw(v); }
    void i64(std::int64_t v) { raw(v); }
    void f64(double v) { raw(v); }
    void vec3(const Eigen::Vector3d& v) {
        for (int a = 0; a < 3; ++a) {
            f64(v[a]);
        }
    }
    void str(std::string_view s) {
        if (s.size() > std::numeric_limits<std::uint16_t>::max() || !valid_utf8(s)) {
            throw FieldError(FieldErrc::InvalidField,
                             "string '" + std::string(s.substr(0, 32)) + "' is not encodable");
        }
        u16(static_cast<std::uint16_t>(s.size()));
        bytes(std::as_bytes(std::span(s.data(), s.size())));
    }
    void bytes(std::span<const std::byte> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    // Overwrites a previously written u64 at `at`.
    void patch_u64(std::size_t at, std::uint64_t v) { std::memcpy(buf_.data() + at, &v, 8); }

    std::size_t size() const { return buf_.size(); }
    std::vector<std::byte>& buffer() { return buf_; }

  private:
    template <typename T>
    void raw(T v) {
        const auto b = std::bit_cast<std::array<std::byte, sizeof(T)>>(v);
        buf_.insert(buf_.end(), b.begin(), b.end());
    }

    std::vector<std::byte> buf_;
};

/// Sequential reader over a ByteSource with bounds-checked primitive reads.
class Cursor {
  public:
    explicit Cursor(ByteSource& src) : src_(src) {}

    std::uint64_t position() const { return pos_; }
    std::uint64_t remaining() const { return src_.size() - std::min(pos_, src_.size()); }

    void read(std::span<std::byte> out, const char* what) {
        if (out.size() > remaining()) {
            throw FieldError(FieldErrc::Truncated, std::string("stream ends inside ") + what);
        }
        src_.read(pos_, out);
        pos_ += out.size();
    }

    template <typename T>
    T get(const char* what) {
        std::array<std::byte, sizeof(T)> b;
        read(b, what);
        return std::bit_cast<T>(b);
    }

    std::uint8_t u8(const char* what) { return get<std::uint8_t>(what); }
    std::uint16_t u16(const char* what) { return get<std::uint16_t>(what); }
    std::uint32_t u32(const char* what) { return get<std::uint32_t>(what); }
    std::uint64_t u64(const char* what) { return get<std::uint64_t>(what); }
    double f64(const char* what) { return get<double>(what); }

    Eigen::Vector3d vec3(const char* what) {
        Eigen::Vector3d v;
        for (int a = 0; a < 3; ++a) {
            v[a] = f64(what);
        }
        return v;
    }

    std::string str(const char* what) {
        const std::uint16_t n = u16(what);
        std::string s(n, '\0');
        read(std::as_writable_bytes(std::span(s.data(), s.size())), what);
        if (!valid_utf8(s)) {
            throw FieldError(FieldErrc::Malformed, std::string("invalid UTF-8 in ") + what);
        }
        return s;
    }

    /// Reads a count and rejects values that could not fit in the rest of the stream.
    std::uint32_t count(const char* what, std::uint64_t min_entry_size) {
        const std::uint32_t n = u32(what);
        if (n > remaining() / min_entry_size) {
            throw FieldError(FieldErrc::Malformed, std::string("implausible ") + what + " " +
                                                       std::to_string(n));
        }
        return n;
    }

  private:
    ByteSource& src_;
    std::uint64_t pos_ = 0;
};

void write_header(ByteWriter& w, const RadiationField& field) {
    w.bytes(std::as_bytes(std::span(k_field_magic)));
    w.u16(k_field_version);

    const GridSpec& g = field.grid;
    w.vec3(g.extent_m);
    w.vec3(g.voxel_m);
    for (int a = 0; a < 3; ++a) {
        w.u32(g.counts[a]);
    }
    w.vec3(g.origin_m);

    w.u32(field.binning.bin_count);
    w.f64(field.binning.bin_width_keV);

    const FixedMetadata& f = field.metadata.fixed;
    w.str(f.software_name);
    w.str(f.software_version);
    w.str(f.physics_model_id);
    w.str(f.scene_digest);
    w.vec3(f.tube_position_m);
    w.vec3(f.tube_direction);
    if (const auto* cone = std::get_if<ConeShape>(&f.field_shape)) {
        w.u8(static_cast<std::uint8_t>(ShapeTag::Cone));
        w.f64(cone->opening_angle_deg);
    } else {
        const auto& p = std::get<PyramidShape>(f.field_shape);
        w.u8(static_cast<std::uint8_t>(ShapeTag::Pyramid));
        w.f64(p.rect_w_m);
        w.f64(p.rect_h_m);
        w.f64(p.at_distance_m);
    }
    w.str(f.spectrum_id);
    w.u64(f.primary_count);
    w.u64(f.rng_seed);
    w.f64(f.epsilon_rel_achieved);
    w.str(f.timestamp_utc);

    w.u32(static_cast<std::uint32_t>(field.metadata.dynamic.size()));
    for (const auto& [key, value] : field.metadata.dynamic) {
        w.str(key);
        w.u8(static_cast<std::uint8_t>(value.index()));
        std::visit(
            [&w](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::int64_t>) {
                    w.i64(v);
                } else if constexpr (std::is_same_v<T, double>) {
                    w.f64(v);
                } else if constexpr (std::is_same_v<T, std::string>) {
                    w.str(v);
                } else {
                    w.vec3(v);
                }
            },
            value);
    }
}

void read_header(Cursor& in, FieldIndex& index) {
    std::array<std::byte, 8> magic;
    in.read(magic, "magic");
    if (std::memcmp(magic.data(), k_field_magic, 8) != 0) {
        throw FieldError(FieldErrc::BadMagic, "not a radiation field file");
    }
    const std::uint16_t version = in.u16("version");
    if (version != k_field_version) {
        throw FieldError(FieldErrc::UnsupportedVersion, "version " + std::to_string(version));
    }

    GridSpec& g = index.grid;
    g.extent_m = in.vec3("grid");
    g.voxel_m = in.vec3("grid");
    for (int a = 0; a < 3; ++a) {
        g.counts[a] = in.u32("grid");
    }
    g.origin_m = in.vec3("grid");
    index.binning.bin_count = in.u32("binning");
    index.binning.bin_width_keV = in.f64("binning");

    FixedMetadata& f = index.metadata.fixed;
    f.software_name = in.str("fixed metadata");
    f.software_version = in.str("fixed metadata");
    f.physics_model_id = in.str("fixed metadata");
    f.scene_digest = in.str("fixed metadata");
    f.tube_position_m = in.vec3("fixed metadata");
    f.tube_direction = in.vec3("fixed metadata");
    switch (static_cast<ShapeTag>(in.u8("fixed metadata"))) {
        case ShapeTag::Cone:
            f.field_shape = ConeShape{in.f64("fixed metadata")};
            break;
        case ShapeTag::Pyramid: {
            PyramidShape p;
            p.rect_w_m = in.f64("fixed metadata");
            p.rect_h_m = in.f64("fixed metadata");
            p.at_distance_m = in.f64("fixed metadata");
            f.field_shape = p;
            break;
        }
        default:
            throw FieldError(FieldErrc::Malformed, "unknown field shape tag");
    }
    f.spectrum_id = in.str("fixed metadata");
    f.primary_count = in.u64("fixed metadata");
    f.rng_seed = in.u64("fixed metadata");
    f.epsilon_rel_achieved = in.f64("fixed metadata");
    f.timestamp_utc = in.str("fixed metadata");

    const std::uint32_t n_dynamic = in.count("dynamic metadata count", k_min_dynamic_entry);
    std::set<std::string> keys;
    for (std::uint32_t i = 0; i < n_dynamic; ++i) {
        std::string key = in.str("dynamic metadata");
        if (!keys.insert(key).second) {
            throw FieldError(FieldErrc::Malformed, "duplicate dynamic metadata key '" + key + "'");
        }
        DynamicValue value;
        switch (static_cast<DynamicTag>(in.u8("dynamic metadata"))) {
            case DynamicTag::Int64: value = in.get<std::int64_t>("dynamic metadata"); break;
            case DynamicTag::Float64: value = in.f64("dynamic metadata"); break;
            case DynamicTag::String: value = in.str("dynamic metadata"); break;
            case DynamicTag::Vector3: value = in.vec3("dynamic metadata"); break;
            default: throw FieldError(FieldErrc::Malformed, "unknown dynamic value tag for '" + key + "'");
        }
        index.metadata.dynamic.emplace_back(std::move(key), std::move(value));
    }

    try {
        g.validate();
        index.binning.validate();
        validate_metadata(index.metadata);
    } catch (const FieldError& e) {
        throw FieldError(FieldErrc::Malformed, e.what());
    }
}

std::uint64_t expected_length(const FieldIndex& index, const LayerEntry& e) {
    // voxel_count is capped by GridSpec::validate, so only the arity factor can overflow.
    const std::uint64_t per_element = index.grid.voxel_count() * (e.kind == ElementKind::ScalarF64 ? 8 : 4);
    if (e.arity > std::numeric_limits<std::uint64_t>::max() / per_element) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return per_element * e.arity;
}

void read_toc(Cursor& in, FieldIndex& index, std::uint64_t source_size) {
    const std::uint32_t n_channels = in.count("channel count", k_min_channel_entry);
    std::set<std::string> channel_names;
    for (std::uint32_t c = 0; c < n_channels; ++c) {
        std::string channel = in.str("table of contents");
        if (!channel_names.insert(channel).second) {
            throw FieldError(FieldErrc::Malformed, "duplicate channel name '" + channel + "'");
        }
        const std::uint32_t n_layers = in.count("layer count", k_min_layer_entry);
        std::vector<LayerEntry> layers;
        std::set<std::string> layer_names;
        for (std::uint32_t l = 0; l < n_layers; ++l) {
            LayerEntry e;
            e.channel = channel;
            e.name = in.str("table of contents");
            e.unit = in.str("table of contents");
            e.statistical_error = in.f64("table of contents");
            const std::uint8_t tag = in.u8("table of contents");
            e.arity = in.u32("table of contents");
            e.offset = in.u64("table of contents");
            e.length = in.u64("table of contents");
            e.crc32 = in.u32("table of contents");

            const std::string where = "layer '" + channel + "/" + e.name + "'";
            if (!layer_names.insert(e.name).second) {
                throw FieldError(FieldErrc::Malformed, "duplicate " + where);
            }
            if (tag > static_cast<std::uint8_t>(ElementKind::HistogramF32)) {
                throw FieldError(FieldErrc::Malformed, where + ": unknown element kind");
            }
            e.kind = static_cast<ElementKind>(tag);
            const bool arity_ok =
                (e.kind == ElementKind::ScalarF32 || e.kind == ElementKind::ScalarF64) ? e.arity == 1
                : e.kind == ElementKind::VectorF32 ? e.arity >= 1
                                                   : e.arity == index.binning.bin_count;
            if (!arity_ok) {
                throw FieldError(FieldErrc::Malformed, where + ": arity inconsistent with element kind");
            }
            if (!(e.statistical_error >= 0.0 && e.statistical_error <= 1.0)) {
                throw FieldError(FieldErrc::Malformed, where + ": statistical error outside [0, 1]");
            }
            if (e.length != expected_length(index, e)) {
                throw FieldError(FieldErrc::Malformed,
                                 where + ": declared length inconsistent with grid");
            }
            layers.push_back(std::move(e));
        }
        index.channels.emplace_back(std::move(channel), std::move(layers));
    }
    index.header_length = in.position();
    for (const auto& [channel, layers] : index.channels) {
        for (const LayerEntry& e : layers) {
            if (e.offset < index.header_length) {
                throw FieldError(FieldErrc::Malformed,
                                 "layer '" + channel + "/" + e.name + "' overlaps the header");
            }
            if (e.offset > source_size || e.length > source_size - e.offset) {
                throw FieldError(FieldErrc::Truncated,
                                 "stream ends inside layer '" + channel + "/" + e.name + "'");
            }
        }
    }
}

Layer load_layer(const FieldIndex& index, const LayerEntry& e, ByteSource& src) {
    Layer layer;
    layer.name = e.name;
    layer.unit = e.unit;
    layer.statistical_error = e.statistical_error;
    layer.kind = e.kind;
    layer.arity = e.arity;
    const std::string where = "layer '" + e.channel + "/" + e.name + "'";
    if (e.offset > src.size() || e.length > src.size() - e.offset) {
        throw FieldError(FieldErrc::Truncated, "stream ends inside " + where);
    }
    auto fill = [&](auto& values) {
        values.resize(e.length / sizeof(values[0]));
        const auto out = std::as_writable_bytes(std::span(values));
        src.read(e.offset, out);
        if (crc32(out) != e.crc32) {
            throw FieldError(FieldErrc::ChecksumMismatch, where);
        }
    };
    if (e.kind == ElementKind::ScalarF64) {
        std::vector<double> values;
        fill(values);
        layer.data = std::move(values);
    } else {
        std::vector<float> values;
        fill(values);
        layer.data = std::move(values);
    }
    try {
        validate_layer(layer, e.channel, index.grid, index.binning);
    } catch (const FieldError& err) {
        throw FieldError(FieldErrc::Malformed, err.what());
    }
    return layer;
}

}  // namespace

void MemorySource::read(std::uint64_t offset, std::span<std::byte> out) {
    if (offset > bytes_.size() || out.size() > bytes_.size() - offset) {
        throw FieldError(FieldErrc::Truncated, "read past end of buffer");
    }
    std::memcpy(out.data(), bytes_.data() + offset, out.size());
}

StreamSource::StreamSource(std::istream& in) : in_(in) {
    in_.clear();
    in_.seekg(0, std::ios::end);
    const auto end = in_.tellg();
    if (!in_ || end < 0) {
        throw FieldError(FieldErrc::Io, "source stream is not seekable");
    }
    size_ = static_cast<std::uint64_t>(end);
}

void StreamSource::read(std::uint64_t offset, std::span<std::byte> out) {
    if (offset > size_ || out.size() > size_ - offset) {
        throw FieldError(FieldErrc::Truncated, "read past end of stream");
    }
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!in_) {
        throw FieldError(FieldErrc::Io, "stream read failed");
    }
}

const LayerEntry& FieldIndex::entry(std::string_view channel, std::string_view layer) const {
    std::string available;
    for (const auto& [name, layers] : channels) {
        if (name == channel) {
            for (const LayerEntry& e : layers) {
                if (e.name == layer) {
                    return e;
                }
                available += (available.empty() ? "" : ", ") + e.name;
            }
            throw FieldError(FieldErrc::NotFound, "no layer '" + std::string(layer) +
                                                      "' in channel '" + name + "'; available: [" +
                                                      available + "]");
        }
        available += (available.empty() ? "" : ", ") + name;
    }
    throw FieldError(FieldErrc::NotFound,
                     "no channel '" + std::string(channel) + "'; available: [" + available + "]");
}

std::uint32_t crc32(std::span<const std::byte> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
    std::size_t left = bytes.size();
    while (left > 0) {
        const auto n = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
        crc = ::crc32(crc, p, n);
        p += n;
        left -= n;
    }
    return static_cast<std::uint32_t>(crc);
}

std::vector<std::byte> encode_field(const RadiationField& field) {
    field.validate();

    ByteWriter w;
    write_header(w, field);

    // Table of contents with placeholder offsets, patched once the header size is known.
    std::vector<std::size_t> offset_slots;
    w.u32(static_cast<std::uint32_t>(field.channels.size()));
    for (const Channel& channel : field.channels) {
        w.str(channel.name);
        w.u32(static_cast<std::uint32_t>(channel.layers.size()));
        for (const Layer& layer : channel.layers) {
            w.str(layer.name);
            w.str(layer.unit);
            w.f64(layer.statistical_error);
            w.u8(static_cast<std::uint8_t>(layer.kind));
            w.u32(layer.arity);
            offset_slots.push_back(w.size());
            w.u64(0);
            w.u64(layer.byte_length());
            w.u32(crc32(layer.bytes()));
        }
    }

    std::size_t slot = 0;
    for (const Channel& channel : field.channels) {
        for (const Layer& layer : channel.layers) {
            w.patch_u64(offset_slots[slot++], w.size());
            w.bytes(layer.bytes());
        }
    }
    return std::move(w.buffer());
}

std::uint64_t write_field(const RadiationField& field, std::ostream& sink) {
    const std::vector<std::byte> bytes = encode_field(field);
    sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!sink) {
        throw FieldError(FieldErrc::Io, "sink write failed");
    }
    return bytes.size();
}

std::uint64_t write_field_file(const RadiationField& field, const std::filesystem::path& path) {
    const std::vector<std::byte> bytes = encode_field(field);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FieldError(FieldErrc::Io, "cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
        throw FieldError(FieldErrc::Io, "write to '" + path.string() + "' failed");
    }
    return bytes.size();
}

FieldIndex read_index(ByteSource& source) {
    Cursor in(source);
    FieldIndex index;
    read_header(in, index);
    read_toc(in, index, source.size());
    return index;
}

RadiationField read_field(ByteSource& source) {
    FieldIndex index = read_index(source);
    RadiationField field;
    field.grid = index.grid;
    field.binning = index.binning;
    field.metadata = std::move(index.metadata);
    for (const auto& [name, entries] : index.channels) {
        Channel& channel = field.add_channel(name);
        for (const LayerEntry& e : entries) {
            channel.layers.push_back(load_layer(index, e, source));
        }
    }
    return field;
}

RadiationField read_field(std::span<const std::byte> bytes) {
    MemorySource src(bytes);
    return read_field(src);
}

RadiationField read_field(std::istream& source) {
    StreamSource src(source);
    return read_field(src);
}

RadiationField read_field_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FieldError(FieldErrc::Io, "cannot open '" + path.string() + "'");
    }
    return read_field(in);
}

Layer read_layer(const FieldIndex& index, ByteSource& source, std::string_view channel,
                 std::string_view layer) {
    return load_layer(index, index.entry(channel, layer), source);
}

Layer read_layer(ByteSource& source, std::string_view channel, std::string_view layer) {
    const FieldIndex index = read_index(source);
    return read_layer(index, source, channel, layer);
}

}  // namespace radfield
