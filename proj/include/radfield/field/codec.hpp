// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "radfield/field/field.hpp"

namespace radfield {

inline constexpr char k_field_magic[8] = {'R', 'F', '3', 'D', 'F', 'L', 'D', '\0'};
inline constexpr std::uint16_t k_field_version = 1;

/// Random-access byte input. Reads past the end throw FieldError(Truncated).
class ByteSource {
  public:
    virtual ~ByteSource() = default;
    virtual std::uint64_t size() const = 0;
    virtual void read(std::uint64_t offset, std::span<std::byte> out) = 0;
};

class MemorySource final : public ByteSource {
  public:
    explicit MemorySource(std::span<const std::byte> bytes) : bytes_(bytes) {}
    std::uint64_t size() const override { return bytes_.size(); }
    void read(std::uint64_t offset, std::span<std::byte> out) override;

  private:
    std::span<const std::byte> bytes_;
};

/// Seekable std::istream; the stream must outlive the source.
class StreamSource final : public ByteSource {
  public:
    explicit StreamSource(std::istream& in);
    std::uint64_t size() const override { return size_; }
    void read(std::uint64_t offset, std::span<std::byte> out) override;

  private:
    std::istream& in_;
    std::uint64_t size_ = 0;
};

/// Where one layer's data block lives in the file.
struct LayerEntry {
    std::string channel;
    std::string name;
    std::string unit;
    double statistical_error = 0.0;
    ElementKind kind = ElementKind::ScalarF32;
    std::uint32_t arity = 1;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    std::uint32_t crc32 = 0;
};

/// Everything before the data blocks: grid, binning, metadata and the table
/// of contents.
struct FieldIndex {
    GridSpec grid;
    EnergyBinning binning;
    FieldMetadata metadata;
    std::vector<std::pair<std::string, std::vector<LayerEntry>>> channels;
    std::uint64_t header_length = 0;

    /// Throws FieldError(NotFound) listing available names.
    const LayerEntry& entry(std::string_view channel, std::string_view layer) const;
};

/// Serializes `field` in the version-1 layout. Validates the field first and
/// writes nothing when it is invalid.
std::vector<std::byte> encode_field(const RadiationField& field);

/// Writes the encoded field and returns the byte count.
std::uint64_t write_field(const RadiationField& field, std::ostream& sink);
std::uint64_t write_field_file(const RadiationField& field, const std::filesystem::path& path);

/// Parses header and table of contents only; no data block is read.
FieldIndex read_index(ByteSource& source);

RadiationField read_field(ByteSource& source);
RadiationField read_field(std::span<const std::byte> bytes);
RadiationField read_field(std::istream& source);
RadiationField read_field_file(const std::filesystem::path& path);

/// Loads a single layer, touching only the header and that layer's block.
Layer read_layer(ByteSource& source, std::string_view channel, std::string_view layer);
Layer read_layer(const FieldIndex& index, ByteSource& source, std::string_view channel,
                 std::string_view layer);

/// CRC-32 (ISO-HDLC polynomial, as in zlib and PNG).
std::uint32_t crc32(std::span<const std::byte> bytes);

}  // namespace radfield
