// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace radfield {

enum class FieldErrc {
    InvalidField,
    BadMagic,
    UnsupportedVersion,
    Truncated,
    ChecksumMismatch,
    Malformed,
    NotFound,
    OutOfRange,
    Io,
};

const char* to_string(FieldErrc code);

/// Every failure raised by the field model and codec.
class FieldError : public std::runtime_error {
  public:
    FieldError(FieldErrc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    FieldErrc code() const noexcept { return code_; }

  private:
    FieldErrc code_;
};

}  // namespace radfield
