// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace radfield::detail {

std::string_view trim(std::string_view s);

/// Parses a whole field as a double; throws InputError mentioning `where`.
double parse_number(std::string_view s, const std::string& where);

/// Rows of a two-column numeric CSV whose first non-comment line must be the
/// header `a,b`. Blank lines and lines starting with '#' are skipped.
/// `what` names the file kind in error messages.
std::vector<std::pair<double, double>> read_two_column_csv(std::istream& in, std::string_view a,
                                                           std::string_view b, const std::string& what);

}  // namespace radfield::detail
