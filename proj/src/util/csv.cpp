// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "util/csv.hpp"

#include <cctype>
#include <charconv>

#include "radfield/errors.hpp"

namespace radfield::detail {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s, const std::string& where) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InputError(where + ": '" + std::string(s) + "' is not a number");
    }
    return v;
}

std::vector<std::pair<double, double>> read_two_column_csv(std::istream& in, std::string_view a,
                                                           std::string_view b, const std::string& what) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty() || row.front() == '#') {
            continue;
        }
        const auto comma = row.find(',');
        const std::string where = what + " line " + std::to_string(line_no);
        if (!header_seen) {
            header_seen = true;
            if (comma == std::string_view::npos || trim(row.substr(0, comma)) != a ||
                trim(row.substr(comma + 1)) != b) {
                throw InputError(where + ": expected header '" + std::string(a) + "," + std::string(b) + "'");
            }
            continue;
        }
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            throw InputError(where + ": expected two columns");
        }
        rows.emplace_back(parse_number(row.substr(0, comma), where), parse_number(row.substr(comma + 1), where));
    }
    if (!header_seen) {
        throw InputError(what + " is empty");
    }
    return rows;
}

}  // namespace radfield::detail
