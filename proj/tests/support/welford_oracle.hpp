// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>

namespace oracle {

/// Mean and population variance by two passes in extended precision.
inline std::pair<double, double> two_pass(std::span<const double> xs) {
    long double sum = 0.0L;
    for (double x : xs) {
        sum += x;
    }
    const long double mean = sum / static_cast<long double>(xs.size());
    long double sq = 0.0L;
    for (double x : xs) {
        sq += (x - mean) * (x - mean);
    }
    return {static_cast<double>(mean), static_cast<double>(sq / static_cast<long double>(xs.size()))};
}

}  // namespace oracle
