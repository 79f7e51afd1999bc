// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace radfield::cli {

/// Process exit codes.
enum Exit : int {
    k_ok = 0,
    k_input = 2,   // bad arguments, config, field file or scan bounds
    k_budget = 3,  // photon budget spent before convergence; the field is still written
    k_io = 4,      // a file could not be read or written
};

/// Runs the command line `args` (without the program name). Failures print
/// one line "radfield: error[E_...]: message" to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radfield::cli
