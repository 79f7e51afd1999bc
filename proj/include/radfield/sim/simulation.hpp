// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "radfield/field/field.hpp"
#include "radfield/transport/scene.hpp"
#include "radfield/transport/source.hpp"
#include "radfield/transport/spectrum.hpp"

namespace radfield {

inline constexpr const char* k_physics_model_id = "photon-pe-compton-kn/1";

/// One simulation run as described by the JSON config file.
///
///   {"scene": "scene.json", "spectrum": "spectrum.csv",
///    "source": {"position_m": [x,y,z], "direction": [x,y,z],
///               "shape": {"type": "cone", "opening_angle_deg": 10}},
///    "grid": {"extent_m": [1,1,1], "voxel_m": [0.02,0.02,0.02], "origin_m": [-0.5,-0.5,-0.5]},
///    "binning": {"bin_count": 32, "bin_width_keV": 4.68},
///    "epsilon_threshold": 0.05, "max_photons": 1000000, "seed": 42,
///    "workers": 4, "output": "field.rf3d", "timestamp_utc": "2026-01-01T00:00:00Z"}
///
/// Relative paths resolve against the config file's directory. A grid without
/// origin is centred on the world origin; binning, workers and timestamp are optional.
struct RunConfig {
    std::filesystem::path scene_path;
    std::filesystem::path spectrum_path;
    SourceConfig source;
    GridSpec grid;
    EnergyBinning binning;
    double epsilon_threshold = 0.05;
    std::uint64_t max_photons = 1'000'000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::filesystem::path output_path;
    std::optional<std::string> timestamp_utc;

    /// Throws InputError.
    static RunConfig from_json_text(std::string_view text, const std::filesystem::path& base_dir = {});
    /// Throws IoError when unreadable, InputError when invalid.
    static RunConfig load(const std::filesystem::path& path);

    /// epsilon_threshold in (0, 1), max_photons >= one global evaluation,
    /// workers >= 1, valid source, grid and binning. Throws InputError.
    void validate() const;
};

/// Explicit timestamp, else SOURCE_DATE_EPOCH, else the Unix epoch, so that
/// repeated runs produce identical files unless a time is requested.
std::string resolve_timestamp(const std::optional<std::string>& configured);

struct RunResult {
    RadiationField field;
    std::uint64_t primaries = 0;
    double field_epsilon = 1.0;
    bool converged = false;
    std::uint64_t capped_tracks = 0;
};

/// Progress hook called after every global evaluation with (primaries, field epsilon).
using ProgressFn = std::function<void(std::uint64_t, double)>;

/// Runs transport and scoring until the field converges or the photon budget
/// is spent. Photon i always draws from the random stream (seed, i) and
/// photons are scored in index order, so the result does not depend on the
/// worker count. Throws InputError when the spectrum exceeds the scene's
/// attenuation tables or the grid and source cannot be enclosed.
RunResult run_simulation(const RunConfig& config, Scene scene, const Spectrum& spectrum,
                         const ProgressFn& progress = {});

/// Loads scene and spectrum named by the config, then runs.
RunResult run_simulation(const RunConfig& config, const ProgressFn& progress = {});

}  // namespace radfield
