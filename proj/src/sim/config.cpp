// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "radfield/errors.hpp"
#include "radfield/scoring/scoring.hpp"
#include "radfield/sim/simulation.hpp"

namespace radfield {
namespace {

using nlohmann::json;

Eigen::Vector3d vec3(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 3) {
        throw InputError(std::string("config: '") + key + "' must be a 3-element array");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

FieldShape parse_shape(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "cone") {
        return ConeShape{j.at("opening_angle_deg").get<double>()};
    }
    if (type == "pyramid") {
        return PyramidShape{j.at("rect_w_m").get<double>(), j.at("rect_h_m").get<double>(),
                            j.at("at_distance_m").get<double>()};
    }
    throw InputError("config: source shape must be 'cone' or 'pyramid', got '" + type + "'");
}

}  // namespace

RunConfig RunConfig::from_json_text(std::string_view text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    RunConfig c;
    try {
        c.scene_path = resolve(base_dir, doc.at("scene").get<std::string>());
        c.spectrum_path = resolve(base_dir, doc.at("spectrum").get<std::string>());

        const json& src = doc.at("source");
        c.source.position_m = vec3(src, "position_m");
        const Eigen::Vector3d dir = vec3(src, "direction");
        if (!(dir.norm() > 0.0) || !dir.allFinite()) {
            throw InputError("config: source direction must be a non-zero vector");
        }
        c.source.direction = dir.normalized();
        c.source.shape = parse_shape(src.at("shape"));

        const json& g = doc.at("grid");
        const Eigen::Vector3d extent = vec3(g, "extent_m");
        const Eigen::Vector3d voxel = vec3(g, "voxel_m");
        try {
            c.grid = g.contains("origin_m") ? GridSpec::make(extent, voxel, vec3(g, "origin_m"))
                                            : GridSpec::centered(extent, voxel);
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("config: grid: ") + e.what());
        }

        if (doc.contains("binning")) {
            const json& b = doc.at("binning");
            c.binning.bin_count = b.value("bin_count", c.binning.bin_count);
            c.binning.bin_width_keV = b.value("bin_width_keV", c.binning.bin_width_keV);
        }
        c.epsilon_threshold = doc.at("epsilon_threshold").get<double>();
        c.max_photons = doc.at("max_photons").get<std::uint64_t>();
        c.seed = doc.at("seed").get<std::uint64_t>();
        const std::int64_t workers = doc.value("workers", std::int64_t{1});
        if (workers < 1 || workers > 1024) {
            throw InputError("config: workers must lie in [1, 1024]");
        }
        c.workers = static_cast<unsigned>(workers);
        c.output_path = resolve(base_dir, doc.at("output").get<std::string>());
        if (doc.contains("timestamp_utc")) {
            c.timestamp_utc = doc.at("timestamp_utc").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    std::stringstream text;
    text << in.rdbuf();
    return from_json_text(text.str(), path.parent_path());
}

void RunConfig::validate() const {
    if (!(epsilon_threshold > 0.0 && epsilon_threshold < 1.0)) {
        throw InputError("config: epsilon_threshold must lie in (0, 1)");
    }
    if (max_photons < k_global_eval_interval) {
        throw InputError("config: max_photons must be at least " + std::to_string(k_global_eval_interval));
    }
    if (workers < 1) {
        throw InputError("config: workers must be positive");
    }
    source.validate();
    try {
        grid.validate();
        binning.validate();
    } catch (const std::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
}

std::string resolve_timestamp(const std::optional<std::string>& configured) {
    if (configured) {
        return *configured;
    }
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
        char* end = nullptr;
        const long long seconds = std::strtoll(epoch, &end, 10);
        if (*end == '\0' && seconds >= 0) {
            const std::time_t t = static_cast<std::time_t>(seconds);
            std::tm tm{};
            gmtime_r(&t, &tm);
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
            return buf;
        }
    }
    return "1970-01-01T00:00:00Z";
}

}  // namespace radfield
