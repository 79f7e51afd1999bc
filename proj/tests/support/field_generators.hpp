// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <string>

#include "radfield/field/field.hpp"

namespace radfield::testing {

inline std::string random_name(std::mt19937_64& rng, std::size_t max_len = 12) {
    static const char* const pieces[] = {"a", "b", "x", "z", "_", "7", "\xC2\xB5", "\xC3\xA9", "Gy", "-"};
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(pieces) - 1);
    std::string s;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
        s += pieces[pick(rng)];
    }
    return s;
}

inline GridSpec random_grid(std::mt19937_64& rng, std::uint32_t max_count = 16) {
    std::uniform_int_distribution<std::uint32_t> count(1, max_count);
    std::uniform_real_distribution<double> size(0.001, 0.1);
    std::uniform_real_distribution<double> origin(-1.0, 1.0);
    Eigen::Vector3d voxel(size(rng), size(rng), size(rng));
    Eigen::Vector3d extent;
    for (int a = 0; a < 3; ++a) {
        extent[a] = voxel[a] * count(rng);
    }
    return GridSpec::make(extent, voxel, Eigen::Vector3d(origin(rng), origin(rng), origin(rng)));
}

inline Layer random_layer(std::mt19937_64& rng, const GridSpec& grid, const EnergyBinning& binning,
                          std::string name) {
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_real_distribution<double> value(-1e3, 1e3);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    const std::size_t voxels = grid.voxel_count();
    Layer layer;
    switch (kind(rng)) {
        case 0: {
            std::vector<float> v(voxels);
            for (auto& x : v) x = static_cast<float>(value(rng));
            layer = Layer::scalar_f32(std::move(name), random_name(rng, 4), std::move(v));
            break;
        }
        case 1: {
            std::vector<double> v(voxels);
            for (auto& x : v) x = value(rng);
            layer = Layer::scalar_f64(std::move(name), random_name(rng, 4), std::move(v));
            break;
        }
        case 2: {
            const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(1, 4)(rng);
            std::vector<float> v(voxels * n);
            for (auto& x : v) x = static_cast<float>(value(rng));
            layer = Layer::vector_f32(std::move(name), random_name(rng, 4), n, std::move(v));
            break;
        }
        default: {
            const std::uint32_t bins = binning.bin_count;
            std::vector<float> v(voxels * bins, 0.0f);
            std::vector<double> w(bins);
            for (std::size_t vox = 0; vox < voxels; ++vox) {
                if (unit01(rng) < 0.2) {
                    continue;  // never-hit voxel
                }
                double sum = 0.0;
                for (auto& x : w) sum += (x = unit01(rng));
                for (std::uint32_t b = 0; b < bins; ++b) {
                    v[vox * bins + b] = static_cast<float>(w[b] / sum);
                }
            }
            layer = Layer::histogram_f32(std::move(name), "1", bins, std::move(v));
            break;
        }
    }
    layer.statistical_error = unit01(rng);
    return layer;
}

inline RadiationField random_field(std::mt19937_64& rng, std::uint32_t max_count = 16) {
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    RadiationField f;
    f.grid = random_grid(rng, max_count);
    f.binning.bin_count = std::uniform_int_distribution<std::uint32_t>(1, 40)(rng);
    f.binning.bin_width_keV = 0.5 + 10.0 * unit01(rng);

    FixedMetadata& m = f.metadata.fixed;
    m.software_version = random_name(rng);
    m.physics_model_id = random_name(rng);
    m.scene_digest = random_name(rng);
    m.tube_position_m = Eigen::Vector3d(unit01(rng) - 2.5, unit01(rng), 4.0 * unit01(rng));
    m.tube_direction = Eigen::Vector3d(unit01(rng) - 0.5, unit01(rng) - 0.5, 1.0).normalized();
    if (unit01(rng) < 0.5) {
        m.field_shape = ConeShape{1.0 + 170.0 * unit01(rng)};
    } else {
        m.field_shape = PyramidShape{0.1 + unit01(rng), 0.1 + unit01(rng), 0.5 + unit01(rng)};
    }
    m.spectrum_id = random_name(rng);
    m.primary_count = rng();
    m.rng_seed = rng();
    m.epsilon_rel_achieved = unit01(rng);
    m.timestamp_utc = "2024-01-01T00:00:00Z";

    const int n_dynamic = std::uniform_int_distribution<int>(0, 5)(rng);
    for (int i = 0; i < n_dynamic; ++i) {
        const std::string key = "k" + std::to_string(i) + random_name(rng, 3);
        switch (i % 4) {
            case 0: f.metadata.set(key, static_cast<std::int64_t>(rng())); break;
            case 1: f.metadata.set(key, unit01(rng) * 1e6); break;
            case 2: f.metadata.set(key, random_name(rng)); break;
            default: f.metadata.set(key, Eigen::Vector3d(unit01(rng), -unit01(rng), 3.0)); break;
        }
    }

    const int n_channels = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int c = 0; c < n_channels; ++c) {
        Channel& ch = f.add_channel("ch" + std::to_string(c) + random_name(rng, 3));
        const int n_layers = std::uniform_int_distribution<int>(0, 4)(rng);
        for (int l = 0; l < n_layers; ++l) {
            ch.layers.push_back(random_layer(rng, f.grid, f.binning, "l" + std::to_string(l) + random_name(rng, 3)));
        }
    }
    return f;
}

}  // namespace radfield::testing
