// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "radfield/scoring/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radfield {

void traverse_segment(const Eigen::Vector3d& start_m, const Eigen::Vector3d& end_m, const GridSpec& grid,
                      std::vector<VoxelEntrance>& out) {
    // Clip to the grid box first; samples outside it would be dropped anyway.
    const Eigen::Vector3d lo = grid.origin_m;
    const Eigen::Vector3d hi = grid.upper_corner();
    const Eigen::Vector3d d = end_m - start_m;
    double t0 = 0.0;
    double t1 = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (start_m[a] < lo[a] || start_m[a] > hi[a]) {
                return;
            }
            continue;
        }
        double ta = (lo[a] - start_m[a]) / d[a];
        double tb = (hi[a] - start_m[a]) / d[a];
        if (ta > tb) {
            std::swap(ta, tb);
        }
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (!(t0 <= t1)) {
        return;
    }

    // floor(L / s) + 1 intervals keep the spacing strictly below s.
    const double spacing = 0.5 * grid.min_voxel_extent();
    const double length = d.norm() * (t1 - t0);
    const auto intervals = length > 0.0 ? static_cast<std::uint64_t>(std::floor(length / spacing)) + 1 : 0;

    std::optional<std::uint64_t> current;
    for (std::uint64_t i = 0; i <= intervals; ++i) {
        const double t = intervals == 0 ? t0 : t0 + (t1 - t0) * (static_cast<double>(i) / intervals);
        const Eigen::Vector3d p = start_m + t * d;
        const auto v = grid.voxel_of(p);
        if (!v) {
            current.reset();
            continue;
        }
        const std::uint64_t flat = grid.flat_index(v->x(), v->y(), v->z());
        if (current != flat) {
            out.push_back({flat, p});
            current = flat;
        }
    }
}

std::vector<VoxelEntrance> traverse_segment(const Eigen::Vector3d& start_m, const Eigen::Vector3d& end_m,
                                            const GridSpec& grid) {
    std::vector<VoxelEntrance> out;
    traverse_segment(start_m, end_m, grid, out);
    return out;
}

WelfordState merge(const WelfordState& a, const WelfordState& b) {
    if (a.n == 0) {
        return b;
    }
    if (b.n == 0) {
        return a;
    }
    const double na = static_cast<double>(a.n);
    const double nb = static_cast<double>(b.n);
    const double n = na + nb;
    const double delta = b.mean - a.mean;
    return {a.n + b.n, (na * a.mean + nb * b.mean) / n, a.m2 + b.m2 + delta * delta * (na * nb / n)};
}

void score_entrance(VoxelAccumulator& acc, double energy_keV, const Eigen::Vector3d& direction,
                    const EnergyBinning& binning) {
    if (acc.bin_counts.empty()) {
        acc.bin_counts.assign(binning.bin_count, 0);
        acc.welford.assign(binning.bin_count, WelfordState{});
    }
    ++acc.hits;
    ++acc.bin_counts[binning.bin_index(energy_keV)];
    acc.direction_sum += direction;
    if (++acc.photons_since_checkpoint == k_checkpoint_interval) {
        welford_checkpoint(acc);
        acc.photons_since_checkpoint = 0;
    }
}

void welford_checkpoint(VoxelAccumulator& acc) {
    if (acc.hits == 0) {
        return;
    }
    const double hits = static_cast<double>(acc.hits);
    for (std::size_t b = 0; b < acc.bin_counts.size(); ++b) {
        acc.welford[b].observe(static_cast<double>(acc.bin_counts[b]) / hits);
    }
}

double epsilon_rel(const VoxelAccumulator& acc) {
    if (acc.checkpoints() == 0) {
        return 1.0;
    }
    double sum = 0.0;
    for (const WelfordState& w : acc.welford) {
        sum += w.variance() / k_max_bin_variance;
    }
    return std::clamp(sum / static_cast<double>(acc.welford.size()), 0.0, 1.0);
}

VoxelAccumulator merge(const VoxelAccumulator& a, const VoxelAccumulator& b) {
    if (b.bin_counts.empty() && b.hits == 0) {
        return a;
    }
    if (a.bin_counts.empty() && a.hits == 0) {
        return b;
    }
    if (a.bin_counts.size() != b.bin_counts.size()) {
        throw std::invalid_argument("cannot merge accumulators with different energy binning");
    }
    VoxelAccumulator out;
    out.hits = a.hits + b.hits;
    out.bin_counts.resize(a.bin_counts.size());
    out.welford.resize(a.welford.size());
    for (std::size_t i = 0; i < a.bin_counts.size(); ++i) {
        out.bin_counts[i] = a.bin_counts[i] + b.bin_counts[i];
        out.welford[i] = merge(a.welford[i], b.welford[i]);
    }
    out.direction_sum = a.direction_sum + b.direction_sum;
    out.photons_since_checkpoint = (a.photons_since_checkpoint + b.photons_since_checkpoint) % k_checkpoint_interval;
    return out;
}

void TrackRecorder::operator()(const Segment& segment) {
    scratch_.clear();
    traverse_segment(segment.start_m, segment.end_m, *grid_, scratch_);
    for (std::size_t i = 0; i < scratch_.size(); ++i) {
        const std::uint64_t voxel = scratch_[i].voxel;
        if (i == 0 && segment.continues && last_voxel_ == voxel && last_channel_ == segment.component) {
            continue;
        }
        entrances_.push_back({voxel, segment.component, segment.energy_keV, segment.direction});
    }
    if (scratch_.empty()) {
        last_voxel_.reset();
    } else {
        last_voxel_ = scratch_.back().voxel;
    }
    last_channel_ = segment.component;
}

void TrackRecorder::reset() {
    entrances_.clear();
    last_voxel_.reset();
    last_channel_ = Component::Beam;
}

ScoringGrid::ScoringGrid(const GridSpec& grid, const EnergyBinning& binning) : grid_(grid), binning_(binning) {
    for (auto& c : channels_) {
        c.resize(grid.voxel_count());
    }
}

void ScoringGrid::add_primary(std::span<const ScoredEntrance> entrances) {
    for (const ScoredEntrance& e : entrances) {
        score_entrance(channel(e.channel)[e.voxel], e.energy_keV, e.direction, binning_);
    }
    ++primaries_;
}

void ScoringGrid::merge(const ScoringGrid& other) {
    if (!(other.grid_ == grid_) || other.binning_.bin_count != binning_.bin_count ||
        other.binning_.bin_width_keV != binning_.bin_width_keV) {
        throw std::invalid_argument("cannot merge scoring grids over different voxels or binning");
    }
    for (std::size_t c = 0; c < channels_.size(); ++c) {
        for (std::size_t v = 0; v < channels_[c].size(); ++v) {
            channels_[c][v] = radfield::merge(channels_[c][v], other.channels_[c][v]);
        }
    }
    primaries_ += other.primaries_;
}

double nearest_rank_percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        return 1.0;
    }
    const std::size_t n = values.size();
    const std::size_t rank =
        std::min(n, static_cast<std::size_t>(std::floor(q * static_cast<double>(n))) + 1);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
}

Verdict evaluate_termination(ConvergenceState& state, const ScoringGrid& scoring, double threshold) {
    state.epsilon_rel_per_voxel.clear();
    for (const Component c : k_components) {
        for (const VoxelAccumulator& acc : scoring.channel(c)) {
            if (acc.hits > 0) {
                state.epsilon_rel_per_voxel.push_back(epsilon_rel(acc));
            }
        }
    }
    state.photons_since_global_eval = 0;
    if (state.epsilon_rel_per_voxel.empty()) {
        state.field_epsilon = 1.0;
        return Verdict::Continue;
    }
    state.field_epsilon = nearest_rank_percentile(state.epsilon_rel_per_voxel);
    return state.field_epsilon <= threshold ? Verdict::Stop : Verdict::Continue;
}

RadiationField finalize(const ScoringGrid& scoring, const ConvergenceState& state, FieldMetadata metadata) {
    if (scoring.primaries_traced() == 0) {
        throw std::invalid_argument("cannot finalize a field without primaries");
    }
    const GridSpec& grid = scoring.grid();
    const std::uint32_t bins = scoring.binning().bin_count;
    const std::size_t voxels = grid.voxel_count();
    const double primaries = static_cast<double>(scoring.primaries_traced());

    metadata.fixed.primary_count = scoring.primaries_traced();
    metadata.fixed.epsilon_rel_achieved = state.field_epsilon;

    RadiationField field;
    field.grid = grid;
    field.binning = scoring.binning();
    field.metadata = std::move(metadata);
    for (const Component c : k_components) {
        const auto& accs = scoring.channel(c);
        std::vector<float> spectrum(voxels * bins, 0.0f);
        std::vector<float> hits(voxels, 0.0f);
        std::vector<float> direction(voxels * 3, 0.0f);
        for (std::size_t v = 0; v < voxels; ++v) {
            const VoxelAccumulator& acc = accs[v];
            if (acc.hits == 0) {
                continue;
            }
            const double n = static_cast<double>(acc.hits);
            for (std::uint32_t b = 0; b < bins; ++b) {
                spectrum[v * bins + b] = static_cast<float>(static_cast<double>(acc.bin_counts[b]) / n);
            }
            hits[v] = static_cast<float>(n / primaries);
            const double norm = acc.direction_sum.norm();
            if (norm > 0.0) {
                const Eigen::Vector3f d = (acc.direction_sum / norm).cast<float>();
                std::copy(d.data(), d.data() + 3, direction.begin() + static_cast<std::ptrdiff_t>(v * 3));
            }
        }
        Channel& channel = field.add_channel(channel_name(c));
        channel.layers.push_back(Layer::histogram_f32("spectrum", "1", bins, std::move(spectrum)));
        channel.layers.push_back(Layer::scalar_f32("hits", "1/primary", std::move(hits)));
        channel.layers.push_back(Layer::vector_f32("direction", "1", 3, std::move(direction)));
        for (Layer& layer : channel.layers) {
            layer.statistical_error = state.field_epsilon;
        }
    }
    return field;
}

}  // namespace radfield
