// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "radfield/field/field.hpp"
#include "radfield/field/grid.hpp"
#include "radfield/transport/source.hpp"
#include "radfield/transport/tracer.hpp"

namespace radfield {

inline constexpr std::uint32_t k_checkpoint_interval = 50;
inline constexpr std::uint64_t k_global_eval_interval = 50'000;
inline constexpr double k_max_bin_variance = 0.25;
inline constexpr double k_field_percentile = 0.95;

struct VoxelEntrance {
    std::uint64_t voxel;
    Eigen::Vector3d entrance_m;
};

/// Voxels visited by a straight segment, in order. Points are sampled at a
/// spacing no larger than half the smallest voxel extent, endpoints included;
/// a voxel is emitted once per contiguous run of samples, with the run's first
/// sample as its entrance point. Samples outside the grid are dropped.
void traverse_segment(const Eigen::Vector3d& start_m, const Eigen::Vector3d& end_m, const GridSpec& grid,
                      std::vector<VoxelEntrance>& out);
std::vector<VoxelEntrance> traverse_segment(const Eigen::Vector3d& start_m, const Eigen::Vector3d& end_m,
                                            const GridSpec& grid);

/// Streaming mean and population variance.
struct WelfordState {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void observe(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    double variance() const { return n == 0 ? 0.0 : m2 / static_cast<double>(n); }

    bool operator==(const WelfordState&) const = default;
};

/// Chan et al. pairwise combination; exact for integer counts, symmetric in a and b.
WelfordState merge(const WelfordState& a, const WelfordState& b);

/// Tallies of one (voxel, channel). The bin arrays stay empty until the first
/// entrance so that never-reached voxels cost no memory.
struct VoxelAccumulator {
    std::uint64_t hits = 0;
    std::vector<std::uint64_t> bin_counts;
    Eigen::Vector3d direction_sum = Eigen::Vector3d::Zero();
    std::uint32_t photons_since_checkpoint = 0;
    std::vector<WelfordState> welford;

    std::uint64_t checkpoints() const { return welford.empty() ? 0 : welford.front().n; }

    bool operator==(const VoxelAccumulator&) const = default;
};

void score_entrance(VoxelAccumulator& acc, double energy_keV, const Eigen::Vector3d& direction,
                    const EnergyBinning& binning);

/// Observes the current normalized histogram p_b = bin_counts[b] / hits into
/// each bin's Welford state.
void welford_checkpoint(VoxelAccumulator& acc);

/// Mean over bins of variance / 0.25, clamped to [0, 1]. A voxel without a
/// checkpoint counts as unconverged (1).
double epsilon_rel(const VoxelAccumulator& acc);

/// Adds counts and combines Welford states. The checkpoint counters are added
/// modulo the checkpoint interval. Throws std::invalid_argument when the two
/// sides were scored with different bin counts.
VoxelAccumulator merge(const VoxelAccumulator& a, const VoxelAccumulator& b);

/// One scored voxel entrance of a photon, in track order.
struct ScoredEntrance {
    std::uint64_t voxel;
    Component channel;
    double energy_keV;
    Eigen::Vector3d direction;
};

/// Segment sink that turns a photon's track into voxel entrances. Within one
/// segment a voxel counts once; when a segment merely continues the previous
/// one across a body surface, the shared voxel is not counted again in the
/// same channel. A photon re-entering a voxel after scattering counts anew.
class TrackRecorder {
  public:
    explicit TrackRecorder(const GridSpec& grid) : grid_(&grid) {}

    void operator()(const Segment& segment);

    /// Clears the recorded entrances for the next photon.
    void reset();
    const std::vector<ScoredEntrance>& entrances() const { return entrances_; }

  private:
    const GridSpec* grid_;
    std::vector<VoxelEntrance> scratch_;
    std::vector<ScoredEntrance> entrances_;
    std::optional<std::uint64_t> last_voxel_;
    Component last_channel_ = Component::Beam;
};

class ScoringGrid {
  public:
    ScoringGrid(const GridSpec& grid, const EnergyBinning& binning);

    /// Scores one primary photon's entrances and counts the primary.
    void add_primary(std::span<const ScoredEntrance> entrances);

    /// Element-wise merge of another grid over the same voxels and binning.
    void merge(const ScoringGrid& other);

    const GridSpec& grid() const { return grid_; }
    const EnergyBinning& binning() const { return binning_; }
    std::uint64_t primaries_traced() const { return primaries_; }
    const std::vector<VoxelAccumulator>& channel(Component c) const {
        return channels_[static_cast<std::size_t>(c)];
    }
    std::vector<VoxelAccumulator>& channel(Component c) { return channels_[static_cast<std::size_t>(c)]; }
    void set_primaries_traced(std::uint64_t n) { primaries_ = n; }

  private:
    GridSpec grid_;
    EnergyBinning binning_;
    std::array<std::vector<VoxelAccumulator>, 3> channels_;
    std::uint64_t primaries_ = 0;
};

/// Convergence over every (voxel, channel) that was ever hit.
struct ConvergenceState {
    std::vector<double> epsilon_rel_per_voxel;
    double field_epsilon = 1.0;
    std::uint64_t photons_since_global_eval = 0;
};

enum class Verdict { Continue, Stop };

/// Nearest-rank percentile with rank min(n, floor(q * n) + 1), so that the
/// chosen value sits above a fraction q of the others. Empty input yields 1.
double nearest_rank_percentile(std::vector<double> values, double q = k_field_percentile);

/// Recomputes epsilon_rel for every hit (voxel, channel) and the field
/// epsilon over them; stops once it is at or below `threshold`. With no hit
/// voxel at all the run continues.
Verdict evaluate_termination(ConvergenceState& state, const ScoringGrid& scoring, double threshold);

/// Channels "beam", "patient", "scatter", each with layers "spectrum",
/// "hits" and "direction". Throws std::invalid_argument with zero primaries.
RadiationField finalize(const ScoringGrid& scoring, const ConvergenceState& state, FieldMetadata metadata);

}  // namespace radfield
