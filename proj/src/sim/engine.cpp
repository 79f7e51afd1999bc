// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include "radfield/errors.hpp"
#include "radfield/scoring/scoring.hpp"
#include "radfield/sim/simulation.hpp"
#include "radfield/transport/tracer.hpp"

namespace radfield {
namespace {

constexpr std::uint64_t k_chunk_photons = 1000;

// Entrances of a contiguous run of photons; photon k's entrances are
// entrances[offsets[k] .. offsets[k + 1]).
struct ChunkResult {
    std::vector<ScoredEntrance> entrances;
    std::vector<std::size_t> offsets;
    std::uint64_t capped = 0;
};

void trace_chunk(const RunConfig& config, const Scene& scene, const Spectrum& spectrum, std::uint64_t first,
                 std::uint64_t count, ChunkResult& out) {
    out.entrances.clear();
    out.offsets.assign(1, 0);
    out.capped = 0;
    TrackRecorder recorder(config.grid);
    for (std::uint64_t i = first; i < first + count; ++i) {
        StreamRng rng(config.seed, i);
        PhotonState photon = emit_primary(config.source, spectrum, rng);
        recorder.reset();
        if (trace_photon(photon, scene, recorder, rng) == Termination::StepCap) {
            ++out.capped;
        }
        out.entrances.insert(out.entrances.end(), recorder.entrances().begin(), recorder.entrances().end());
        out.offsets.push_back(out.entrances.size());
    }
}

FieldMetadata make_metadata(const RunConfig& config, const Scene& scene, const Spectrum& spectrum) {
    FieldMetadata m;
    m.fixed.physics_model_id = k_physics_model_id;
    m.fixed.scene_digest = scene.digest();
    m.fixed.tube_position_m = config.source.position_m;
    m.fixed.tube_direction = config.source.direction;
    m.fixed.field_shape = config.source.shape;
    m.fixed.spectrum_id = spectrum.id();
    m.fixed.rng_seed = config.seed;
    m.fixed.timestamp_utc = resolve_timestamp(config.timestamp_utc);
    return m;
}

}  // namespace

RunResult run_simulation(const RunConfig& config, Scene scene, const Spectrum& spectrum, const ProgressFn& progress) {
    config.validate();
    if (spectrum.max_energy_keV() > scene.max_energy_keV()) {
        throw InputError("spectrum reaches " + std::to_string(spectrum.max_energy_keV()) +
                         " keV but the scene's attenuation tables end at " +
                         std::to_string(scene.max_energy_keV()) + " keV");
    }
    Eigen::AlignedBox3d extra(config.grid.origin_m, config.grid.upper_corner());
    extra.extend(config.source.position_m);
    scene.fit_world(extra);

    ScoringGrid scoring(config.grid, config.binning);
    ConvergenceState state;
    RunResult result;

    const unsigned workers = std::max(1u, config.workers);
    std::vector<ChunkResult> chunks(workers);
    std::uint64_t next_eval = k_global_eval_interval;
    bool evaluated_at_end = false;
    Verdict verdict = Verdict::Continue;

    while (scoring.primaries_traced() < config.max_photons && verdict == Verdict::Continue) {
        const std::uint64_t begin = scoring.primaries_traced();
        const std::uint64_t round_end =
            std::min({config.max_photons, next_eval, begin + workers * k_chunk_photons});
        const auto n_chunks = static_cast<unsigned>((round_end - begin + k_chunk_photons - 1) / k_chunk_photons);

        std::vector<std::exception_ptr> errors(n_chunks);
        const auto work = [&](unsigned c) {
            try {
                const std::uint64_t first = begin + c * k_chunk_photons;
                trace_chunk(config, scene, spectrum, first, std::min(k_chunk_photons, round_end - first), chunks[c]);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        };
        if (n_chunks == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned c = 0; c < n_chunks; ++c) {
                pool.emplace_back(work, c);
            }
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
        // Scoring runs in photon order so the Welford snapshots do not depend
        // on how photons were spread over threads.
        for (unsigned c = 0; c < n_chunks; ++c) {
            const ChunkResult& r = chunks[c];
            for (std::size_t k = 0; k + 1 < r.offsets.size(); ++k) {
                scoring.add_primary(std::span(r.entrances).subspan(r.offsets[k], r.offsets[k + 1] - r.offsets[k]));
            }
            result.capped_tracks += r.capped;
        }
        state.photons_since_global_eval = scoring.primaries_traced() - (next_eval - k_global_eval_interval);

        if (scoring.primaries_traced() == next_eval) {
            verdict = evaluate_termination(state, scoring, config.epsilon_threshold);
            evaluated_at_end = true;
            next_eval += k_global_eval_interval;
            if (progress) {
                progress(scoring.primaries_traced(), state.field_epsilon);
            }
        } else {
            evaluated_at_end = false;
        }
    }
    if (!evaluated_at_end) {
        // Budget ended between evaluation points; report the field as it stands.
        verdict = evaluate_termination(state, scoring, config.epsilon_threshold);
        if (progress) {
            progress(scoring.primaries_traced(), state.field_epsilon);
        }
    }

    result.primaries = scoring.primaries_traced();
    result.field_epsilon = state.field_epsilon;
    result.converged = verdict == Verdict::Stop;

    FieldMetadata metadata = make_metadata(config, scene, spectrum);
    metadata.set("converged", std::int64_t{result.converged ? 1 : 0});
    metadata.set("epsilon_threshold", config.epsilon_threshold);
    metadata.set("max_photons", static_cast<std::int64_t>(config.max_photons));
    metadata.set("capped_tracks", static_cast<std::int64_t>(result.capped_tracks));
    metadata.set("hit_voxel_channels", static_cast<std::int64_t>(state.epsilon_rel_per_voxel.size()));
    metadata.set("epsilon_percentile",
                 std::string("nearest rank min(n, floor(0.95 n) + 1) over hit (voxel, channel) pairs"));
    metadata.set("checkpoint_interval", std::int64_t{k_checkpoint_interval});
    metadata.set("evaluation_interval", static_cast<std::int64_t>(k_global_eval_interval));
    metadata.set("energy_cutoff_keV", k_energy_cutoff_keV);
    metadata.set("direction_layer", std::string("normalized mean entrance direction"));
    result.field = finalize(scoring, state, std::move(metadata));
    return result;
}

RunResult run_simulation(const RunConfig& config, const ProgressFn& progress) {
    config.validate();
    Scene scene = Scene::load_json(config.scene_path);
    return run_simulation(config, std::move(scene), Spectrum::load_csv(config.spectrum_path), progress);
}

}  // namespace radfield
