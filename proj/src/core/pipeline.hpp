// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "core/acoustics.hpp"
#include "core/adaptive.hpp"
#include "core/opcount.hpp"
#include "core/types.hpp"

namespace mvanc {

// Everything one stage run needs. Step sizes are explicit here; the
// experiment layer resolves them (heuristic or literal) before running and
// records what it used.
struct StageConfig {
    SystemDims dims;
    int control_taps = 512; // N_x
    int aux_taps = 256;     // N_h
    int model_taps = 32;    // L, must match the plant's estimated banks
    StepSizes step_sizes;
    long samples_tuning = 200000;
    long samples_aux = 200000;
    long samples_control = 200000;
    NoiseSpec tuning_noise;
    NoiseSpec control_noise;
    std::uint64_t seed = 1;
    Algorithm algorithm = Algorithm::mcalms;
    int nr_window = 4096;

    void validate(const PathSet& plant) const;
};

// Smoothed noise-reduction curve for one channel:
// NR(n) = 10 log10( movavg(d^2) / movavg(e^2) ), defined once the window is
// full. Steady state is the median of the last 10% of defined values.
struct NrSeries {
    std::vector<double> db;
    long first_valid = -1;
    bool clamped = false;
    double steady_state_db = std::numeric_limits<double>::quiet_NaN();
};

NrSeries noise_reduction_db(const std::vector<double>& disturbance,
                            const std::vector<double>& error, int window);

// Per-sample records of one stage run plus the derived noise-reduction
// curves. Series a stage does not produce stay empty.
struct RunTrace {
    long samples = 0;
    std::vector<std::vector<double>> disturbance_virtual; // Q x n
    std::vector<std::vector<double>> error_virtual;       // Q x n
    std::vector<std::vector<double>> error_physical;      // M x n
    std::vector<std::vector<double>> error_inner;         // M x n
    std::vector<NrSeries> nr; // per channel of whichever pair the stage defines
    FilterBank final_filters; // W after stages 1/3, H after stage 2
};

struct TuningResult {
    FilterBank optimal; // W (K x J) or H (M x J)
    RunTrace trace;
};

// Tuning stage, first phase: adapt W against the virtual error microphones.
TuningResult run_tuning_controllers(const StageConfig& cfg, const PathSet& plant);

// Tuning stage, second phase: freeze W, identify the auxiliary filters from
// the physical errors. NR curves relate e_p (input) to e_h (residual).
TuningResult run_tuning_aux(const StageConfig& cfg, const PathSet& plant,
                            const FilterBank& optimal_w);

// Control stage: virtual microphones removed; W restarts from zero and adapts
// against the auxiliary-compensated inner error. When record_virtual_eval is
// set the trace also carries d_v/e_v sensed through the true virtual paths —
// evaluation-only; the update path never reads them.
RunTrace run_control_stage(const StageConfig& cfg, const PathSet& plant, const FilterBank& h_o,
                           bool record_virtual_eval = true);

// Average clean reference power over a deterministic probe prefix, used by
// the step-size heuristic.
double probe_reference_power(const StageConfig& cfg, bool control_stage, long probe_samples = 20000);

// mu = mu_bar / (taps * reference power * path-model energy); one knob per
// stage. Every run records the literal values resolved here.
struct StepSizeKnobs {
    double tuning = 0.015;
    double aux = 0.03;
    double control = 0.08;
};
StepSizes derive_step_sizes(const StageConfig& cfg, const PathSet& plant,
                            const StepSizeKnobs& knobs);

// Runs a warmed-up control-stage engine for exactly one sample with counting
// enabled and returns the per-category tallies.
OpCounter instrumented_control_sample(const StageConfig& cfg, const PathSet& plant,
                                      Algorithm algorithm);

} // namespace mvanc
