// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/complexity.hpp"
#include "core/pipeline.hpp"

namespace mvanc {

// Threshold annotation attached to a preset: metric must land in
// [min_value, max_value]. Evaluated into the run summary.
struct Expectation {
    std::string description;
    std::string metric;
    std::optional<double> min_value;
    std::optional<double> max_value;
};

// Everything needed to reproduce one experiment end to end. Serializes to a
// JSON config file; built-in presets are just named instances of this.
struct ExperimentConfig {
    std::string name = "custom";
    std::string description;
    SystemDims dims;
    int control_taps = 512;
    int aux_taps = 256;
    int primary_taps = 128;
    int secondary_taps = 32;
    int secondary_model_taps = 32; // L
    double sample_rate = 16000.0;
    long samples_tuning = 200000;
    long samples_aux = 200000;
    long samples_control = 200000;
    NoiseSpec tuning_noise;
    NoiseSpec control_noise;
    double plant_band_low = 500.0;
    double plant_band_high = 5000.0;
    std::uint64_t seed = 42;
    std::uint64_t plant_seed = 7;
    std::optional<double> plant_perturb_db;
    double plant_unreachable_db = -40.0;
    double plant_physical_coupling_gain = 0.5;
    double plant_physical_coupling_spread = 0.1;
    double plant_physical_unreachable_db = -25.0;
    std::vector<Algorithm> algorithms{Algorithm::mcalms};
    StepSizeKnobs mu_knobs;
    std::optional<StepSizes> mu_explicit;
    double mu_scale = 1.0;
    int nr_window = 4096;
    long trace_stride = 25;
    std::vector<Expectation> expectations;

    PlantConfig plant_config() const;
    StageConfig stage_config(Algorithm algorithm) const; // step sizes unresolved
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

const std::vector<ExperimentConfig>& builtin_presets();
const ExperimentConfig* find_preset(const std::string& name);

// One algorithm's full three-stage run.
struct AlgorithmRun {
    Algorithm algorithm = Algorithm::mcalms;
    StepSizes mu_used;
    RunTrace tuning_trace;
    RunTrace aux_trace;
    RunTrace control_trace;
    FilterBank tuning_w;
    FilterBank aux_h;
    FilterBank control_w;
    std::vector<double> tuning_nr_db;        // per virtual channel, steady state
    std::vector<double> control_nr_db;       // per virtual channel, steady state
    std::vector<double> aux_residual_ratio;  // per physical channel

    void drop_raw_traces(); // keep NR curves and banks, free the sample series
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<AlgorithmRun> runs;
    std::map<std::string, double> metrics; // per-run and cross-run summary values
    std::vector<std::pair<Expectation, bool>> expectation_results;
    std::string summary_text;
};

// Executes tuning -> auxiliary -> control for every algorithm in the config,
// computes summary metrics, and (when out_dir is non-empty) writes trace
// CSVs, bank and plant snapshots, the complexity report, plots and
// summaries under <out_dir>/<config.name>/.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                int threads = 1);

// Same, against a caller-provided plant (e.g. loaded from a snapshot).
ExperimentResult run_experiment_with_plant(const ExperimentConfig& cfg, const PathSet& plant,
                                           const std::string& out_dir, int threads = 1);

// Channel-sweep CSV + log-scale plot under out_dir.
void complexity_report(std::int64_t control_taps, std::int64_t aux_taps, std::int64_t model_taps,
                       int ch_max, const std::string& out_dir);

// Magnitude-response CSVs for each snapshot plus one overlay plot of the
// first-row filters. Returns the paths written.
std::vector<std::string> spectrum_report(const std::vector<std::string>& snapshot_paths,
                                         double band_low, double band_high, double sample_rate,
                                         const std::string& out_dir, int grid_points = 512);

// Trace CSV schema: sample index + whichever per-channel series the stage
// produced + per-channel NR. Stride decimates rows (index % stride == 0).
void write_trace_csv(const std::string& path, const RunTrace& trace, long stride);

} // namespace mvanc
