// SPDX-License-Identifier: Apache-2.0
#include "core/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/plot.hpp"
#include "core/snapshot.hpp"
#include "core/spectrum.hpp"

namespace mvanc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
void make_dirs(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}
} // namespace

PlantConfig ExperimentConfig::plant_config() const {
    PlantConfig pc;
    pc.f_low = plant_band_low;
    pc.f_high = plant_band_high;
    pc.sample_rate = sample_rate;
    pc.primary_taps = primary_taps;
    pc.secondary_taps = secondary_taps;
    pc.secondary_model_taps = secondary_model_taps;
    pc.seed = plant_seed;
    pc.estimate_perturb_db = plant_perturb_db;
    pc.unreachable_db = plant_unreachable_db;
    pc.physical_coupling_gain = plant_physical_coupling_gain;
    pc.physical_coupling_spread = plant_physical_coupling_spread;
    pc.physical_unreachable_db = plant_physical_unreachable_db;
    return pc;
}

StageConfig ExperimentConfig::stage_config(Algorithm algorithm) const {
    StageConfig sc;
    sc.dims = dims;
    sc.control_taps = control_taps;
    sc.aux_taps = aux_taps;
    sc.model_taps = secondary_model_taps;
    sc.samples_tuning = samples_tuning;
    sc.samples_aux = samples_aux;
    sc.samples_control = samples_control;
    sc.tuning_noise = tuning_noise;
    sc.control_noise = control_noise;
    sc.tuning_noise.sample_rate = sample_rate;
    sc.control_noise.sample_rate = sample_rate;
    sc.seed = seed;
    sc.algorithm = algorithm;
    sc.nr_window = nr_window;
    return sc;
}

// ---------------------------------------------------------------- JSON I/O

namespace {

json noise_to_json(const NoiseSpec& n) {
    json j;
    j["dist"] = n.dist == NoiseDistribution::gaussian ? "gaussian" : "uniform";
    j["band"] = {n.f_low, n.f_high};
    if (n.snr_db.has_value())
        j["snr_db"] = *n.snr_db;
    else
        j["snr_db"] = nullptr;
    if (n.shaper_taps.has_value())
        j["shaper_taps"] = *n.shaper_taps;
    else
        j["shaper_taps"] = nullptr;
    return j;
}

NoiseSpec noise_from_json(const json& j) {
    NoiseSpec n;
    const std::string dist = j.at("dist").get<std::string>();
    if (dist == "gaussian")
        n.dist = NoiseDistribution::gaussian;
    else if (dist == "uniform")
        n.dist = NoiseDistribution::uniform;
    else
        throw ConfigError("noise dist must be 'gaussian' or 'uniform'");
    n.f_low = j.at("band").at(0).get<double>();
    n.f_high = j.at("band").at(1).get<double>();
    if (j.contains("snr_db") && !j.at("snr_db").is_null())
        n.snr_db = j.at("snr_db").get<double>();
    if (j.contains("shaper_taps") && !j.at("shaper_taps").is_null())
        n.shaper_taps = j.at("shaper_taps").get<int>();
    return n;
}

} // namespace

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["description"] = c.description;
    j["dims"] = {{"refs", c.dims.refs},
                 {"sources", c.dims.sources},
                 {"phys_mics", c.dims.phys_mics},
                 {"virt_mics", c.dims.virt_mics}};
    j["taps"] = {{"control", c.control_taps},
                 {"aux", c.aux_taps},
                 {"primary", c.primary_taps},
                 {"secondary", c.secondary_taps},
                 {"secondary_model", c.secondary_model_taps}};
    j["sample_rate"] = c.sample_rate;
    j["samples"] = {{"tuning", c.samples_tuning},
                    {"aux", c.samples_aux},
                    {"control", c.samples_control}};
    j["noise"] = {{"tuning", noise_to_json(c.tuning_noise)},
                  {"control", noise_to_json(c.control_noise)}};
    j["plant"] = {{"band", {c.plant_band_low, c.plant_band_high}},
                  {"seed", c.plant_seed},
                  {"unreachable_db", c.plant_unreachable_db},
                  {"physical_coupling_gain", c.plant_physical_coupling_gain},
                  {"physical_coupling_spread", c.plant_physical_coupling_spread},
                  {"physical_unreachable_db", c.plant_physical_unreachable_db},
                  {"perturb_db",
                   c.plant_perturb_db.has_value() ? json(*c.plant_perturb_db) : json(nullptr)}};
    j["seed"] = c.seed;
    json algs = json::array();
    for (auto a : c.algorithms) algs.push_back(algorithm_name(a));
    j["algorithms"] = algs;
    json mu;
    mu["tuning_bar"] = c.mu_knobs.tuning;
    mu["aux_bar"] = c.mu_knobs.aux;
    mu["control_bar"] = c.mu_knobs.control;
    mu["scale"] = c.mu_scale;
    if (c.mu_explicit.has_value()) {
        mu["explicit"] = {{"mu_tuning", c.mu_explicit->mu_tuning},
                          {"mu_aux", c.mu_explicit->mu_aux},
                          {"mu_control", c.mu_explicit->mu_control}};
    } else {
        mu["explicit"] = nullptr;
    }
    j["mu"] = mu;
    j["nr_window"] = c.nr_window;
    j["trace_stride"] = c.trace_stride;
    json exps = json::array();
    for (const auto& e : c.expectations) {
        json je;
        je["description"] = e.description;
        je["metric"] = e.metric;
        je["min"] = e.min_value.has_value() ? json(*e.min_value) : json(nullptr);
        je["max"] = e.max_value.has_value() ? json(*e.max_value) : json(nullptr);
        exps.push_back(je);
    }
    j["expectations"] = exps;
    return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c.name = j.value("name", std::string("custom"));
        c.description = j.value("description", std::string());
        if (j.contains("dims")) {
            const auto& d = j.at("dims");
            c.dims.refs = d.value("refs", 1);
            c.dims.sources = d.value("sources", 1);
            c.dims.phys_mics = d.value("phys_mics", 1);
            c.dims.virt_mics = d.value("virt_mics", 1);
        }
        if (j.contains("taps")) {
            const auto& t = j.at("taps");
            c.control_taps = t.value("control", c.control_taps);
            c.aux_taps = t.value("aux", c.aux_taps);
            c.primary_taps = t.value("primary", c.primary_taps);
            c.secondary_taps = t.value("secondary", c.secondary_taps);
            c.secondary_model_taps = t.value("secondary_model", c.secondary_taps);
        }
        c.sample_rate = j.value("sample_rate", c.sample_rate);
        if (j.contains("samples")) {
            const auto& s = j.at("samples");
            c.samples_tuning = s.value("tuning", c.samples_tuning);
            c.samples_aux = s.value("aux", c.samples_aux);
            c.samples_control = s.value("control", c.samples_control);
        }
        if (j.contains("noise")) {
            c.tuning_noise = noise_from_json(j.at("noise").at("tuning"));
            c.control_noise = noise_from_json(j.at("noise").at("control"));
        }
        c.tuning_noise.sample_rate = c.sample_rate;
        c.control_noise.sample_rate = c.sample_rate;
        if (j.contains("plant")) {
            const auto& p = j.at("plant");
            if (p.contains("band")) {
                c.plant_band_low = p.at("band").at(0).get<double>();
                c.plant_band_high = p.at("band").at(1).get<double>();
            }
            c.plant_seed = p.value("seed", c.plant_seed);
            c.plant_unreachable_db = p.value("unreachable_db", c.plant_unreachable_db);
            c.plant_physical_coupling_gain =
                p.value("physical_coupling_gain", c.plant_physical_coupling_gain);
            c.plant_physical_coupling_spread =
                p.value("physical_coupling_spread", c.plant_physical_coupling_spread);
            c.plant_physical_unreachable_db =
                p.value("physical_unreachable_db", c.plant_physical_unreachable_db);
            if (p.contains("perturb_db") && !p.at("perturb_db").is_null())
                c.plant_perturb_db = p.at("perturb_db").get<double>();
        }
        c.seed = j.value("seed", c.seed);
        if (j.contains("algorithms")) {
            c.algorithms.clear();
            for (const auto& a : j.at("algorithms"))
                c.algorithms.push_back(algorithm_from_name(a.get<std::string>()));
        }
        if (j.contains("mu")) {
            const auto& m = j.at("mu");
            c.mu_knobs.tuning = m.value("tuning_bar", c.mu_knobs.tuning);
            c.mu_knobs.aux = m.value("aux_bar", c.mu_knobs.aux);
            c.mu_knobs.control = m.value("control_bar", c.mu_knobs.control);
            c.mu_scale = m.value("scale", 1.0);
            if (m.contains("explicit") && !m.at("explicit").is_null()) {
                StepSizes s;
                s.mu_tuning = m.at("explicit").at("mu_tuning").get<double>();
                s.mu_aux = m.at("explicit").at("mu_aux").get<double>();
                s.mu_control = m.at("explicit").at("mu_control").get<double>();
                c.mu_explicit = s;
            }
        }
        c.nr_window = j.value("nr_window", c.nr_window);
        c.trace_stride = j.value("trace_stride", c.trace_stride);
        if (j.contains("expectations")) {
            for (const auto& je : j.at("expectations")) {
                Expectation e;
                e.description = je.value("description", std::string());
                e.metric = je.value("metric", std::string());
                if (je.contains("min") && !je.at("min").is_null())
                    e.min_value = je.at("min").get<double>();
                if (je.contains("max") && !je.at("max").is_null())
                    e.max_value = je.at("max").get<double>();
                c.expectations.push_back(e);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON field error: ") + e.what());
    }
    if (c.algorithms.empty()) throw ConfigError("config needs at least one algorithm");
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return config_from_json(buf.str());
}

// ----------------------------------------------------------------- presets

namespace {

ExperimentConfig base_4x2x4() {
    ExperimentConfig c;
    c.dims = SystemDims{4, 2, 4, 4};
    c.control_taps = 512;
    c.aux_taps = 256;
    c.primary_taps = 128;
    c.secondary_taps = 32;
    c.secondary_model_taps = 32;
    c.sample_rate = 16000.0;
    c.samples_tuning = 1000000;
    c.samples_aux = 400000;
    c.samples_control = 200000;
    c.tuning_noise = NoiseSpec{NoiseDistribution::gaussian, 800.0, 1800.0, 16000.0, 0, 40.0, {}};
    c.control_noise = NoiseSpec{NoiseDistribution::gaussian, 800.0, 1800.0, 16000.0, 0, 40.0, {}};
    c.plant_band_low = 500.0;
    c.plant_band_high = 5000.0;
    c.seed = 42;
    c.plant_seed = 7;
    c.mu_knobs = StepSizeKnobs{0.015, 0.03, 0.08};
    c.nr_window = 4096;
    c.trace_stride = 25;
    return c;
}

std::vector<ExperimentConfig> make_presets() {
    std::vector<ExperimentConfig> out;

    {
        ExperimentConfig c = base_4x2x4();
        c.name = "algorithm-comparison";
        c.description = "4x2x4 system, 800-1800 Hz noise in both stages; adjoint vs filtered-x "
                        "side by side";
        c.algorithms = {Algorithm::mcalms, Algorithm::mcfxlms};
        c.expectations = {
            {"mcalms control-stage virtual NR (mic 1) >= 25 dB", "mcalms.control_nr_db_ch1", 25.0,
             std::nullopt},
            {"mcfxlms control-stage virtual NR (mic 1) >= 25 dB", "mcfxlms.control_nr_db_ch1",
             25.0, std::nullopt},
            {"steady-state NR gap between algorithms <= 3 dB", "nr_gap_db_ch1", std::nullopt, 3.0},
            {"row-1 control filters differ <= 3 dB mean abs in band", "w_row1_specdiff_db",
             std::nullopt, 3.0},
        };
        out.push_back(c);
    }
    {
        ExperimentConfig c = base_4x2x4();
        c.name = "scenario-1";
        c.description = "Gaussian tuning noise vs uniformly distributed control noise, both "
                        "800-1800 Hz";
        c.control_noise.dist = NoiseDistribution::uniform;
        c.algorithms = {Algorithm::mcalms};
        c.expectations = {
            {"control-stage virtual NR (mic 1) >= 25 dB", "mcalms.control_nr_db_ch1", 25.0,
             std::nullopt},
            {"tuning-stage virtual NR (mic 1) >= 25 dB", "mcalms.tuning_nr_db_ch1", 25.0,
             std::nullopt},
            {"auxiliary residual shrinks to <= 5% of its initial level", "mcalms.aux_ratio_max",
             std::nullopt, 0.05},
        };
        out.push_back(c);
    }
    {
        ExperimentConfig c = base_4x2x4();
        c.name = "scenario-2";
        c.description = "broadband tuning (800-1800 Hz), narrowband control (800-1000 Hz)";
        c.control_noise.f_low = 800.0;
        c.control_noise.f_high = 1000.0;
        c.tuning_noise.shaper_taps = 208;
        c.samples_control = 1600000;
        c.algorithms = {Algorithm::mcalms};
        c.expectations = {
            {"control-stage virtual NR (mic 1) >= 30 dB", "mcalms.control_nr_db_ch1", 30.0,
             std::nullopt},
        };
        out.push_back(c);
    }
    {
        ExperimentConfig c = base_4x2x4();
        c.name = "scenario-3";
        c.description = "narrowband tuning (800-1000 Hz), broadband control (800-1800 Hz)";
        c.tuning_noise.f_low = 800.0;
        c.tuning_noise.f_high = 1000.0;
        c.algorithms = {Algorithm::mcalms};
        c.expectations = {
            {"control-stage virtual NR (mic 1) stays positive", "mcalms.control_nr_db_ch1", 3.0,
             std::nullopt},
        };
        out.push_back(c);
    }
    {
        ExperimentConfig c = base_4x2x4();
        c.name = "algorithm-comparison-alt";
        c.description = "tap-length variant: 512/128 control/aux taps with a 256-tap path model "
                        "(true secondary responses stay 32 taps, zero-padded)";
        c.aux_taps = 128;
        c.secondary_model_taps = 256;
        // the adjoint update lags by L-1 samples; a 256-tap model needs a
        // much smaller step to stay inside the delayed-update stability range
        c.mu_knobs = StepSizeKnobs{0.002, 0.03, 0.002};
        c.samples_tuning = 400000;
        c.samples_aux = 200000;
        c.samples_control = 200000;
        c.algorithms = {Algorithm::mcalms, Algorithm::mcfxlms};
        c.expectations = {
            {"mcalms control-stage virtual NR (mic 1) >= 10 dB", "mcalms.control_nr_db_ch1", 10.0,
             std::nullopt},
        };
        out.push_back(c);
    }
    {
        ExperimentConfig c = base_4x2x4();
        c.name = "quick-smoke";
        c.description = "small fast end-to-end run for demos and CI";
        c.dims = SystemDims{2, 1, 2, 2};
        c.control_taps = 64;
        c.aux_taps = 48;
        c.primary_taps = 48;
        c.secondary_taps = 16;
        c.secondary_model_taps = 16;
        c.samples_tuning = 20000;
        c.samples_aux = 20000;
        c.samples_control = 20000;
        c.nr_window = 1024;
        c.trace_stride = 1;
        c.algorithms = {Algorithm::mcalms};
        c.expectations = {
            {"control-stage virtual NR (mic 1) >= 10 dB", "mcalms.control_nr_db_ch1", 10.0,
             std::nullopt},
        };
        out.push_back(c);
    }
    return out;
}

} // namespace

const std::vector<ExperimentConfig>& builtin_presets() {
    static const std::vector<ExperimentConfig> presets = make_presets();
    return presets;
}

const ExperimentConfig* find_preset(const std::string& name) {
    for (const auto& p : builtin_presets())
        if (p.name == name) return &p;
    return nullptr;
}

// ------------------------------------------------------------ run plumbing

void AlgorithmRun::drop_raw_traces() {
    for (RunTrace* t : {&tuning_trace, &aux_trace, &control_trace}) {
        t->disturbance_virtual.clear();
        t->error_virtual.clear();
        t->error_physical.clear();
        t->error_inner.clear();
    }
}

namespace {

double mean_abs_segment(const std::vector<double>& v, std::size_t from, std::size_t to) {
    double acc = 0.0;
    for (std::size_t i = from; i < to && i < v.size(); ++i) acc += std::fabs(v[i]);
    const std::size_t n = std::min(to, v.size()) - std::min(from, v.size());
    return n ? acc / static_cast<double>(n) : 0.0;
}

StepSizes resolve_step_sizes(const ExperimentConfig& cfg, const StageConfig& stage,
                             const PathSet& plant) {
    StepSizes mu = cfg.mu_explicit.has_value() ? *cfg.mu_explicit
                                               : derive_step_sizes(stage, plant, cfg.mu_knobs);
    mu.mu_tuning *= cfg.mu_scale;
    mu.mu_aux *= cfg.mu_scale;
    mu.mu_control *= cfg.mu_scale;
    return mu;
}

AlgorithmRun run_one_algorithm(const ExperimentConfig& cfg, const PathSet& plant,
                               Algorithm algorithm) {
    AlgorithmRun run;
    run.algorithm = algorithm;

    StageConfig stage = cfg.stage_config(algorithm);
    run.mu_used = resolve_step_sizes(cfg, stage, plant);
    stage.step_sizes = run.mu_used;

    TuningResult tuned = run_tuning_controllers(stage, plant);
    run.tuning_w = tuned.optimal;
    run.tuning_trace = std::move(tuned.trace);

    TuningResult aux = run_tuning_aux(stage, plant, run.tuning_w);
    run.aux_h = aux.optimal;
    run.aux_trace = std::move(aux.trace);

    run.control_trace = run_control_stage(stage, plant, run.aux_h, true);
    run.control_w = run.control_trace.final_filters;

    for (const auto& nr : run.tuning_trace.nr) run.tuning_nr_db.push_back(nr.steady_state_db);
    for (const auto& nr : run.control_trace.nr) run.control_nr_db.push_back(nr.steady_state_db);
    const long n = run.aux_trace.samples;
    const std::size_t tenth = static_cast<std::size_t>(n / 10);
    for (const auto& inner : run.aux_trace.error_inner) {
        const double head = mean_abs_segment(inner, 0, tenth);
        const double tail = mean_abs_segment(inner, static_cast<std::size_t>(n) - tenth,
                                             static_cast<std::size_t>(n));
        run.aux_residual_ratio.push_back(head > 0.0 ? tail / head : 0.0);
    }
    return run;
}

void compute_metrics(ExperimentResult& result) {
    auto& m = result.metrics;
    for (const auto& run : result.runs) {
        const std::string p = algorithm_name(run.algorithm) + ".";
        for (std::size_t q = 0; q < run.tuning_nr_db.size(); ++q)
            m[p + "tuning_nr_db_ch" + std::to_string(q + 1)] = run.tuning_nr_db[q];
        for (std::size_t q = 0; q < run.control_nr_db.size(); ++q)
            m[p + "control_nr_db_ch" + std::to_string(q + 1)] = run.control_nr_db[q];
        double worst_ratio = 0.0;
        for (double r : run.aux_residual_ratio) worst_ratio = std::max(worst_ratio, r);
        m[p + "aux_ratio_max"] = worst_ratio;
        m[p + "mu_tuning"] = run.mu_used.mu_tuning;
        m[p + "mu_aux"] = run.mu_used.mu_aux;
        m[p + "mu_control"] = run.mu_used.mu_control;
    }
    if (result.runs.size() == 2) {
        const auto& a = result.runs[0];
        const auto& b = result.runs[1];
        if (!a.control_nr_db.empty() && !b.control_nr_db.empty())
            m["nr_gap_db_ch1"] = std::fabs(a.control_nr_db[0] - b.control_nr_db[0]);
        // Mean-abs magnitude-response difference of the first-row control
        // filters inside the control-noise band.
        double acc = 0.0;
        int cols = a.control_w.cols();
        for (int j = 0; j < cols; ++j) {
            const auto ra = magnitude_response(a.control_w.at(0, j), result.config.sample_rate);
            const auto rb = magnitude_response(b.control_w.at(0, j), result.config.sample_rate);
            acc += mean_abs_db_difference(ra, rb, result.config.control_noise.f_low,
                                          result.config.control_noise.f_high);
        }
        m["w_row1_specdiff_db"] = acc / static_cast<double>(cols);
    }
}

void evaluate_expectations(ExperimentResult& result) {
    for (const auto& e : result.config.expectations) {
        bool pass = false;
        auto it = result.metrics.find(e.metric);
        if (it != result.metrics.end() && std::isfinite(it->second)) {
            pass = true;
            if (e.min_value.has_value() && it->second < *e.min_value) pass = false;
            if (e.max_value.has_value() && it->second > *e.max_value) pass = false;
        }
        result.expectation_results.emplace_back(e, pass);
    }
}

std::string build_summary_text(const ExperimentResult& result) {
    std::ostringstream os;
    os << "experiment: " << result.config.name << "\n";
    if (!result.config.description.empty()) os << result.config.description << "\n";
    os << "seed " << result.config.seed << ", plant seed " << result.config.plant_seed << "\n\n";
    for (const auto& run : result.runs) {
        os << "[" << algorithm_name(run.algorithm) << "]\n";
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  mu: tuning %.6e  aux %.6e  control %.6e\n",
                      run.mu_used.mu_tuning, run.mu_used.mu_aux, run.mu_used.mu_control);
        os << buf;
        os << "  tuning-stage virtual NR (dB):";
        for (double v : run.tuning_nr_db) {
            std::snprintf(buf, sizeof(buf), " %.2f", v);
            os << buf;
        }
        os << "\n  control-stage virtual NR (dB):";
        for (double v : run.control_nr_db) {
            std::snprintf(buf, sizeof(buf), " %.2f", v);
            os << buf;
        }
        os << "\n  aux residual ratio (last 10% / first 10%):";
        for (double v : run.aux_residual_ratio) {
            std::snprintf(buf, sizeof(buf), " %.4f", v);
            os << buf;
        }
        os << "\n";
    }
    if (!result.expectation_results.empty()) {
        os << "\nexpectations:\n";
        for (const auto& [e, pass] : result.expectation_results) {
            os << "  [" << (pass ? "pass" : "FAIL") << "] " << e.description;
            auto it = result.metrics.find(e.metric);
            if (it != result.metrics.end()) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), " (measured %.3f)", it->second);
                os << buf;
            }
            os << "\n";
        }
    }
    return os.str();
}

CsvTable trace_to_table(const RunTrace& trace, long stride) {
    if (stride < 1) stride = 1;
    CsvTable t;
    t.schema = "mvanc-trace v1";
    t.columns.push_back("n");
    auto add_cols = [&](const char* base, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i)
            t.columns.push_back(std::string(base) + std::to_string(i + 1));
    };
    add_cols("d_v_", trace.disturbance_virtual.size());
    add_cols("e_v_", trace.error_virtual.size());
    add_cols("e_p_", trace.error_physical.size());
    add_cols("e_h_", trace.error_inner.size());
    add_cols("nr_", trace.nr.size());

    for (long n = 0; n < trace.samples; n += stride) {
        std::vector<double> row;
        row.reserve(t.columns.size());
        row.push_back(static_cast<double>(n));
        const std::size_t i = static_cast<std::size_t>(n);
        for (const auto& s : trace.disturbance_virtual) row.push_back(s[i]);
        for (const auto& s : trace.error_virtual) row.push_back(s[i]);
        for (const auto& s : trace.error_physical) row.push_back(s[i]);
        for (const auto& s : trace.error_inner) row.push_back(s[i]);
        for (const auto& nr : trace.nr) row.push_back(nr.db[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

// NR overlay plot, built from the exported CSVs so plots stay views.
void plot_nr_from_csvs(const std::vector<std::pair<std::string, std::string>>& label_and_path,
                       const std::string& out_svg, const std::string& title) {
    std::vector<PlotSeries> series;
    for (const auto& [label, csv_path] : label_and_path) {
        CsvTable t = read_csv(csv_path);
        const int n_col = t.column_index("n");
        const int nr_col = t.column_index("nr_1");
        if (n_col < 0 || nr_col < 0) continue;
        PlotSeries s;
        s.label = label;
        for (const auto& row : t.rows) {
            if (std::isnan(row[static_cast<std::size_t>(nr_col)])) continue;
            s.x.push_back(row[static_cast<std::size_t>(n_col)]);
            s.y.push_back(row[static_cast<std::size_t>(nr_col)]);
        }
        series.push_back(std::move(s));
    }
    PlotOptions opt;
    opt.title = title;
    opt.x_label = "sample";
    opt.y_label = "noise reduction (dB)";
    write_svg_line_chart(out_svg, series, opt);
}

void write_run_artifacts(const ExperimentResult& result, const PathSet& plant,
                         const std::string& dir) {
    make_dirs(dir);
    save_pathset(dir + "/plant.txt", plant);
    {
        std::ofstream os(dir + "/config.json");
        if (!os) throw IoError("cannot write config.json");
        os << config_to_json(result.config);
    }

    std::vector<std::pair<std::string, std::string>> control_csvs, tuning_csvs;
    for (const auto& run : result.runs) {
        const std::string alg = algorithm_name(run.algorithm);
        const std::string adir = dir + "/" + alg;
        make_dirs(adir);
        write_trace_csv(adir + "/trace_tuning.csv", run.tuning_trace, result.config.trace_stride);
        write_trace_csv(adir + "/trace_aux.csv", run.aux_trace, result.config.trace_stride);
        write_trace_csv(adir + "/trace_control.csv", run.control_trace,
                        result.config.trace_stride);
        save_filter_bank(adir + "/bank_w_tuning.txt", "w_tuning", run.tuning_w);
        save_filter_bank(adir + "/bank_h_aux.txt", "h_aux", run.aux_h);
        save_filter_bank(adir + "/bank_w_control.txt", "w_control", run.control_w);
        control_csvs.emplace_back(alg, adir + "/trace_control.csv");
        tuning_csvs.emplace_back(alg, adir + "/trace_tuning.csv");

        // w11 spectrum, tuning vs control stage, from the exported banks
        std::vector<std::string> snaps = {adir + "/bank_w_tuning.txt",
                                          adir + "/bank_w_control.txt"};
        spectrum_report(snaps, result.config.control_noise.f_low,
                        result.config.control_noise.f_high, result.config.sample_rate, adir);
    }
    plot_nr_from_csvs(control_csvs, dir + "/nr_control.svg",
                      result.config.name + ": control stage, virtual mic 1");
    plot_nr_from_csvs(tuning_csvs, dir + "/nr_tuning.svg",
                      result.config.name + ": tuning stage, virtual mic 1");

    // closed-form sweep at this config's tap lengths + reconciliation against
    // an instrumented sample
    complexity_report(result.config.control_taps, result.config.aux_taps,
                      result.config.secondary_model_taps, 10, dir);
    for (const auto& run : result.runs) {
        StageConfig stage = result.config.stage_config(run.algorithm);
        stage.step_sizes = run.mu_used;
        const OpCounter counter = instrumented_control_sample(stage, plant, run.algorithm);
        ComplexityParams p;
        p.refs = result.config.dims.refs;
        p.sources = result.config.dims.sources;
        p.phys_mics = result.config.dims.phys_mics;
        p.control_taps = result.config.control_taps;
        p.aux_taps = result.config.aux_taps;
        p.model_taps = result.config.secondary_model_taps;
        const Reconciliation rec = reconcile_counts(run.algorithm, p, counter);
        std::ofstream os(dir + "/complexity_reconciliation_" + algorithm_name(run.algorithm) +
                         ".txt");
        os << rec.to_text();
    }

    {
        std::ofstream os(dir + "/summary.txt");
        os << result.summary_text;
    }
    {
        json j;
        j["experiment"] = result.config.name;
        json runs = json::array();
        for (const auto& run : result.runs) {
            json r;
            r["algorithm"] = algorithm_name(run.algorithm);
            r["mu"] = {{"tuning", run.mu_used.mu_tuning},
                       {"aux", run.mu_used.mu_aux},
                       {"control", run.mu_used.mu_control}};
            r["tuning_nr_db"] = run.tuning_nr_db;
            r["control_nr_db"] = run.control_nr_db;
            r["aux_residual_ratio"] = run.aux_residual_ratio;
            runs.push_back(r);
        }
        j["runs"] = runs;
        j["metrics"] = result.metrics;
        json exps = json::array();
        for (const auto& [e, pass] : result.expectation_results)
            exps.push_back({{"description", e.description}, {"pass", pass}});
        j["expectations"] = exps;
        std::ofstream os(dir + "/summary.json");
        os << j.dump(2) << "\n";
    }
}

} // namespace

void write_trace_csv(const std::string& path, const RunTrace& trace, long stride) {
    write_csv(path, trace_to_table(trace, stride));
}

ExperimentResult run_experiment_with_plant(const ExperimentConfig& cfg, const PathSet& plant,
                                           const std::string& out_dir, int threads) {
    if (cfg.algorithms.empty()) throw ConfigError("experiment needs at least one algorithm");

    ExperimentResult result;
    result.config = cfg;
    result.runs.resize(cfg.algorithms.size());

    if (threads > 1 && cfg.algorithms.size() > 1) {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(cfg.algorithms.size());
        for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
            workers.emplace_back([&, i]() {
                try {
                    result.runs[i] = run_one_algorithm(cfg, plant, cfg.algorithms[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
            result.runs[i] = run_one_algorithm(cfg, plant, cfg.algorithms[i]);
    }

    compute_metrics(result);
    evaluate_expectations(result);
    result.summary_text = build_summary_text(result);
    if (!out_dir.empty()) write_run_artifacts(result, plant, out_dir + "/" + cfg.name);
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                int threads) {
    const PathSet plant = synth_pathset(cfg.dims, cfg.plant_config());
    return run_experiment_with_plant(cfg, plant, out_dir, threads);
}

void complexity_report(std::int64_t control_taps, std::int64_t aux_taps, std::int64_t model_taps,
                       int ch_max, const std::string& out_dir) {
    make_dirs(out_dir);
    const auto rows = channel_sweep(control_taps, aux_taps, model_taps, ch_max);

    CsvTable t;
    t.schema = "mvanc-complexity-sweep v1";
    t.columns = {"channels",    "mcfxlms_mult", "mcfxlms_add", "mcalms_mult",
                 "mcalms_add",  "mult_ratio",   "add_ratio"};
    for (const auto& r : rows) {
        t.rows.push_back({static_cast<double>(r.channels),
                          static_cast<double>(r.mcfxlms.multiplications),
                          static_cast<double>(r.mcfxlms.additions),
                          static_cast<double>(r.mcalms.multiplications),
                          static_cast<double>(r.mcalms.additions), r.mult_ratio, r.add_ratio});
    }
    const std::string csv_path = out_dir + "/complexity_sweep.csv";
    write_csv(csv_path, t, "%.17g");

    // plot is a view over the CSV just written
    CsvTable back = read_csv(csv_path);
    auto col = [&](const char* name) {
        const int idx = back.column_index(name);
        std::vector<double> v;
        for (const auto& row : back.rows) v.push_back(row[static_cast<std::size_t>(idx)]);
        return v;
    };
    const auto channels = col("channels");
    std::vector<PlotSeries> series;
    for (const char* name : {"mcfxlms_mult", "mcfxlms_add", "mcalms_mult", "mcalms_add"}) {
        PlotSeries s;
        s.label = name;
        s.x = channels;
        s.y = col(name);
        series.push_back(std::move(s));
    }
    PlotOptions opt;
    opt.title = "operations per sample period vs channel count";
    opt.x_label = "channels (J = K = M)";
    opt.y_label = "operations";
    opt.log_y = true;
    write_svg_line_chart(out_dir + "/complexity_sweep.svg", series, opt);
}

std::vector<std::string> spectrum_report(const std::vector<std::string>& snapshot_paths,
                                         double band_low, double band_high, double sample_rate,
                                         const std::string& out_dir, int grid_points) {
    if (snapshot_paths.empty()) throw ConfigError("spectrum_report: no snapshots given");
    if (grid_points < 512) grid_points = 512;
    make_dirs(out_dir);

    std::vector<std::string> written;
    std::vector<PlotSeries> overlay;
    for (const auto& path : snapshot_paths) {
        std::string label;
        const FilterBank bank = load_filter_bank(path, &label);
        if (label.empty()) label = fs::path(path).stem().string();

        CsvTable t;
        t.schema = "mvanc-spectrum v1";
        t.columns.push_back("freq_hz");
        std::vector<MagnitudeResponse> responses;
        for (int r = 0; r < bank.rows(); ++r)
            for (int c = 0; c < bank.cols(); ++c) {
                t.columns.push_back("mag_db_r" + std::to_string(r + 1) + "_c" +
                                    std::to_string(c + 1));
                responses.push_back(magnitude_response(bank.at(r, c), sample_rate, grid_points));
            }
        for (int g = 0; g < grid_points; ++g) {
            std::vector<double> row;
            row.push_back(responses[0].freq_hz[static_cast<std::size_t>(g)]);
            for (const auto& resp : responses) row.push_back(resp.mag_db[static_cast<std::size_t>(g)]);
            t.rows.push_back(std::move(row));
        }
        const std::string csv_path =
            out_dir + "/spectrum_" + fs::path(path).stem().string() + ".csv";
        write_csv(csv_path, t);
        written.push_back(csv_path);

        // overlay the first filter of the first row per snapshot
        PlotSeries s;
        s.label = label;
        s.x = responses[0].freq_hz;
        s.y = responses[0].mag_db;
        overlay.push_back(std::move(s));
    }

    PlotOptions opt;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "magnitude response, w(1,1); band %.0f-%.0f Hz", band_low,
                  band_high);
    opt.title = buf;
    opt.x_label = "frequency (Hz)";
    opt.y_label = "magnitude (dB)";
    const std::string svg_path = out_dir + "/spectrum_w11.svg";
    write_svg_line_chart(svg_path, overlay, opt);
    written.push_back(svg_path);
    return written;
}

} // namespace mvanc
