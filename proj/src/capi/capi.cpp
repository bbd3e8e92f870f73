// SPDX-License-Identifier: Apache-2.0
#include "mvanc/mvanc.h"

#include <cstring>
#include <string>

#include "core/experiment.hpp"
#include "core/snapshot.hpp"

using namespace mvanc;

struct mvanc_config_s {
    ExperimentConfig cfg;
};
struct mvanc_plant_s {
    PathSet plant;
};
struct mvanc_result_s {
    ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;
thread_local mvanc_status g_last_status = MVANC_OK;

mvanc_status status_for(const std::exception& e) {
    g_last_error = e.what();
    if (dynamic_cast<const DivergenceError*>(&e))
        g_last_status = MVANC_ERR_DIVERGENCE;
    else if (dynamic_cast<const IoError*>(&e))
        g_last_status = MVANC_ERR_IO;
    else if (dynamic_cast<const ConfigError*>(&e))
        g_last_status = MVANC_ERR_USAGE;
    else
        g_last_status = MVANC_ERR_INTERNAL;
    return g_last_status;
}

// Wraps a callable returning T*; on exception records the message and
// returns nullptr.
template <typename F>
auto wrap_ptr(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        status_for(e);
        return nullptr;
    }
}

template <typename F>
mvanc_status wrap_status(F&& f) {
    try {
        f();
        return MVANC_OK;
    } catch (const std::exception& e) {
        return status_for(e);
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* mvanc_version(void) { return "0.1.0"; }

const char* mvanc_last_error(void) { return g_last_error.c_str(); }

mvanc_status mvanc_last_status(void) { return g_last_status; }

int mvanc_preset_count(void) { return static_cast<int>(builtin_presets().size()); }

const char* mvanc_preset_name(int index) {
    const auto& presets = builtin_presets();
    if (index < 0 || index >= static_cast<int>(presets.size())) return nullptr;
    return presets[static_cast<std::size_t>(index)].name.c_str();
}

const char* mvanc_preset_description(int index) {
    const auto& presets = builtin_presets();
    if (index < 0 || index >= static_cast<int>(presets.size())) return nullptr;
    return presets[static_cast<std::size_t>(index)].description.c_str();
}

mvanc_config* mvanc_config_from_preset(const char* name) {
    return wrap_ptr([&]() -> mvanc_config* {
        if (!name) throw ConfigError("preset name is null");
        const ExperimentConfig* p = find_preset(name);
        if (!p) throw ConfigError("unknown preset '" + std::string(name) + "'");
        return new mvanc_config_s{*p};
    });
}

mvanc_config* mvanc_config_from_file(const char* path) {
    return wrap_ptr([&]() -> mvanc_config* {
        if (!path) throw ConfigError("config path is null");
        return new mvanc_config_s{load_config_file(path)};
    });
}

mvanc_config* mvanc_config_default(void) {
    return wrap_ptr([]() -> mvanc_config* { return new mvanc_config_s{ExperimentConfig{}}; });
}

mvanc_status mvanc_config_set(mvanc_config* cfg, const char* key, const char* value) {
    return wrap_status([&]() {
        if (!cfg || !key || !value) throw ConfigError("null argument to mvanc_config_set");
        const std::string k = key, v = value;
        if (k == "seed") {
            cfg->cfg.seed = std::stoull(v);
        } else if (k == "samples") {
            const long n = std::stol(v);
            if (n < 1) throw ConfigError("samples must be >= 1");
            cfg->cfg.samples_tuning = cfg->cfg.samples_aux = cfg->cfg.samples_control = n;
        } else if (k == "algorithm") {
            cfg->cfg.algorithms = {algorithm_from_name(v)};
        } else if (k == "mu-scale") {
            const double s = std::stod(v);
            if (!(s > 0.0)) throw ConfigError("mu-scale must be > 0");
            cfg->cfg.mu_scale = s;
        } else if (k == "trace-stride") {
            const long s = std::stol(v);
            if (s < 1) throw ConfigError("trace-stride must be >= 1");
            cfg->cfg.trace_stride = s;
        } else if (k == "name") {
            cfg->cfg.name = v;
        } else {
            throw ConfigError("unknown config key '" + k + "'");
        }
    });
}

char* mvanc_config_to_json(const mvanc_config* cfg) {
    return wrap_ptr([&]() -> char* {
        if (!cfg) throw ConfigError("null config");
        return dup_string(config_to_json(cfg->cfg));
    });
}

void mvanc_config_free(mvanc_config* cfg) { delete cfg; }

void mvanc_string_free(char* s) { delete[] s; }

mvanc_plant* mvanc_plant_synth(const mvanc_config* cfg) {
    return wrap_ptr([&]() -> mvanc_plant* {
        if (!cfg) throw ConfigError("null config");
        return new mvanc_plant_s{synth_pathset(cfg->cfg.dims, cfg->cfg.plant_config())};
    });
}

mvanc_plant* mvanc_plant_load(const char* path) {
    return wrap_ptr([&]() -> mvanc_plant* {
        if (!path) throw ConfigError("plant path is null");
        return new mvanc_plant_s{load_pathset(path)};
    });
}

mvanc_status mvanc_plant_save(const mvanc_plant* plant, const char* path) {
    return wrap_status([&]() {
        if (!plant || !path) throw ConfigError("null argument to mvanc_plant_save");
        save_pathset(path, plant->plant);
    });
}

void mvanc_plant_free(mvanc_plant* plant) { delete plant; }

mvanc_result* mvanc_run(const mvanc_config* cfg, const mvanc_plant* plant, const char* out_dir,
                        int threads) {
    return wrap_ptr([&]() -> mvanc_result* {
        if (!cfg) throw ConfigError("null config");
        const std::string dir = out_dir ? out_dir : "";
        if (threads < 1) threads = 1;
        ExperimentResult r =
            plant ? run_experiment_with_plant(cfg->cfg, plant->plant, dir, threads)
                  : run_experiment(cfg->cfg, dir, threads);
        return new mvanc_result_s{std::move(r)};
    });
}

int mvanc_result_run_count(const mvanc_result* res) {
    return res ? static_cast<int>(res->result.runs.size()) : 0;
}

const char* mvanc_result_algorithm(const mvanc_result* res, int run_index) {
    if (!res || run_index < 0 || run_index >= static_cast<int>(res->result.runs.size()))
        return nullptr;
    const Algorithm a = res->result.runs[static_cast<std::size_t>(run_index)].algorithm;
    return a == Algorithm::mcalms ? "mcalms" : "mcfxlms";
}

namespace {

mvanc_status copy_nr(const mvanc_result* res, int run_index, bool control, double* out, int cap,
                     int* count) {
    return wrap_status([&]() {
        if (!res || !out || !count) throw ConfigError("null argument");
        if (run_index < 0 || run_index >= static_cast<int>(res->result.runs.size()))
            throw ConfigError("run index out of range");
        const auto& run = res->result.runs[static_cast<std::size_t>(run_index)];
        const auto& v = control ? run.control_nr_db : run.tuning_nr_db;
        *count = static_cast<int>(v.size());
        for (int i = 0; i < cap && i < *count; ++i) out[i] = v[static_cast<std::size_t>(i)];
    });
}

} // namespace

mvanc_status mvanc_result_control_nr(const mvanc_result* res, int run_index, double* out, int cap,
                                     int* count) {
    return copy_nr(res, run_index, true, out, cap, count);
}

mvanc_status mvanc_result_tuning_nr(const mvanc_result* res, int run_index, double* out, int cap,
                                    int* count) {
    return copy_nr(res, run_index, false, out, cap, count);
}

mvanc_status mvanc_result_metric(const mvanc_result* res, const char* name, double* out) {
    return wrap_status([&]() {
        if (!res || !name || !out) throw ConfigError("null argument");
        auto it = res->result.metrics.find(name);
        if (it == res->result.metrics.end())
            throw ConfigError("unknown metric '" + std::string(name) + "'");
        *out = it->second;
    });
}

char* mvanc_result_summary(const mvanc_result* res) {
    return wrap_ptr([&]() -> char* {
        if (!res) throw ConfigError("null result");
        return dup_string(res->result.summary_text);
    });
}

int mvanc_result_expectations_failed(const mvanc_result* res) {
    if (!res) return 0;
    int failed = 0;
    for (const auto& [e, pass] : res->result.expectation_results)
        if (!pass) ++failed;
    return failed;
}

void mvanc_result_free(mvanc_result* res) { delete res; }

namespace {

mvanc_status ops_common(bool fxlms, int64_t refs, int64_t sources, int64_t phys_mics,
                        int64_t control_taps, int64_t aux_taps, int64_t model_taps,
                        uint64_t* mults, uint64_t* adds) {
    return wrap_status([&]() {
        if (!mults || !adds) throw ConfigError("null output pointer");
        ComplexityParams p;
        p.refs = refs;
        p.sources = sources;
        p.phys_mics = phys_mics;
        p.control_taps = control_taps;
        p.aux_taps = aux_taps;
        p.model_taps = model_taps;
        const OpCount c = fxlms ? ops_mcfxlms(p) : ops_mcalms(p);
        *mults = c.multiplications;
        *adds = c.additions;
    });
}

} // namespace

mvanc_status mvanc_ops_mcfxlms(int64_t refs, int64_t sources, int64_t phys_mics,
                               int64_t control_taps, int64_t aux_taps, int64_t model_taps,
                               uint64_t* mults, uint64_t* adds) {
    return ops_common(true, refs, sources, phys_mics, control_taps, aux_taps, model_taps, mults,
                      adds);
}

mvanc_status mvanc_ops_mcalms(int64_t refs, int64_t sources, int64_t phys_mics,
                              int64_t control_taps, int64_t aux_taps, int64_t model_taps,
                              uint64_t* mults, uint64_t* adds) {
    return ops_common(false, refs, sources, phys_mics, control_taps, aux_taps, model_taps, mults,
                      adds);
}

mvanc_status mvanc_complexity_report(int64_t control_taps, int64_t aux_taps, int64_t model_taps,
                                     int ch_max, const char* out_dir) {
    return wrap_status([&]() {
        if (!out_dir) throw ConfigError("null out_dir");
        complexity_report(control_taps, aux_taps, model_taps, ch_max, out_dir);
    });
}

mvanc_status mvanc_spectrum_report(const char* const* snapshot_paths, int n_paths,
                                   double band_low, double band_high, double sample_rate,
                                   const char* out_dir) {
    return wrap_status([&]() {
        if (!snapshot_paths || n_paths < 1 || !out_dir)
            throw ConfigError("spectrum report needs snapshots and an output dir");
        std::vector<std::string> paths;
        for (int i = 0; i < n_paths; ++i) {
            if (!snapshot_paths[i]) throw ConfigError("null snapshot path");
            paths.emplace_back(snapshot_paths[i]);
        }
        spectrum_report(paths, band_low, band_high, sample_rate, out_dir);
    });
}

} // extern "C"
