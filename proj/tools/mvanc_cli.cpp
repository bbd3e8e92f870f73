// SPDX-License-Identifier: Apache-2.0
//
// Command-line harness for the MVANC simulation library. Talks to the core
// exclusively through the C API in mvanc/mvanc.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <mvanc/mvanc.h>

namespace {

int fail(mvanc_status status) {
    std::fprintf(stderr, "error: %s\n", mvanc_last_error());
    return static_cast<int>(status == MVANC_OK ? MVANC_ERR_INTERNAL : status);
}

std::string default_out_root() {
    const char* env = std::getenv("MVANC_OUT_ROOT");
    return env && *env ? env : "out";
}

struct ConfigDeleter {
    void operator()(mvanc_config* c) const { mvanc_config_free(c); }
};
struct PlantDeleter {
    void operator()(mvanc_plant* p) const { mvanc_plant_free(p); }
};
struct ResultDeleter {
    void operator()(mvanc_result* r) const { mvanc_result_free(r); }
};

using ConfigPtr = std::unique_ptr<mvanc_config, ConfigDeleter>;
using PlantPtr = std::unique_ptr<mvanc_plant, PlantDeleter>;
using ResultPtr = std::unique_ptr<mvanc_result, ResultDeleter>;

ConfigPtr resolve_config(const std::string& preset_or_path) {
    // Anything that exists on disk is a config file; otherwise it must name a
    // preset, and an unknown name is a usage error.
    if (std::filesystem::exists(preset_or_path))
        return ConfigPtr(mvanc_config_from_file(preset_or_path.c_str()));
    return ConfigPtr(mvanc_config_from_preset(preset_or_path.c_str()));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MVANC simulation harness (adjoint-LMS virtual-sensing ANC)"};
    app.require_subcommand(1);

    // run
    std::string run_target, run_out, run_algorithm, run_plant;
    std::string run_seed, run_samples, run_mu_scale;
    int run_threads = 1;
    auto* run = app.add_subcommand("run", "run a preset or config file end to end");
    run->add_option("target", run_target, "preset name or JSON config path")->required();
    run->add_option("--out", run_out, "output directory (default $MVANC_OUT_ROOT or ./out)");
    run->add_option("--seed", run_seed, "override the master seed");
    run->add_option("--samples", run_samples, "override the per-stage sample budget");
    run->add_option("--algorithm", run_algorithm, "mcalms|mcfxlms (replaces the preset's list)");
    run->add_option("--mu-scale", run_mu_scale, "scale all resolved step sizes");
    run->add_option("--plant", run_plant, "load a plant snapshot instead of synthesizing");
    run->add_option("--threads", run_threads, "fan algorithm runs out over worker threads");

    // complexity
    std::int64_t cx_nx = 512, cx_nh = 128, cx_l = 256;
    int cx_chmax = 10;
    std::string cx_out;
    auto* cx = app.add_subcommand("complexity", "closed-form operation-count sweep");
    cx->add_option("--nx", cx_nx, "control filter taps (default 512)");
    cx->add_option("--nh", cx_nh, "auxiliary filter taps (default 128)");
    cx->add_option("--l", cx_l, "secondary path model taps (default 256)");
    cx->add_option("--ch-max", cx_chmax, "sweep channels 1..ch_max (default 10)");
    cx->add_option("--out", cx_out, "output directory");

    // spectrum
    std::vector<std::string> sp_snapshots;
    double sp_lo = 800.0, sp_hi = 1800.0, sp_rate = 16000.0;
    std::string sp_out;
    auto* sp = app.add_subcommand("spectrum", "magnitude responses of filter-bank snapshots");
    sp->add_option("snapshots", sp_snapshots, "bank snapshot files (overlaid in the plot)")
        ->required();
    sp->add_option("--band-low", sp_lo, "band annotation low edge, Hz");
    sp->add_option("--band-high", sp_hi, "band annotation high edge, Hz");
    sp->add_option("--rate", sp_rate, "sample rate, Hz (default 16000)");
    sp->add_option("--out", sp_out, "output directory");

    // show-config
    std::string sc_target;
    auto* sc = app.add_subcommand("show-config", "print a preset/config as JSON");
    sc->add_option("target", sc_target, "preset name or config path (default: built-in defaults)");

    // list-presets
    auto* lp = app.add_subcommand("list-presets", "list built-in experiment presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : MVANC_ERR_USAGE;
    }

    if (lp->parsed()) {
        for (int i = 0; i < mvanc_preset_count(); ++i)
            std::printf("%-22s %s\n", mvanc_preset_name(i), mvanc_preset_description(i));
        return 0;
    }

    if (sc->parsed()) {
        ConfigPtr cfg;
        if (sc_target.empty())
            cfg.reset(mvanc_config_default());
        else
            cfg = resolve_config(sc_target);
        if (!cfg) return fail(mvanc_last_status());
        char* json = mvanc_config_to_json(cfg.get());
        if (!json) return fail(mvanc_last_status());
        std::fputs(json, stdout);
        mvanc_string_free(json);
        return 0;
    }

    if (cx->parsed()) {
        const std::string out = cx_out.empty() ? default_out_root() + "/complexity" : cx_out;
        const mvanc_status st =
            mvanc_complexity_report(cx_nx, cx_nh, cx_l, cx_chmax, out.c_str());
        if (st != MVANC_OK) return fail(st);
        std::printf("complexity sweep written to %s\n", out.c_str());
        return 0;
    }

    if (sp->parsed()) {
        const std::string out = sp_out.empty() ? default_out_root() + "/spectrum" : sp_out;
        std::vector<const char*> paths;
        for (const auto& s : sp_snapshots) paths.push_back(s.c_str());
        const mvanc_status st = mvanc_spectrum_report(paths.data(),
                                                      static_cast<int>(paths.size()), sp_lo,
                                                      sp_hi, sp_rate, out.c_str());
        if (st != MVANC_OK) return fail(st);
        std::printf("spectrum report written to %s\n", out.c_str());
        return 0;
    }

    // run
    ConfigPtr cfg = resolve_config(run_target);
    if (!cfg) return fail(mvanc_last_status());

    const std::vector<std::pair<const char*, std::string*>> overrides = {
        {"seed", &run_seed},
        {"samples", &run_samples},
        {"algorithm", &run_algorithm},
        {"mu-scale", &run_mu_scale},
    };
    for (const auto& [key, value] : overrides) {
        if (value->empty()) continue;
        const mvanc_status st = mvanc_config_set(cfg.get(), key, value->c_str());
        if (st != MVANC_OK) return fail(st);
    }

    PlantPtr plant;
    if (!run_plant.empty()) {
        plant.reset(mvanc_plant_load(run_plant.c_str()));
        if (!plant) return fail(mvanc_last_status());
    }

    const std::string out = run_out.empty() ? default_out_root() : run_out;
    ResultPtr result(mvanc_run(cfg.get(), plant.get(), out.c_str(), run_threads));
    if (!result) return fail(mvanc_last_status());

    char* summary = mvanc_result_summary(result.get());
    if (summary) {
        std::fputs(summary, stdout);
        mvanc_string_free(summary);
    }
    const int failed = mvanc_result_expectations_failed(result.get());
    if (failed > 0)
        std::printf("\n%d expectation(s) did not hold; see summary above.\n", failed);
    std::printf("artifacts written to %s\n", out.c_str());
    return 0;
}
