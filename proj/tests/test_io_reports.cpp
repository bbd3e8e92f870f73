// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "core/csv.hpp"
#include "core/experiment.hpp"
#include "core/plot.hpp"
#include "core/snapshot.hpp"
#include "core/spectrum.hpp"
#include "support/oracles.hpp"

using namespace mvanc;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir(const char* tag) {
    const fs::path p = fs::temp_directory_path() / (std::string("mvanc_test_") + tag);
    fs::create_directories(p);
    return p;
}
} // namespace

TEST_CASE("filter bank snapshots round-trip exactly, including awkward values") {
    FilterBank bank(2, 3, 5);
    std::mt19937_64 rng(4);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < 5; ++i)
                bank.at(r, c)[i] = oracle::random_vector(rng, 1)[0] * std::pow(10.0, static_cast<int>(rng() % 30) - 15);
    bank.at(0, 0)[0] = 0.1 + 0.2; // classic non-representable decimal
    bank.at(1, 2)[4] = -0.0;

    std::stringstream buf;
    write_filter_bank(buf, "w_test", bank);
    std::string label;
    const FilterBank back = read_filter_bank(buf, &label);
    CHECK(label == "w_test");
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) CHECK(back.at(r, c).taps() == bank.at(r, c).taps());
}

TEST_CASE("snapshot parser reports malformed input with context") {
    std::stringstream bad1("mvanc-filterbank v2\n");
    CHECK_THROWS_AS((void)read_filter_bank(bad1), IoError);
    std::stringstream bad2("mvanc-filterbank v1\nlabel x\nrows 1\ncols 1\ntaps 2\nfilter 0 0\n1.0\nend\n");
    CHECK_THROWS_AS((void)read_filter_bank(bad2), IoError); // too few coefficients
    std::stringstream bad3("mvanc-filterbank v1\nlabel x\nrows 1\ncols 1\ntaps 1\nfilter 0 0\n1.0 2.0\nend\n");
    CHECK_THROWS_AS((void)read_filter_bank(bad3), IoError); // too many
    CHECK_THROWS_AS((void)load_filter_bank("/nonexistent/path/bank.txt"), IoError);
}

TEST_CASE("csv writer/reader round-trip with blank cells for undefined values") {
    const auto dir = temp_dir("csv");
    CsvTable t;
    t.schema = "mvanc-test v1";
    t.columns = {"a", "b"};
    t.rows = {{1.0, 2.5}, {3.0, std::nan("")}, {-0.125, 1e-9}};
    const std::string path = (dir / "t.csv").string();
    write_csv(path, t, "%.17g");
    const CsvTable back = read_csv(path);
    CHECK(back.schema == "mvanc-test v1");
    CHECK(back.columns == t.columns);
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[0][0] == 1.0);
    CHECK(back.rows[0][1] == 2.5);
    CHECK(std::isnan(back.rows[1][1]));
    CHECK(back.rows[2][1] == 1e-9);
    CHECK(back.column_index("b") == 1);
    CHECK(back.column_index("zz") == -1);
}

TEST_CASE("magnitude responses: zero filter floors, unit impulse is flat") {
    FirFilter zero(std::vector<double>{0.0, 0.0, 0.0, 0.0});
    const auto rz = magnitude_response(zero, 16000.0, 512);
    REQUIRE(rz.mag_db.size() == 512);
    CHECK(rz.freq_hz.front() == 0.0);
    CHECK(rz.freq_hz.back() == 8000.0);
    for (double db : rz.mag_db) CHECK(db == kSpectrumFloorDb);

    FirFilter impulse(std::vector<double>{1.0});
    const auto ri = magnitude_response(impulse, 16000.0, 512);
    for (double db : ri.mag_db) CHECK(db == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(mean_abs_db_difference(rz, rz, 100.0, 7000.0) == 0.0);
    CHECK(mean_band_level_db(ri, 500.0, 5000.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)mean_band_level_db(ri, 9000.0, 9100.0), ConfigError);
}

TEST_CASE("svg chart writer produces a plausible file") {
    const auto dir = temp_dir("svg");
    PlotSeries s;
    s.label = "demo";
    for (int i = 0; i < 500; ++i) {
        s.x.push_back(i);
        s.y.push_back(std::sin(0.02 * i) * 10.0 + 20.0);
    }
    PlotOptions opt;
    opt.title = "demo <chart>"; // exercises escaping
    opt.x_label = "sample";
    opt.y_label = "dB";
    const std::string path = (dir / "plot.svg").string();
    write_svg_line_chart(path, {s}, opt);
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string body = ss.str();
    CHECK(body.find("<svg") != std::string::npos);
    CHECK(body.find("polyline") != std::string::npos);
    CHECK(body.find("&lt;chart&gt;") != std::string::npos);
}

TEST_CASE("experiment config JSON round-trips every field") {
    ExperimentConfig cfg;
    cfg.name = "roundtrip";
    cfg.description = "x";
    cfg.dims = SystemDims{3, 2, 4, 5};
    cfg.control_taps = 48;
    cfg.aux_taps = 24;
    cfg.primary_taps = 40;
    cfg.secondary_taps = 12;
    cfg.secondary_model_taps = 20;
    cfg.samples_tuning = 1111;
    cfg.samples_aux = 2222;
    cfg.samples_control = 3333;
    cfg.tuning_noise = NoiseSpec{NoiseDistribution::uniform, 700.0, 1500.0, 16000.0, 0, 35.0, 208};
    cfg.control_noise = NoiseSpec{NoiseDistribution::gaussian, 800.0, 1000.0, 16000.0, 0, {}, {}};
    cfg.plant_band_low = 450.0;
    cfg.plant_band_high = 5500.0;
    cfg.seed = 99;
    cfg.plant_seed = 17;
    cfg.plant_perturb_db = 1.5;
    cfg.plant_unreachable_db = -37.0;
    cfg.plant_physical_coupling_gain = 0.44;
    cfg.plant_physical_coupling_spread = 0.2;
    cfg.plant_physical_unreachable_db = -21.0;
    cfg.algorithms = {Algorithm::mcfxlms, Algorithm::mcalms};
    cfg.mu_knobs = StepSizeKnobs{0.011, 0.022, 0.033};
    cfg.mu_explicit = StepSizes{1e-4, 2e-4, 3e-4};
    cfg.mu_scale = 0.5;
    cfg.nr_window = 777;
    cfg.trace_stride = 13;
    cfg.expectations = {{"demo", "metric.x", 1.0, 2.0}};

    const ExperimentConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.name == cfg.name);
    CHECK(back.dims.refs == 3);
    CHECK(back.dims.virt_mics == 5);
    CHECK(back.control_taps == 48);
    CHECK(back.secondary_model_taps == 20);
    CHECK(back.samples_aux == 2222);
    CHECK(back.tuning_noise.dist == NoiseDistribution::uniform);
    CHECK(back.tuning_noise.snr_db == 35.0);
    CHECK(back.tuning_noise.shaper_taps == 208);
    CHECK(!back.control_noise.snr_db.has_value());
    CHECK(back.plant_seed == 17);
    CHECK(back.plant_perturb_db == 1.5);
    CHECK(back.plant_unreachable_db == -37.0);
    CHECK(back.plant_physical_coupling_gain == 0.44);
    CHECK(back.algorithms.size() == 2);
    CHECK(back.algorithms[0] == Algorithm::mcfxlms);
    CHECK(back.mu_explicit.has_value());
    CHECK(back.mu_explicit->mu_aux == 2e-4);
    CHECK(back.mu_scale == 0.5);
    CHECK(back.trace_stride == 13);
    REQUIRE(back.expectations.size() == 1);
    CHECK(back.expectations[0].metric == "metric.x");
    CHECK(back.expectations[0].min_value == 1.0);
    CHECK(back.expectations[0].max_value == 2.0);

    CHECK_THROWS_AS((void)config_from_json("{ not json"), ConfigError);
    CHECK_THROWS_AS((void)config_from_json("{\"noise\":{\"tuning\":{\"dist\":\"pink\",\"band\":[1,2]},\"control\":{\"dist\":\"gaussian\",\"band\":[1,2]}}}"),
                    ConfigError);
}

TEST_CASE("built-in presets are unique, runnable shapes") {
    const auto& presets = builtin_presets();
    CHECK(presets.size() >= 5);
    for (std::size_t i = 0; i < presets.size(); ++i)
        for (std::size_t j = i + 1; j < presets.size(); ++j)
            CHECK(presets[i].name != presets[j].name);
    CHECK(find_preset("algorithm-comparison") != nullptr);
    CHECK(find_preset("scenario-2") != nullptr);
    CHECK(find_preset("does-not-exist") == nullptr);
    // every preset validates against its own plant
    for (const auto& p : presets) {
        const PathSet plant = synth_pathset(p.dims, p.plant_config());
        StageConfig stage = p.stage_config(p.algorithms.front());
        stage.step_sizes = StepSizes{1e-5, 1e-5, 1e-5};
        stage.validate(plant);
    }
}

TEST_CASE("trace CSV carries the schema line and the stage's channels") {
    const auto dir = temp_dir("trace");
    RunTrace trace;
    trace.samples = 100;
    trace.error_physical.assign(2, std::vector<double>(100, 1.0));
    trace.error_inner.assign(2, std::vector<double>(100, 0.5));
    NrSeries nr;
    nr.db.assign(100, std::nan(""));
    for (std::size_t i = 50; i < 100; ++i) nr.db[i] = 6.0;
    nr.first_valid = 50;
    trace.nr = {nr};
    const std::string path = (dir / "trace.csv").string();
    write_trace_csv(path, trace, 10);
    const CsvTable t = read_csv(path);
    CHECK(t.schema == "mvanc-trace v1");
    CHECK(t.columns == std::vector<std::string>{"n", "e_p_1", "e_p_2", "e_h_1", "e_h_2", "nr_1"});
    CHECK(t.rows.size() == 10);
    CHECK(std::isnan(t.rows[0][5]));
    CHECK(t.rows[9][5] == 6.0);
}

TEST_CASE("complexity report writes the sweep CSV and a log plot") {
    const auto dir = temp_dir("cx");
    complexity_report(512, 128, 256, 10, dir.string());
    const CsvTable t = read_csv((dir / "complexity_sweep.csv").string());
    CHECK(t.schema == "mvanc-complexity-sweep v1");
    CHECK(t.columns == std::vector<std::string>{"channels", "mcfxlms_mult", "mcfxlms_add",
                                                "mcalms_mult", "mcalms_add", "mult_ratio",
                                                "add_ratio"});
    REQUIRE(t.rows.size() == 10);
    CHECK(t.rows[9][1] == 781800.0);
    CHECK(t.rows[9][3] == 89610.0);
    CHECK(fs::exists(dir / "complexity_sweep.svg"));
}

TEST_CASE("spectrum report emits per-filter columns and an overlay plot") {
    const auto dir = temp_dir("spec");
    FilterBank bank(1, 2, 16);
    bank.at(0, 0)[0] = 1.0; // unit impulse
    bank.at(0, 1)[3] = 0.5;
    const std::string snap = (dir / "bank_demo.txt").string();
    save_filter_bank(snap, "demo", bank);

    const auto written = spectrum_report({snap}, 800.0, 1800.0, 16000.0, dir.string());
    REQUIRE(written.size() == 2);
    const CsvTable t = read_csv(written[0]);
    CHECK(t.schema == "mvanc-spectrum v1");
    CHECK(t.columns == std::vector<std::string>{"freq_hz", "mag_db_r1_c1", "mag_db_r1_c2"});
    CHECK(t.rows.size() == 512);
    for (const auto& row : t.rows) CHECK(row[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fs::exists(dir / "spectrum_w11.svg"));

    CHECK_THROWS_AS((void)spectrum_report({(dir / "missing.txt").string()}, 800.0, 1800.0,
                                          16000.0, dir.string()),
                    IoError);
}
