// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "core/acoustics.hpp"
#include "core/snapshot.hpp"
#include "support/oracles.hpp"

using namespace mvanc;

namespace {
double mag_at(const FirFilter& f, double hz) { return fir_magnitude_at(f, hz, 16000.0); }
} // namespace

TEST_CASE("bandpass design meets the magnitude mask at 128 taps") {
    const FirFilter f = design_bandpass_fir(500.0, 5000.0, 16000.0, 128, 12345);
    // passband: +0/-6 dB of unity over [f_low + 10% BW, f_high - 10% BW]
    for (double hz = 950.0; hz <= 4550.0; hz += 25.0) {
        const double db = 20.0 * std::log10(mag_at(f, hz));
        CHECK(db <= 1e-6);
        CHECK(db >= -6.0);
    }
    // stopband: <= -20 dB outside [0.5 f_low, 1.5 f_high]
    for (double hz = 10.0; hz <= 250.0; hz += 20.0)
        CHECK(20.0 * std::log10(mag_at(f, hz) + 1e-12) <= -20.0);
    for (double hz = 7500.0; hz <= 7990.0; hz += 40.0)
        CHECK(20.0 * std::log10(mag_at(f, hz) + 1e-12) <= -20.0);
}

TEST_CASE("bandpass design is seed-deterministic and seed-sensitive") {
    const FirFilter a1 = design_bandpass_fir(500.0, 5000.0, 16000.0, 64, 7);
    const FirFilter a2 = design_bandpass_fir(500.0, 5000.0, 16000.0, 64, 7);
    const FirFilter b = design_bandpass_fir(500.0, 5000.0, 16000.0, 64, 8);
    CHECK(a1.taps() == a2.taps());
    CHECK(a1.taps() != b.taps());
}

TEST_CASE("bandpass design rejects invalid bands") {
    CHECK_THROWS_AS((void)design_bandpass_fir(0.0, 5000.0, 16000.0, 64, 1), ConfigError);
    CHECK_THROWS_AS((void)design_bandpass_fir(900.0, 800.0, 16000.0, 64, 1), ConfigError);
    CHECK_THROWS_AS((void)design_bandpass_fir(500.0, 9000.0, 16000.0, 64, 1), ConfigError);
    CHECK_THROWS_AS((void)design_bandpass_fir(500.0, 5000.0, 16000.0, 4, 1), ConfigError);
}

TEST_CASE("white noise statistics before shaping") {
    const long n = 100000;
    const auto g = generate_white(NoiseDistribution::gaussian, n, 99);
    double mean = 0.0, var = 0.0;
    for (double x : g) mean += x;
    mean /= static_cast<double>(n);
    for (double x : g) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    CHECK(std::fabs(mean) <= 0.02);
    CHECK(std::fabs(var - 1.0) <= 0.03);

    const auto u = generate_white(NoiseDistribution::uniform, n, 99);
    const double bound = std::sqrt(3.0) + 1e-12;
    double umean = 0.0, uvar = 0.0;
    for (double x : u) {
        CHECK(std::fabs(x) <= bound);
        umean += x;
    }
    umean /= static_cast<double>(n);
    for (double x : u) uvar += (x - umean) * (x - umean);
    uvar /= static_cast<double>(n);
    CHECK(std::fabs(umean) <= 0.02);
    CHECK(std::fabs(uvar - 1.0) <= 0.03);
}

TEST_CASE("shaped noise concentrates its spectrum in the requested band") {
    NoiseSpec spec;
    spec.dist = NoiseDistribution::gaussian;
    spec.f_low = 800.0;
    spec.f_high = 1800.0;
    spec.sample_rate = 16000.0;
    spec.seed = 5;
    const auto x = generate_noise(spec, 100000);
    const auto psd = oracle::welch_psd(x, 16000.0);

    double in_band = 0.0;
    long in_count = 0;
    double out_max = 0.0;
    for (std::size_t k = 0; k < psd.freq_hz.size(); ++k) {
        const double f = psd.freq_hz[k];
        if (f >= 800.0 && f <= 1800.0) {
            in_band += psd.power[k];
            ++in_count;
        } else if (f < 400.0 || f > 2700.0) {
            out_max = std::max(out_max, psd.power[k]);
        }
    }
    in_band /= static_cast<double>(in_count);
    CHECK(10.0 * std::log10(out_max / in_band) <= -20.0);
}

TEST_CASE("noise generation is bit-deterministic in the spec") {
    NoiseSpec spec;
    spec.f_low = 800.0;
    spec.f_high = 1800.0;
    spec.sample_rate = 16000.0;
    spec.seed = 77;
    const auto a = generate_noise(spec, 4096);
    const auto b = generate_noise(spec, 4096);
    CHECK(a == b);
}

TEST_CASE("measurement noise hits the requested SNR") {
    NoiseSpec spec;
    spec.f_low = 500.0;
    spec.f_high = 5000.0;
    spec.sample_rate = 16000.0;
    spec.seed = 3;
    const auto clean = generate_noise(spec, 50000);

    auto measured_snr = [&](const std::vector<double>& noisy) {
        double pc = 0.0, pn = 0.0;
        for (std::size_t i = 0; i < clean.size(); ++i) {
            pc += clean[i] * clean[i];
            const double w = noisy[i] - clean[i];
            pn += w * w;
        }
        return 10.0 * std::log10(pc / pn);
    };

    const auto at40 = add_measurement_noise(clean, 40.0, 11);
    CHECK(measured_snr(at40) == doctest::Approx(40.0).epsilon(0.0025)); // within 0.1 dB

    const auto at0 = add_measurement_noise(clean, 0.0, 12);
    double pc = 0.0, pn = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        pc += clean[i] * clean[i];
        const double w = at0[i] - clean[i];
        pn += w * w;
    }
    CHECK(std::fabs(pn / pc - 1.0) <= 0.02);

    const auto passthrough =
        add_measurement_noise(clean, std::numeric_limits<double>::infinity(), 13);
    CHECK(passthrough == clean);

    const std::vector<double> silent(128, 0.0);
    CHECK_THROWS_AS((void)add_measurement_noise(silent, 40.0, 1), ConfigError);
}

TEST_CASE("synthesized plant has the 4x2x4 bank shapes") {
    SystemDims dims{4, 2, 4, 4};
    PlantConfig cfg;
    const PathSet ps = synth_pathset(dims, cfg);
    CHECK(ps.primary_physical.rows() == 4);
    CHECK(ps.primary_physical.cols() == 4);
    CHECK(ps.primary_virtual.rows() == 4);
    CHECK(ps.primary_virtual.cols() == 4);
    CHECK(ps.secondary_physical.rows() == 4);
    CHECK(ps.secondary_physical.cols() == 2);
    CHECK(ps.secondary_virtual.rows() == 4);
    CHECK(ps.secondary_virtual.cols() == 2);
    CHECK(ps.secondary_physical_est.rows() == 4);
    CHECK(ps.secondary_virtual_est.cols() == 2);
}

TEST_CASE("estimated banks default to exact copies of the true paths") {
    SystemDims dims{2, 2, 2, 2};
    PlantConfig cfg;
    const PathSet ps = synth_pathset(dims, cfg);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            CHECK(ps.secondary_physical_est.at(r, c).taps() ==
                  ps.secondary_physical.at(r, c).taps());
            CHECK(ps.secondary_virtual_est.at(r, c).taps() ==
                  ps.secondary_virtual.at(r, c).taps());
        }
}

TEST_CASE("zero-padded model length keeps the estimates exact") {
    SystemDims dims{1, 1, 1, 1};
    PlantConfig cfg;
    cfg.secondary_taps = 16;
    cfg.secondary_model_taps = 48;
    const PathSet ps = synth_pathset(dims, cfg);
    const FirFilter& truth = ps.secondary_physical.at(0, 0);
    const FirFilter& est = ps.secondary_physical_est.at(0, 0);
    CHECK(est.length() == 48);
    for (int i = 0; i < 16; ++i) CHECK(est[i] == truth[i]);
    for (int i = 16; i < 48; ++i) CHECK(est[i] == 0.0);
}

TEST_CASE("a zero-dB perturbation knob equals no perturbation") {
    SystemDims dims{2, 1, 2, 2};
    PlantConfig off;
    PlantConfig zero;
    zero.estimate_perturb_db = 0.0;
    const PathSet a = synth_pathset(dims, off);
    const PathSet b = synth_pathset(dims, zero);
    for (int r = 0; r < 2; ++r)
        CHECK(a.secondary_physical_est.at(r, 0).taps() == b.secondary_physical_est.at(r, 0).taps());

    PlantConfig loud;
    loud.estimate_perturb_db = 3.0;
    const PathSet c = synth_pathset(dims, loud);
    CHECK(c.secondary_physical_est.at(0, 0).taps() != a.secondary_physical_est.at(0, 0).taps());
}

TEST_CASE("plant synthesis is deterministic and paths are decorrelated") {
    SystemDims dims{2, 2, 2, 2};
    PlantConfig cfg;
    const PathSet a = synth_pathset(dims, cfg);
    const PathSet b = synth_pathset(dims, cfg);
    CHECK(a.primary_physical.at(1, 1).taps() == b.primary_physical.at(1, 1).taps());
    CHECK(a.secondary_virtual.at(0, 1).taps() == b.secondary_virtual.at(0, 1).taps());

    CHECK(a.secondary_physical.at(0, 0).taps() != a.secondary_physical.at(0, 1).taps());
    CHECK(a.primary_virtual.at(0, 0).taps() != a.primary_virtual.at(1, 0).taps());
    CHECK(a.primary_physical.all_finite());
    CHECK(a.primary_virtual.all_finite());
}

TEST_CASE("plant snapshot round-trips exactly through the text schema") {
    SystemDims dims{2, 1, 2, 2};
    PlantConfig cfg;
    cfg.primary_taps = 48;
    cfg.secondary_taps = 12;
    cfg.secondary_model_taps = 12;
    const PathSet ps = synth_pathset(dims, cfg);

    std::stringstream buf;
    write_pathset(buf, ps);
    const PathSet back = read_pathset(buf);

    CHECK(back.dims.refs == ps.dims.refs);
    CHECK(back.sample_rate == ps.sample_rate);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(back.primary_physical.at(r, c).taps() == ps.primary_physical.at(r, c).taps());
    for (int r = 0; r < 2; ++r)
        CHECK(back.secondary_virtual_est.at(r, 0).taps() ==
              ps.secondary_virtual_est.at(r, 0).taps());

    // byte-identical re-export
    std::stringstream again;
    write_pathset(again, back);
    CHECK(again.str() == buf.str());
}
