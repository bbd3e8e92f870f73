// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/dsp.hpp"
#include "core/types.hpp"

namespace mvanc {

enum class NoiseDistribution { gaussian, uniform };

// A seeded band-limited noise source. Same spec + same seed reproduces the
// sequence bit for bit on any platform.
struct NoiseSpec {
    NoiseDistribution dist = NoiseDistribution::gaussian;
    double f_low = 800.0;
    double f_high = 1800.0;
    double sample_rate = 16000.0;
    std::uint64_t seed = 0;
    std::optional<double> snr_db; // reference-sensor noise; absent = clean
    // Band-shaping filter length; default scales with bandwidth so the
    // transition skirts stay a small fraction of the band.
    std::optional<int> shaper_taps;

    void validate() const {
        if (!(f_low > 0.0 && f_low < f_high && f_high < sample_rate / 2.0))
            throw ConfigError("noise band must satisfy 0 < f_low < f_high < sample_rate/2");
    }
};

// The full synthetic plant: primary paths from references to both microphone
// sets, true secondary paths, and the controller-side path models. The
// estimated banks default to exact (zero-padded) copies of the true ones.
struct PathSet {
    SystemDims dims;
    double sample_rate = 16000.0;
    FilterBank primary_physical;       // M x J
    FilterBank primary_virtual;        // Q x J
    FilterBank secondary_physical;     // M x K, true plant
    FilterBank secondary_physical_est; // M x K, model of length L
    FilterBank secondary_virtual;      // Q x K, true plant
    FilterBank secondary_virtual_est;  // Q x K, model of length L

    int model_taps() const { return secondary_physical_est.tap_len(); }
    void validate() const;
};

struct PlantConfig {
    double f_low = 500.0;
    double f_high = 5000.0;
    double sample_rate = 16000.0;
    int primary_taps = 128;
    int secondary_taps = 32;
    int secondary_model_taps = 32; // L; true responses are zero-padded into it
    std::uint64_t seed = 1;
    // Max per-tap gain deviation (dB) applied to the estimated banks; absent
    // or 0 leaves them exact copies.
    std::optional<double> estimate_perturb_db;
    // Level of the virtual-microphone disturbance component the secondary
    // sources cannot produce. The quiet zone sits in front of the sources,
    // so the primary field there is dominated by source-reachable sound;
    // this floor is what ultimately caps the attainable noise reduction.
    double unreachable_db = -40.0;
    // Physical microphones are placement-constrained: they hear the same
    // source-coherent field scaled down (gain), a per-microphone coupling
    // spread (the sources cannot satisfy all of them at once), and a larger
    // unreachable remainder.
    double physical_coupling_gain = 0.5;
    double physical_coupling_spread = 0.1;
    double physical_unreachable_db = -25.0;
};

// Windowed-sinc bandpass with a seeded random delay and band-edge jitter so
// distinct paths built from distinct seeds differ. Peak magnitude is
// normalized to exactly 1, which keeps the passband inside the +0/-6 dB mask
// for n_taps >= 128.
FirFilter design_bandpass_fir(double f_low, double f_high, double sample_rate, int n_taps,
                              std::uint64_t seed);

// Unit-variance white noise: gaussian N(0,1) or uniform on [-sqrt(3), sqrt(3)].
std::vector<double> generate_white(NoiseDistribution dist, long n_samples, std::uint64_t seed);

// White noise shaped by the spec's bandpass. Streaming convolution with zero
// initial state, so the first few samples carry the filter transient.
std::vector<double> generate_noise(const NoiseSpec& spec, long n_samples);

// clean + white gaussian scaled so the realized SNR over the whole vector is
// exactly snr_db. An infinite snr_db passes the input through untouched.
std::vector<double> add_measurement_noise(const std::vector<double>& clean, double snr_db,
                                          std::uint64_t seed);

PathSet synth_pathset(const SystemDims& dims, const PlantConfig& config);

// Magnitude response |H(f)| at a single frequency, direct evaluation.
double fir_magnitude_at(const FirFilter& filter, double freq_hz, double sample_rate);

} // namespace mvanc
