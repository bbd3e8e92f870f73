// SPDX-License-Identifier: Apache-2.0
#include "core/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "core/rng.hpp"

namespace mvanc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Number of grid points used to locate the peak magnitude for normalization.
constexpr int kNormGrid = 4096;

double magnitude_at_normalized(const std::vector<double>& taps, double w) {
    // w in radians/sample
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < taps.size(); ++i)
        acc += taps[i] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(i)));
    return std::abs(acc);
}

} // namespace

double fir_magnitude_at(const FirFilter& filter, double freq_hz, double sample_rate) {
    return magnitude_at_normalized(filter.taps(), 2.0 * kPi * freq_hz / sample_rate);
}

FirFilter design_bandpass_fir(double f_low, double f_high, double sample_rate, int n_taps,
                              std::uint64_t seed) {
    if (!(f_low > 0.0 && f_low < f_high && f_high < sample_rate / 2.0))
        throw ConfigError("design_bandpass_fir: invalid band");
    if (n_taps < 8) throw ConfigError("design_bandpass_fir: n_taps must be >= 8");

    Rng rng(seed);

    // Seeded decorrelation: a small leading delay plus +-2% band-edge jitter.
    // All filters for one nominal (band, n_taps) share the same effective
    // sinc length so a bank stays homogeneous.
    const int max_delay = std::min(12, n_taps / 8);
    const int delay = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_delay)));
    double lo = f_low * (1.0 + rng.uniform_sym(0.02));
    double hi = f_high * (1.0 + rng.uniform_sym(0.02));
    lo = std::max(lo, 1e-3);
    hi = std::min(hi, 0.4999 * sample_rate);
    if (lo >= hi) { lo = f_low; hi = f_high; }

    const int n_eff = n_taps - max_delay;
    const double w_lo = 2.0 * kPi * lo / sample_rate;
    const double w_hi = 2.0 * kPi * hi / sample_rate;
    const double center = 0.5 * (n_eff - 1);

    std::vector<double> proto(static_cast<std::size_t>(n_eff), 0.0);
    for (int i = 0; i < n_eff; ++i) {
        const double t = static_cast<double>(i) - center;
        double ideal;
        if (std::abs(t) < 1e-12) {
            ideal = (w_hi - w_lo) / kPi;
        } else {
            ideal = (std::sin(w_hi * t) - std::sin(w_lo * t)) / (kPi * t);
        }
        // Hann window
        const double win =
            n_eff > 1 ? 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                              static_cast<double>(n_eff - 1)))
                      : 1.0;
        proto[static_cast<std::size_t>(i)] = ideal * win;
    }

    // Peak-normalize so the passband sits in (-6 dB, 0 dB].
    double peak = 0.0;
    for (int g = 0; g < kNormGrid; ++g) {
        const double w = kPi * static_cast<double>(g) / static_cast<double>(kNormGrid - 1);
        peak = std::max(peak, magnitude_at_normalized(proto, w));
    }
    if (peak <= 0.0) throw ConfigError("design_bandpass_fir: degenerate design");
    for (auto& t : proto) t /= peak;

    std::vector<double> taps(static_cast<std::size_t>(n_taps), 0.0);
    for (int i = 0; i < n_eff; ++i)
        taps[static_cast<std::size_t>(i + delay)] = proto[static_cast<std::size_t>(i)];
    return FirFilter(std::move(taps));
}

std::vector<double> generate_white(NoiseDistribution dist, long n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw ConfigError("generate_white: n_samples must be >= 1");
    Rng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(n_samples));
    if (dist == NoiseDistribution::gaussian) {
        for (auto& x : out) x = rng.gaussian();
    } else {
        const double bound = std::sqrt(3.0); // zero mean, unit variance
        for (auto& x : out) x = rng.uniform_sym(bound);
    }
    return out;
}

std::vector<double> generate_noise(const NoiseSpec& spec, long n_samples) {
    spec.validate();
    if (n_samples < 1) throw ConfigError("generate_noise: n_samples must be >= 1");

    const auto white = generate_white(spec.dist, n_samples, mix_seed(spec.seed, 0x11, 0));
    // Shaper length scales with bandwidth so the transition skirts stay a
    // small fraction of the band; skirt energy is what the adaptive stages
    // can only fix slowly, so it sets their practical floor.
    const double bw = spec.f_high - spec.f_low;
    const int shaper_taps =
        spec.shaper_taps.value_or(
            std::clamp(static_cast<int>(15.5 * spec.sample_rate / bw), 256, 2560));
    if (shaper_taps < 8) throw ConfigError("generate_noise: shaper_taps must be >= 8");
    const FirFilter shaper = design_bandpass_fir(spec.f_low, spec.f_high, spec.sample_rate,
                                                 shaper_taps, mix_seed(spec.seed, 0x12, 0));

    std::vector<double> out(white.size(), 0.0);
    const int len = shaper.length();
    for (std::size_t n = 0; n < white.size(); ++n) {
        double acc = 0.0;
        const int kmax = std::min<int>(len - 1, static_cast<int>(n));
        for (int k = 0; k <= kmax; ++k) acc += shaper[k] * white[n - static_cast<std::size_t>(k)];
        out[n] = acc;
    }
    return out;
}

std::vector<double> add_measurement_noise(const std::vector<double>& clean, double snr_db,
                                          std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return clean;
    double p_clean = 0.0;
    for (double x : clean) p_clean += x * x;
    if (!(p_clean > 0.0)) throw ConfigError("add_measurement_noise: input has zero power");
    p_clean /= static_cast<double>(clean.size());

    auto noise = generate_white(NoiseDistribution::gaussian,
                                static_cast<long>(clean.size()), seed);
    double p_noise = 0.0;
    for (double w : noise) p_noise += w * w;
    p_noise /= static_cast<double>(noise.size());

    // Scale so the realized full-vector SNR equals snr_db exactly.
    const double target = p_clean * std::pow(10.0, -snr_db / 10.0);
    const double scale = std::sqrt(target / p_noise);

    std::vector<double> out(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) out[i] = clean[i] + scale * noise[i];
    return out;
}

void PathSet::validate() const {
    dims.validate();
    auto check = [](const FilterBank& b, int rows, int cols, const char* name) {
        if (b.rows() != rows || b.cols() != cols)
            throw ConfigError(std::string("PathSet bank ") + name + " has inconsistent dimensions");
    };
    check(primary_physical, dims.phys_mics, dims.refs, "primary_physical");
    check(primary_virtual, dims.virt_mics, dims.refs, "primary_virtual");
    check(secondary_physical, dims.phys_mics, dims.sources, "secondary_physical");
    check(secondary_physical_est, dims.phys_mics, dims.sources, "secondary_physical_est");
    check(secondary_virtual, dims.virt_mics, dims.sources, "secondary_virtual");
    check(secondary_virtual_est, dims.virt_mics, dims.sources, "secondary_virtual_est");
    if (secondary_physical_est.tap_len() != secondary_virtual_est.tap_len())
        throw ConfigError("PathSet estimated banks must share one model length");
    if (secondary_physical_est.tap_len() < secondary_physical.tap_len())
        throw ConfigError("PathSet model length must cover the true secondary responses");
}

namespace {

FilterBank synth_bank(int rows, int cols, int taps, const PlantConfig& cfg, std::uint64_t bank_id) {
    FilterBank bank(rows, cols, taps);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const std::uint64_t path_seed =
                mix_seed(cfg.seed, seed_purpose::plant_path,
                         bank_id * 1000003ULL + static_cast<std::uint64_t>(r) * 1009ULL +
                             static_cast<std::uint64_t>(c));
            bank.at(r, c) = design_bandpass_fir(cfg.f_low, cfg.f_high, cfg.sample_rate, taps,
                                                path_seed);
        }
    return bank;
}

FilterBank estimate_bank(const FilterBank& truth, int model_taps, const PlantConfig& cfg,
                         std::uint64_t bank_id) {
    FilterBank est(truth.rows(), truth.cols(), model_taps);
    const double p_db = cfg.estimate_perturb_db.value_or(0.0);
    for (int r = 0; r < truth.rows(); ++r)
        for (int c = 0; c < truth.cols(); ++c) {
            Rng rng(mix_seed(cfg.seed, seed_purpose::plant_perturbation,
                             bank_id * 1000003ULL + static_cast<std::uint64_t>(r) * 1009ULL +
                                 static_cast<std::uint64_t>(c)));
            const FirFilter& t = truth.at(r, c);
            FirFilter& e = est.at(r, c);
            for (int i = 0; i < t.length(); ++i) {
                const double gain =
                    p_db == 0.0 ? 1.0 : std::pow(10.0, rng.uniform_sym(p_db) / 20.0);
                e[i] = t[i] * gain;
            }
        }
    return est;
}

} // namespace

namespace {

// primary[r][j] = sum_k secondary[r][k] * coupling[k][j] + floor * residual,
// truncated to primary_taps. The reachable part is what makes a deep quiet
// zone possible at all: a disturbance with no component in the secondary
// sources' span cannot be cancelled no matter how the filters adapt.
FilterBank compose_reachable_primary(const FilterBank& secondary, const FilterBank& coupling,
                                     const FilterBank& residual, double floor_gain,
                                     int primary_taps) {
    FilterBank primary(secondary.rows(), coupling.cols(), primary_taps);
    for (int r = 0; r < primary.rows(); ++r)
        for (int j = 0; j < primary.cols(); ++j) {
            FirFilter& p = primary.at(r, j);
            for (int k = 0; k < secondary.cols(); ++k) {
                const FirFilter& s = secondary.at(r, k);
                const FirFilter& g = coupling.at(k, j);
                for (int a = 0; a < s.length(); ++a)
                    for (int b = 0; b < g.length(); ++b) {
                        const int i = a + b;
                        if (i < primary_taps) p[i] += s[a] * g[b];
                    }
            }
            const FirFilter& res = residual.at(r, j);
            for (int i = 0; i < res.length() && i < primary_taps; ++i)
                p[i] += floor_gain * res[i];
        }
    return primary;
}

} // namespace

PathSet synth_pathset(const SystemDims& dims, const PlantConfig& config) {
    dims.validate();
    if (config.secondary_model_taps < config.secondary_taps)
        throw ConfigError("secondary_model_taps must be >= secondary_taps");
    if (config.primary_taps <= config.secondary_taps)
        throw ConfigError("primary_taps must exceed secondary_taps (causal geometry)");

    PathSet ps;
    ps.dims = dims;
    ps.sample_rate = config.sample_rate;
    ps.secondary_physical = synth_bank(dims.phys_mics, dims.sources, config.secondary_taps, config, 3);
    ps.secondary_virtual = synth_bank(dims.virt_mics, dims.sources, config.secondary_taps, config, 4);

    // Virtual microphones sit in the intended quiet zone: their disturbance
    // is mostly source-reachable (noise-to-source coupling through the same
    // band), with a small unreachable remainder.
    const int coupling_taps = config.primary_taps - config.secondary_taps + 1;
    const FilterBank coupling = synth_bank(dims.sources, dims.refs, coupling_taps, config, 5);
    const FilterBank residual_v =
        synth_bank(dims.virt_mics, dims.refs, config.primary_taps, config, 2);
    const double floor_v = std::pow(10.0, config.unreachable_db / 20.0);
    ps.primary_virtual = compose_reachable_primary(ps.secondary_virtual, coupling, residual_v,
                                                   floor_v, config.primary_taps);

    // Physical microphones hear the same source field attenuated, plus a
    // per-microphone coupling spread and a larger unreachable remainder.
    {
        const double alpha = config.physical_coupling_gain;
        const double beta = config.physical_coupling_spread;
        const double floor_p = std::pow(10.0, config.physical_unreachable_db / 20.0);
        const FilterBank residual_p =
            synth_bank(dims.phys_mics, dims.refs, config.primary_taps, config, 1);
        ps.primary_physical = FilterBank(dims.phys_mics, dims.refs, config.primary_taps);
        for (int m = 0; m < dims.phys_mics; ++m) {
            const FilterBank spread =
                synth_bank(dims.sources, dims.refs, coupling_taps, config,
                           600 + static_cast<std::uint64_t>(m));
            FilterBank mic_coupling(dims.sources, dims.refs, coupling_taps);
            for (int k = 0; k < dims.sources; ++k)
                for (int j = 0; j < dims.refs; ++j) {
                    FirFilter& g = mic_coupling.at(k, j);
                    const FirFilter& base = coupling.at(k, j);
                    const FirFilter& dev = spread.at(k, j);
                    for (int i = 0; i < coupling_taps; ++i)
                        g[i] = alpha * base[i] + beta * dev[i];
                }
            // one row at a time through the shared composition helper
            FilterBank one_row_secondary(1, dims.sources, config.secondary_taps);
            for (int k = 0; k < dims.sources; ++k)
                one_row_secondary.at(0, k) = ps.secondary_physical.at(m, k);
            FilterBank one_row_residual(1, dims.refs, config.primary_taps);
            for (int j = 0; j < dims.refs; ++j)
                one_row_residual.at(0, j) = residual_p.at(m, j);
            const FilterBank row = compose_reachable_primary(
                one_row_secondary, mic_coupling, one_row_residual, floor_p, config.primary_taps);
            for (int j = 0; j < dims.refs; ++j) ps.primary_physical.at(m, j) = row.at(0, j);
        }
    }

    ps.secondary_physical_est =
        estimate_bank(ps.secondary_physical, config.secondary_model_taps, config, 3);
    ps.secondary_virtual_est =
        estimate_bank(ps.secondary_virtual, config.secondary_model_taps, config, 4);
    ps.validate();
    return ps;
}

} // namespace mvanc
