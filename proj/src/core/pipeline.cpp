// SPDX-License-Identifier: Apache-2.0
#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "core/rng.hpp"

namespace mvanc {

namespace {

// True-path side of the world: reference-to-microphone disturbances and
// source-to-microphone anti-noise, all through the plant's true banks.
class PlantSim {
public:
    explicit PlantSim(const PathSet& plant)
        : plant_(plant) {
        for (int j = 0; j < plant.dims.refs; ++j)
            ref_.emplace_back(plant.primary_physical.tap_len());
        for (int k = 0; k < plant.dims.sources; ++k)
            out_.emplace_back(plant.secondary_physical.tap_len());
    }

    void push_reference(const std::vector<double>& x_clean) {
        for (std::size_t j = 0; j < ref_.size(); ++j) ref_[j].push(x_clean[j]);
    }
    void push_outputs(const std::vector<double>& y) {
        for (std::size_t k = 0; k < out_.size(); ++k) out_[k].push(y[k]);
    }

    // d and e = d - sum_k s*y at the physical microphones.
    void sense_physical(std::vector<double>& d, std::vector<double>& e) const {
        sense(plant_.primary_physical, plant_.secondary_physical, d, e);
    }
    void sense_virtual(std::vector<double>& d, std::vector<double>& e) const {
        sense(plant_.primary_virtual, plant_.secondary_virtual, d, e);
    }

private:
    void sense(const FilterBank& primary, const FilterBank& secondary, std::vector<double>& d,
               std::vector<double>& e) const {
        const int rows = primary.rows();
        d.assign(static_cast<std::size_t>(rows), 0.0);
        e.assign(static_cast<std::size_t>(rows), 0.0);
        for (int r = 0; r < rows; ++r) {
            double dist = 0.0;
            for (int j = 0; j < primary.cols(); ++j)
                dist += ref_[static_cast<std::size_t>(j)].dot(primary.at(r, j).data(),
                                                              primary.tap_len(), 0);
            double anti = 0.0;
            for (int k = 0; k < secondary.cols(); ++k)
                anti += out_[static_cast<std::size_t>(k)].dot(secondary.at(r, k).data(),
                                                              secondary.tap_len(), 0);
            d[static_cast<std::size_t>(r)] = dist;
            e[static_cast<std::size_t>(r)] = dist - anti;
        }
    }

    const PathSet& plant_;
    std::vector<TapBuffer> ref_;
    std::vector<TapBuffer> out_;
};

struct ReferenceSet {
    std::vector<std::vector<double>> clean;  // J x n, drives the plant
    std::vector<std::vector<double>> sensed; // J x n, what the controller sees
};

ReferenceSet make_references(const StageConfig& cfg, const NoiseSpec& base,
                             std::uint64_t ref_purpose, std::uint64_t sensor_purpose, long n) {
    ReferenceSet rs;
    const int J = cfg.dims.refs;
    rs.clean.resize(static_cast<std::size_t>(J));
    rs.sensed.resize(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
        NoiseSpec spec = base;
        spec.seed = mix_seed(cfg.seed, ref_purpose, static_cast<std::uint64_t>(j));
        auto clean = generate_noise(spec, n);
        if (base.snr_db.has_value() && std::isfinite(*base.snr_db)) {
            rs.sensed[static_cast<std::size_t>(j)] = add_measurement_noise(
                clean, *base.snr_db,
                mix_seed(cfg.seed, sensor_purpose, static_cast<std::uint64_t>(j)));
        } else {
            rs.sensed[static_cast<std::size_t>(j)] = clean;
        }
        rs.clean[static_cast<std::size_t>(j)] = std::move(clean);
    }
    return rs;
}

std::vector<double> column(const std::vector<std::vector<double>>& series, long n) {
    std::vector<double> x(series.size());
    for (std::size_t j = 0; j < series.size(); ++j) x[j] = series[j][static_cast<std::size_t>(n)];
    return x;
}

void append_column(std::vector<std::vector<double>>& dst, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) dst[i].push_back(v[i]);
}

void reserve_trace(std::vector<std::vector<double>>& s, int channels, long n) {
    s.assign(static_cast<std::size_t>(channels), {});
    for (auto& c : s) c.reserve(static_cast<std::size_t>(n));
}

void require_finite_bank(const FilterBank& bank, const char* label, long sample) {
    if (!bank.all_finite())
        throw DivergenceError(std::string(label) + " contains non-finite coefficients", sample);
}

double bank_energy_max_col(const FilterBank& bank) {
    // max over sources of the total path-model energy feeding that source
    double best = 0.0;
    for (int c = 0; c < bank.cols(); ++c) {
        double sum = 0.0;
        for (int r = 0; r < bank.rows(); ++r) {
            const FirFilter& f = bank.at(r, c);
            for (int i = 0; i < f.length(); ++i) sum += f[i] * f[i];
        }
        best = std::max(best, sum);
    }
    return best;
}

} // namespace

void StageConfig::validate(const PathSet& plant) const {
    dims.validate();
    step_sizes.validate();
    tuning_noise.validate();
    control_noise.validate();
    if (control_taps < 1 || aux_taps < 1 || model_taps < 1)
        throw ConfigError("tap lengths must be >= 1");
    if (samples_tuning < control_taps || samples_control < control_taps)
        throw ConfigError("stage sample budget must cover the control-filter transient (>= N_x)");
    if (samples_aux < aux_taps)
        throw ConfigError("aux stage sample budget must be >= N_h");
    if (nr_window < 1) throw ConfigError("nr_window must be >= 1");
    plant.validate();
    if (plant.dims.refs != dims.refs || plant.dims.sources != dims.sources ||
        plant.dims.phys_mics != dims.phys_mics || plant.dims.virt_mics != dims.virt_mics)
        throw ConfigError("plant dimensions do not match the stage config");
    if (plant.model_taps() != model_taps)
        throw ConfigError("config model_taps (L) must equal the plant's estimated bank length");
    if (plant.sample_rate != tuning_noise.sample_rate ||
        plant.sample_rate != control_noise.sample_rate)
        throw ConfigError("noise and plant sample rates must agree");
}

NrSeries noise_reduction_db(const std::vector<double>& disturbance,
                            const std::vector<double>& error, int window) {
    if (disturbance.size() != error.size())
        throw ConfigError("noise_reduction_db: series lengths differ");
    if (window < 1) throw ConfigError("noise_reduction_db: window must be >= 1");

    NrSeries out;
    const std::size_t n = disturbance.size();
    out.db.assign(n, std::numeric_limits<double>::quiet_NaN());

    double sum_d = 0.0, sum_e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_d += disturbance[i] * disturbance[i];
        sum_e += error[i] * error[i];
        if (i >= static_cast<std::size_t>(window)) {
            const std::size_t drop = i - static_cast<std::size_t>(window);
            sum_d -= disturbance[drop] * disturbance[drop];
            sum_e -= error[drop] * error[drop];
        }
        if (i + 1 < static_cast<std::size_t>(window)) continue;

        const double pd = std::max(sum_d, 0.0);
        const double pe = std::max(sum_e, 0.0);
        double value;
        if (pe <= 0.0) {
            value = 80.0; // zero residual power in the window
            out.clamped = true;
        } else if (pd <= 0.0) {
            value = -80.0;
            out.clamped = true;
        } else {
            value = 10.0 * std::log10(pd / pe);
            if (value > 80.0) {
                value = 80.0;
                out.clamped = true;
            } else if (value < -80.0) {
                value = -80.0;
                out.clamped = true;
            }
        }
        if (out.first_valid < 0) out.first_valid = static_cast<long>(i);
        out.db[i] = value;
    }

    if (out.first_valid >= 0) {
        const std::size_t valid = n - static_cast<std::size_t>(out.first_valid);
        std::size_t tail = std::max<std::size_t>(1, valid / 10);
        std::vector<double> last(out.db.end() - static_cast<std::ptrdiff_t>(tail), out.db.end());
        std::sort(last.begin(), last.end());
        const std::size_t mid = last.size() / 2;
        out.steady_state_db = last.size() % 2 == 1
                                  ? last[mid]
                                  : 0.5 * (last[mid - 1] + last[mid]);
    }
    return out;
}

TuningResult run_tuning_controllers(const StageConfig& cfg, const PathSet& plant) {
    cfg.validate(plant);
    const long n_samples = cfg.samples_tuning;
    const auto refs = make_references(cfg, cfg.tuning_noise, seed_purpose::tuning_reference,
                                      seed_purpose::tuning_sensor_noise, n_samples);

    ControlState st(cfg.dims.sources, cfg.dims.refs, cfg.control_taps, cfg.model_taps,
                    cfg.dims.virt_mics);
    FxlmsState fx(cfg.dims.virt_mics, cfg.dims.sources, cfg.dims.refs, cfg.control_taps);
    PlantSim world(plant);

    TuningResult result;
    RunTrace& trace = result.trace;
    trace.samples = n_samples;
    reserve_trace(trace.disturbance_virtual, cfg.dims.virt_mics, n_samples);
    reserve_trace(trace.error_virtual, cfg.dims.virt_mics, n_samples);

    std::vector<double> d_v, e_v;
    for (long n = 0; n < n_samples; ++n) {
        try {
            st.push_references(column(refs.sensed, n));
            {
                opcount::CategoryScope plant_cat(OpCategory::plant);
                world.push_reference(column(refs.clean, n));
            }
            const auto y = control_output(st);
            {
                opcount::CategoryScope plant_cat(OpCategory::plant);
                world.push_outputs(y);
                world.sense_virtual(d_v, e_v);
            }
            st.push_errors(e_v);
            if (cfg.algorithm == Algorithm::mcalms) {
                const auto sums = adjoint_error_sums(st, plant.secondary_virtual_est);
                mcalms_step(st, sums, cfg.step_sizes.mu_tuning);
            } else {
                mcfxlms_step(st, fx, plant.secondary_virtual_est, e_v, cfg.step_sizes.mu_tuning);
            }
        } catch (const DivergenceError& err) {
            throw DivergenceError(std::string("tuning stage diverged: ") + err.what(), n);
        }
        append_column(trace.disturbance_virtual, d_v);
        append_column(trace.error_virtual, e_v);
    }

    require_finite_bank(st.weights(), "control filter bank", n_samples);
    for (int q = 0; q < cfg.dims.virt_mics; ++q)
        trace.nr.push_back(noise_reduction_db(trace.disturbance_virtual[static_cast<std::size_t>(q)],
                                              trace.error_virtual[static_cast<std::size_t>(q)],
                                              cfg.nr_window));
    trace.final_filters = st.weights();
    result.optimal = st.weights();
    return result;
}

TuningResult run_tuning_aux(const StageConfig& cfg, const PathSet& plant,
                            const FilterBank& optimal_w) {
    cfg.validate(plant);
    if (optimal_w.rows() != cfg.dims.sources || optimal_w.cols() != cfg.dims.refs ||
        optimal_w.tap_len() != cfg.control_taps)
        throw ConfigError("run_tuning_aux: optimal W bank has wrong shape");

    const long n_samples = cfg.samples_aux;
    const auto refs = make_references(cfg, cfg.tuning_noise, seed_purpose::aux_reference,
                                      seed_purpose::aux_sensor_noise, n_samples);

    ControlState st(cfg.dims.sources, cfg.dims.refs, cfg.control_taps, cfg.model_taps,
                    cfg.dims.phys_mics);
    st.weights() = optimal_w; // frozen
    AuxState aux(cfg.dims.phys_mics, cfg.dims.refs, cfg.aux_taps);
    PlantSim world(plant);

    TuningResult result;
    RunTrace& trace = result.trace;
    trace.samples = n_samples;
    reserve_trace(trace.error_physical, cfg.dims.phys_mics, n_samples);
    reserve_trace(trace.error_inner, cfg.dims.phys_mics, n_samples);

    std::vector<double> d_p, e_p;
    for (long n = 0; n < n_samples; ++n) {
        try {
            const auto sensed = column(refs.sensed, n);
            st.push_references(sensed);
            aux.push_references(sensed);
            {
                opcount::CategoryScope plant_cat(OpCategory::plant);
                world.push_reference(column(refs.clean, n));
            }
            const auto y = control_output(st);
            {
                opcount::CategoryScope plant_cat(OpCategory::plant);
                world.push_outputs(y);
                world.sense_physical(d_p, e_p);
            }
            const auto inner = aux_lms_step(aux, e_p, cfg.step_sizes.mu_aux);
            append_column(trace.error_physical, e_p);
            append_column(trace.error_inner, inner);
        } catch (const DivergenceError& err) {
            throw DivergenceError(std::string("auxiliary stage diverged: ") + err.what(), n);
        }
    }

    require_finite_bank(aux.filters(), "auxiliary filter bank", n_samples);
    for (int m = 0; m < cfg.dims.phys_mics; ++m)
        trace.nr.push_back(noise_reduction_db(trace.error_physical[static_cast<std::size_t>(m)],
                                              trace.error_inner[static_cast<std::size_t>(m)],
                                              cfg.nr_window));
    trace.final_filters = aux.filters();
    result.optimal = aux.filters();
    return result;
}

RunTrace run_control_stage(const StageConfig& cfg, const PathSet& plant, const FilterBank& h_o,
                           bool record_virtual_eval) {
    cfg.validate(plant);
    if (h_o.rows() != cfg.dims.phys_mics || h_o.cols() != cfg.dims.refs ||
        h_o.tap_len() != cfg.aux_taps)
        throw ConfigError("run_control_stage: h_o bank has wrong shape");

    const long n_samples = cfg.samples_control;
    const auto refs = make_references(cfg, cfg.control_noise, seed_purpose::control_reference,
                                      seed_purpose::control_sensor_noise, n_samples);

    // Fresh adaptation: W restarts from zero against the control-stage noise.
    ControlState st(cfg.dims.sources, cfg.dims.refs, cfg.control_taps, cfg.model_taps,
                    cfg.dims.phys_mics);
    FxlmsState fx(cfg.dims.phys_mics, cfg.dims.sources, cfg.dims.refs, cfg.control_taps);
    AuxState aux(cfg.dims.phys_mics, cfg.dims.refs, cfg.aux_taps);
    aux.filters() = h_o; // frozen throughout
    PlantSim world(plant);

    RunTrace trace;
    trace.samples = n_samples;
    reserve_trace(trace.error_physical, cfg.dims.phys_mics, n_samples);
    reserve_trace(trace.error_inner, cfg.dims.phys_mics, n_samples);
    if (record_virtual_eval) {
        reserve_trace(trace.disturbance_virtual, cfg.dims.virt_mics, n_samples);
        reserve_trace(trace.error_virtual, cfg.dims.virt_mics, n_samples);
    }

    std::vector<double> d_p, e_p, d_v, e_v;
    for (long n = 0; n < n_samples; ++n) {
        try {
            const auto sensed = column(refs.sensed, n);
            st.push_references(sensed);
            aux.push_references(sensed);
            {
                opcount::CategoryScope plant_cat(OpCategory::plant);
                world.push_reference(column(refs.clean, n));
            }
            const auto y = control_output(st);
            {
                opcount::CategoryScope plant_cat(OpCategory::plant);
                world.push_outputs(y);
                world.sense_physical(d_p, e_p);
            }
            const auto e_h = control_stage_inner_error(e_p, aux);
            st.push_errors(e_h);
            if (cfg.algorithm == Algorithm::mcalms) {
                const auto sums = adjoint_error_sums(st, plant.secondary_physical_est);
                mcalms_step(st, sums, cfg.step_sizes.mu_control);
            } else {
                mcfxlms_step(st, fx, plant.secondary_physical_est, e_h,
                             cfg.step_sizes.mu_control);
            }
            append_column(trace.error_physical, e_p);
            append_column(trace.error_inner, e_h);
            if (record_virtual_eval) {
                opcount::CategoryScope eval_cat(OpCategory::evaluation);
                world.sense_virtual(d_v, e_v);
                append_column(trace.disturbance_virtual, d_v);
                append_column(trace.error_virtual, e_v);
            }
        } catch (const DivergenceError& err) {
            throw DivergenceError(std::string("control stage diverged: ") + err.what(), n);
        }
    }

    require_finite_bank(st.weights(), "control filter bank", n_samples);
    if (record_virtual_eval) {
        for (int q = 0; q < cfg.dims.virt_mics; ++q)
            trace.nr.push_back(
                noise_reduction_db(trace.disturbance_virtual[static_cast<std::size_t>(q)],
                                   trace.error_virtual[static_cast<std::size_t>(q)],
                                   cfg.nr_window));
    }
    trace.final_filters = st.weights();
    return trace;
}

double probe_reference_power(const StageConfig& cfg, bool control_stage, long probe_samples) {
    const NoiseSpec& base = control_stage ? cfg.control_noise : cfg.tuning_noise;
    const std::uint64_t purpose =
        control_stage ? seed_purpose::control_reference : seed_purpose::tuning_reference;
    const long n = std::min(probe_samples,
                            control_stage ? cfg.samples_control : cfg.samples_tuning);
    double acc = 0.0;
    for (int j = 0; j < cfg.dims.refs; ++j) {
        NoiseSpec spec = base;
        spec.seed = mix_seed(cfg.seed, purpose, static_cast<std::uint64_t>(j));
        const auto x = generate_noise(spec, n);
        for (double v : x) acc += v * v;
    }
    return acc / (static_cast<double>(n) * static_cast<double>(cfg.dims.refs));
}

StepSizes derive_step_sizes(const StageConfig& cfg, const PathSet& plant,
                            const StepSizeKnobs& knobs) {
    const double p_tune = probe_reference_power(cfg, false);
    const double p_ctl = probe_reference_power(cfg, true);
    const double s_virt = bank_energy_max_col(plant.secondary_virtual_est);
    const double s_phys = bank_energy_max_col(plant.secondary_physical_est);
    if (p_tune <= 0.0 || p_ctl <= 0.0 || s_virt <= 0.0 || s_phys <= 0.0)
        throw ConfigError("derive_step_sizes: degenerate reference power or path energy");

    // Stability tracks the peak of the reference spectrum, not its total
    // power; for band-limited noise the peak-to-mean ratio is roughly
    // Nyquist over bandwidth.
    auto concentration = [](const NoiseSpec& n) {
        return (n.sample_rate / 2.0) / (n.f_high - n.f_low);
    };
    const double k_tune = concentration(cfg.tuning_noise);
    const double k_ctl = concentration(cfg.control_noise);

    StepSizes mu;
    mu.mu_tuning =
        knobs.tuning / (static_cast<double>(cfg.control_taps) * p_tune * k_tune * s_virt);
    mu.mu_aux = knobs.aux / (static_cast<double>(cfg.aux_taps) * p_tune * k_tune *
                             static_cast<double>(cfg.dims.refs));
    mu.mu_control =
        knobs.control / (static_cast<double>(cfg.control_taps) * p_ctl * k_ctl * s_phys);
    return mu;
}

OpCounter instrumented_control_sample(const StageConfig& cfg, const PathSet& plant,
                                      Algorithm algorithm) {
    StageConfig c = cfg;
    c.algorithm = algorithm;
    c.validate(plant);

    const long warmup = plant.primary_physical.tap_len() + 16;
    const long n_samples = warmup + 1;
    const auto refs = make_references(c, c.control_noise, seed_purpose::control_reference,
                                      seed_purpose::control_sensor_noise, n_samples);

    ControlState st(c.dims.sources, c.dims.refs, c.control_taps, c.model_taps, c.dims.phys_mics);
    FxlmsState fx(c.dims.phys_mics, c.dims.sources, c.dims.refs, c.control_taps);
    AuxState aux(c.dims.phys_mics, c.dims.refs, c.aux_taps); // zero h_o
    PlantSim world(plant);

    OpCounter counter;
    std::vector<double> d_p, e_p;
    for (long n = 0; n < n_samples; ++n) {
        // Counting is enabled for exactly the final sample; the counts are
        // data-independent so one period is all the reconciliation needs.
        std::optional<opcount::Scope> scope;
        if (n == n_samples - 1) scope.emplace(counter);

        st.push_references(column(refs.sensed, n));
        {
            opcount::CategoryScope plant_cat(OpCategory::plant);
            world.push_reference(column(refs.clean, n));
        }
        const auto y = control_output(st);
        {
            opcount::CategoryScope plant_cat(OpCategory::plant);
            world.push_outputs(y);
            world.sense_physical(d_p, e_p);
        }
        const auto e_h = control_stage_inner_error(e_p, aux);
        st.push_errors(e_h);
        if (algorithm == Algorithm::mcalms) {
            const auto sums = adjoint_error_sums(st, plant.secondary_physical_est);
            mcalms_step(st, sums, c.step_sizes.mu_control);
        } else {
            mcfxlms_step(st, fx, plant.secondary_physical_est, e_h, c.step_sizes.mu_control);
        }
    }
    return counter;
}

} // namespace mvanc
