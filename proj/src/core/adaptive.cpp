// SPDX-License-Identifier: Apache-2.0
#include "core/adaptive.hpp"

#include <cmath>

#include "core/opcount.hpp"

namespace mvanc {

namespace {

// Catches NaN and Inf as well as "finite but hopeless" blowups so a diverging
// run aborts within a few samples instead of saturating.
constexpr double kDivergenceLimit = 1e100;

void check_adaptation_input(double v, const char* what) {
    if (!(std::fabs(v) < kDivergenceLimit))
        throw DivergenceError(std::string(what) + " is non-finite or exploding; step size too large",
                              -1);
}

double time_reversed_filter_span(const double* window, const FirFilter& taps) {
    double acc = 0.0;
    const int len = taps.length();
    for (int i = 0; i < len; ++i) acc += window[i] * taps[i];
    opcount::record_here(static_cast<std::uint64_t>(len),
                         static_cast<std::uint64_t>(len > 0 ? len - 1 : 0));
    return acc;
}

} // namespace

ControlState::ControlState(int sources, int refs, int control_taps, int model_taps,
                           int error_channels)
    : sources_(sources),
      refs_(refs),
      control_taps_(control_taps),
      model_taps_(model_taps),
      error_channels_(error_channels),
      weights_(sources, refs, control_taps) {
    if (control_taps < 1 || model_taps < 1) throw ConfigError("tap lengths must be >= 1");
    if (error_channels < 1) throw ConfigError("need at least one error channel");
    // Capacity covers both the lag-0 inner product and the L-1 delayed
    // reference vector.
    const int ref_capacity = control_taps + model_taps - 1;
    reference_.reserve(static_cast<std::size_t>(refs));
    for (int j = 0; j < refs; ++j) reference_.emplace_back(ref_capacity);
    error_windows_.reserve(static_cast<std::size_t>(error_channels));
    for (int e = 0; e < error_channels; ++e) error_windows_.emplace_back(model_taps);
}

void ControlState::push_references(const std::vector<double>& x) {
    for (int j = 0; j < refs_; ++j) reference_[static_cast<std::size_t>(j)].push(x[static_cast<std::size_t>(j)]);
}

void ControlState::push_errors(const std::vector<double>& e) {
    for (int c = 0; c < error_channels_; ++c)
        error_windows_[static_cast<std::size_t>(c)].push(e[static_cast<std::size_t>(c)]);
}

AuxState::AuxState(int phys_mics, int refs, int aux_taps)
    : phys_mics_(phys_mics), refs_(refs), aux_taps_(aux_taps), filters_(phys_mics, refs, aux_taps) {
    reference_.reserve(static_cast<std::size_t>(refs));
    for (int j = 0; j < refs; ++j) reference_.emplace_back(aux_taps);
}

void AuxState::push_references(const std::vector<double>& x) {
    for (int j = 0; j < refs_; ++j) reference_[static_cast<std::size_t>(j)].push(x[static_cast<std::size_t>(j)]);
}

FxlmsState::FxlmsState(int error_channels, int sources, int refs, int control_taps)
    : error_channels_(error_channels), sources_(sources), refs_(refs) {
    if (error_channels < 1 || sources < 1 || refs < 1)
        throw ConfigError("FxlmsState dimensions must be >= 1");
    const std::size_t n = static_cast<std::size_t>(error_channels) *
                          static_cast<std::size_t>(sources) * static_cast<std::size_t>(refs);
    buffers_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) buffers_.emplace_back(control_taps);
}

TapBuffer& FxlmsState::at(int error_channel, int source, int ref) {
    return buffers_[(static_cast<std::size_t>(error_channel) * static_cast<std::size_t>(sources_) +
                     static_cast<std::size_t>(source)) *
                        static_cast<std::size_t>(refs_) +
                    static_cast<std::size_t>(ref)];
}

const TapBuffer& FxlmsState::at(int error_channel, int source, int ref) const {
    return const_cast<FxlmsState*>(this)->at(error_channel, source, ref);
}

std::vector<double> control_output(const ControlState& state) {
    opcount::CategoryScope cat(OpCategory::control_filter);
    std::vector<double> y(static_cast<std::size_t>(state.sources()), 0.0);
    for (int k = 0; k < state.sources(); ++k) {
        double acc = 0.0;
        for (int j = 0; j < state.refs(); ++j) {
            acc += state.reference(j).dot(state.weights().at(k, j).data(), state.control_taps(), 0);
        }
        opcount::record_here(0, static_cast<std::uint64_t>(state.refs() - 1));
        y[static_cast<std::size_t>(k)] = acc;
    }
    return y;
}

std::vector<double> adjoint_error_sums(const ControlState& state, const FilterBank& path_model) {
    if (path_model.rows() != state.error_channels() || path_model.cols() != state.sources())
        throw ConfigError("adjoint_error_sums: path model bank dims mismatch");
    if (path_model.tap_len() != state.model_taps())
        throw ConfigError("adjoint_error_sums: path model length mismatch");

    const int L = state.model_taps();
    const int E = state.error_channels();
    std::vector<double> windows(static_cast<std::size_t>(E) * static_cast<std::size_t>(L));
    for (int e = 0; e < E; ++e)
        state.error_window(e).window_oldest_first(L, windows.data() + static_cast<std::size_t>(e) * L);

    std::vector<double> sums(static_cast<std::size_t>(state.sources()), 0.0);
    for (int k = 0; k < state.sources(); ++k) {
        double acc = 0.0;
        {
            opcount::CategoryScope cat(OpCategory::error_filter);
            for (int e = 0; e < E; ++e)
                acc += time_reversed_filter_span(windows.data() + static_cast<std::size_t>(e) * L,
                                                 path_model.at(e, k));
        }
        opcount::record(OpCategory::error_sum, 0, static_cast<std::uint64_t>(E - 1));
        sums[static_cast<std::size_t>(k)] = acc;
    }
    return sums;
}

void mcalms_step(ControlState& state, const std::vector<double>& filtered_error_sums, double mu) {
    if (static_cast<int>(filtered_error_sums.size()) != state.sources())
        throw ConfigError("mcalms_step: filtered_error_sums size mismatch");
    opcount::CategoryScope cat(OpCategory::weight_update);
    const int delay = state.model_taps() - 1;
    for (int k = 0; k < state.sources(); ++k) {
        check_adaptation_input(filtered_error_sums[static_cast<std::size_t>(k)],
                               "filtered error sum");
        const double g = mu * filtered_error_sums[static_cast<std::size_t>(k)];
        opcount::record_here(1, 0);
        if (g == 0.0) continue;
        for (int j = 0; j < state.refs(); ++j) {
            state.reference(j).accumulate_scaled(state.weights().at(k, j).data(),
                                                 state.control_taps(), delay, g);
        }
    }
}

void mcfxlms_step(ControlState& state, FxlmsState& fx, const FilterBank& path_model,
                  const std::vector<double>& errors, double mu) {
    if (path_model.rows() != state.error_channels() || path_model.cols() != state.sources())
        throw ConfigError("mcfxlms_step: path model bank dims mismatch");
    if (static_cast<int>(errors.size()) != state.error_channels())
        throw ConfigError("mcfxlms_step: errors size mismatch");

    const int E = state.error_channels();
    const int K = state.sources();
    const int J = state.refs();
    const int L = path_model.tap_len();

    // Advance the filtered-reference lines first so the update sees xf(n).
    {
        opcount::CategoryScope cat(OpCategory::reference_filter);
        for (int e = 0; e < E; ++e)
            for (int k = 0; k < K; ++k)
                for (int j = 0; j < J; ++j) {
                    const double xf = state.reference(j).dot(path_model.at(e, k).data(), L, 0);
                    fx.at(e, k, j).push(xf);
                }
    }

    opcount::CategoryScope cat(OpCategory::weight_update);
    for (int e = 0; e < E; ++e) {
        check_adaptation_input(errors[static_cast<std::size_t>(e)], "error");
        const double g = mu * errors[static_cast<std::size_t>(e)];
        opcount::record_here(1, 0);
        if (g == 0.0) continue;
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < J; ++j)
                fx.at(e, k, j).accumulate_scaled(state.weights().at(k, j).data(),
                                                 state.control_taps(), 0, g);
    }
}

std::vector<double> control_stage_inner_error(const std::vector<double>& physical_errors,
                                              const AuxState& aux) {
    if (static_cast<int>(physical_errors.size()) != aux.phys_mics())
        throw ConfigError("inner error: physical_errors size mismatch");
    opcount::CategoryScope cat(OpCategory::aux_filter);
    std::vector<double> inner(static_cast<std::size_t>(aux.phys_mics()), 0.0);
    for (int m = 0; m < aux.phys_mics(); ++m) {
        double pred = 0.0;
        for (int j = 0; j < aux.refs(); ++j)
            pred += aux.reference(j).dot(aux.filters().at(m, j).data(), aux.aux_taps(), 0);
        opcount::record_here(0, static_cast<std::uint64_t>(aux.refs())); // combine + subtract
        inner[static_cast<std::size_t>(m)] = physical_errors[static_cast<std::size_t>(m)] - pred;
    }
    return inner;
}

std::vector<double> aux_lms_step(AuxState& state, const std::vector<double>& physical_errors,
                                 double mu) {
    std::vector<double> inner = control_stage_inner_error(physical_errors, state);
    opcount::CategoryScope cat(OpCategory::weight_update);
    for (int m = 0; m < state.phys_mics(); ++m) {
        check_adaptation_input(inner[static_cast<std::size_t>(m)], "inner error");
        const double g = mu * inner[static_cast<std::size_t>(m)];
        opcount::record_here(1, 0);
        if (g == 0.0) continue;
        for (int j = 0; j < state.refs(); ++j)
            state.reference(j).accumulate_scaled(state.filters().at(m, j).data(), state.aux_taps(),
                                                 0, g);
    }
    return inner;
}

} // namespace mvanc
