// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "core/dsp.hpp"
#include "core/types.hpp"

namespace mvanc {

// Controller state for one adaptation stage: the control filter bank W plus
// the reference and error-window buffers its updates read. Steppers mutate
// state in place and are bit-deterministic in (state, inputs, mu).
class ControlState {
public:
    ControlState(int sources, int refs, int control_taps, int model_taps, int error_channels);

    int sources() const { return sources_; }
    int refs() const { return refs_; }
    int control_taps() const { return control_taps_; }
    int model_taps() const { return model_taps_; }
    int error_channels() const { return error_channels_; }

    FilterBank& weights() { return weights_; }
    const FilterBank& weights() const { return weights_; }
    TapBuffer& reference(int j) { return reference_[static_cast<std::size_t>(j)]; }
    const TapBuffer& reference(int j) const { return reference_[static_cast<std::size_t>(j)]; }
    TapBuffer& error_window(int e) { return error_windows_[static_cast<std::size_t>(e)]; }
    const TapBuffer& error_window(int e) const {
        return error_windows_[static_cast<std::size_t>(e)];
    }

    void push_references(const std::vector<double>& x);
    void push_errors(const std::vector<double>& e);

private:
    int sources_, refs_, control_taps_, model_taps_, error_channels_;
    FilterBank weights_;                    // K x J, length N_x
    std::vector<TapBuffer> reference_;      // J, capacity N_x + L - 1
    std::vector<TapBuffer> error_windows_;  // per error channel, capacity L
};

// Auxiliary filters H (M x J) with their reference window buffers.
class AuxState {
public:
    AuxState(int phys_mics, int refs, int aux_taps);

    int phys_mics() const { return phys_mics_; }
    int refs() const { return refs_; }
    int aux_taps() const { return aux_taps_; }

    FilterBank& filters() { return filters_; }
    const FilterBank& filters() const { return filters_; }
    TapBuffer& reference(int j) { return reference_[static_cast<std::size_t>(j)]; }
    const TapBuffer& reference(int j) const { return reference_[static_cast<std::size_t>(j)]; }

    void push_references(const std::vector<double>& x);

private:
    int phys_mics_, refs_, aux_taps_;
    FilterBank filters_;
    std::vector<TapBuffer> reference_;
};

// Filtered-reference delay lines for the filtered-x baseline, one per
// (error channel, source, reference) triple, each advanced by one sample per
// step at one MAC per model tap.
class FxlmsState {
public:
    FxlmsState(int error_channels, int sources, int refs, int control_taps);

    TapBuffer& at(int error_channel, int source, int ref);
    const TapBuffer& at(int error_channel, int source, int ref) const;

private:
    int error_channels_, sources_, refs_;
    std::vector<TapBuffer> buffers_;
};

// y_k(n) = sum_j W[k][j] . x_j(n)
std::vector<double> control_output(const ControlState& state);

// filtered_error_sums[k] = sum over error channels of the error window
// filtered through the time-reversed path model for source k.
std::vector<double> adjoint_error_sums(const ControlState& state, const FilterBank& path_model);

// Adjoint update: W[k][j] += mu * x_j(n-L+1) * filtered_error_sums[k].
// Note the + : with the plant convention e = d - sum_k s*y used throughout,
// this is the descent direction, and it is the sign under which the adjoint
// and filtered-x updates accumulate to the same increments.
void mcalms_step(ControlState& state, const std::vector<double>& filtered_error_sums, double mu);

// Filtered-x baseline: advances the filtered-reference lines through the
// path model, then W[k][j] += mu * sum_e errors[e] * xf_{j,k,e}(n).
void mcfxlms_step(ControlState& state, FxlmsState& fx, const FilterBank& path_model,
                  const std::vector<double>& errors, double mu);

// e_h,m = e_p,m - sum_j H[m][j] . xbar_j(n), the auxiliary-compensated inner
// error, computed against the (frozen or adapting) filters in `aux`.
std::vector<double> control_stage_inner_error(const std::vector<double>& physical_errors,
                                              const AuxState& aux);

// LMS identification of the auxiliary filters. Returns the inner errors
// computed before the update; then H[m][j] += mu * e_h,m * xbar_j(n).
std::vector<double> aux_lms_step(AuxState& state, const std::vector<double>& physical_errors,
                                 double mu);

} // namespace mvanc
