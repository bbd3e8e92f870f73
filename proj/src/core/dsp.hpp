// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "core/errors.hpp"

namespace mvanc {

// All signal arithmetic is 64-bit: adaptation traces run for 10^5+ samples
// and 32-bit accumulation drifts visibly at the noise-reduction levels of
// interest.

// One finite impulse response. taps[i] is the gain applied to the input at
// lag i (newest lag first), so streaming convolution is a straight dot
// product against a tap buffer.
class FirFilter {
public:
    FirFilter() : taps_(1, 0.0) {}
    explicit FirFilter(int length);
    explicit FirFilter(std::vector<double> taps);

    int length() const { return static_cast<int>(taps_.size()); }
    double* data() { return taps_.data(); }
    const double* data() const { return taps_.data(); }
    double& operator[](int i) { return taps_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return taps_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& taps() const { return taps_; }

    bool all_finite() const;

private:
    std::vector<double> taps_;
};

// Sliding window over a signal's most recent samples. Samples before the
// start of the stream read as zero. Pushing one sample shifts every lag by
// exactly one.
class TapBuffer {
public:
    explicit TapBuffer(int capacity);

    int capacity() const { return cap_; }

    void push(double x) {
        data_[static_cast<std::size_t>(pos_)] = x;
        ++pos_;
        if (pos_ == cap_) pos_ = 0;
    }

    // Sample at the given lag: lag 0 is the newest sample.
    double at_lag(int lag) const;

    // Dot product of taps[0..len) with lags [delay, delay+len). This is the
    // single hot kernel behind streaming convolution, delayed-reference
    // updates and the filtered-x products.
    double dot(const double* taps, int len, int delay) const;

    // taps_out[i] += scale * sample(lag = delay + i), the coefficient-update
    // kernel. Counts len multiplies and len adds.
    void accumulate_scaled(double* taps_out, int len, int delay, double scale) const;

    // [u(n-L+1), ..., u(n)] in increasing-time order, as consumed by
    // time_reversed_filter. This is the one place the newest-lag-first
    // storage is converted to the oldest-first window.
    void window_oldest_first(int window_len, double* out) const;

    void reset();

private:
    void require(int needed) const;

    std::vector<double> data_;
    int cap_;
    int pos_ = 0; // next write slot; newest sample sits at pos_-1
};

// A 2-D grid of equal-length FIRs indexed (destination, source): W[k][j],
// H[m][j], S_v[q][k], S_p[m][k].
class FilterBank {
public:
    FilterBank() : rows_(0), cols_(0), tap_len_(0) {}
    FilterBank(int rows, int cols, int tap_len);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int tap_len() const { return tap_len_; }

    FirFilter& at(int row, int col) { return filters_[index(row, col)]; }
    const FirFilter& at(int row, int col) const { return filters_[index(row, col)]; }

    bool all_finite() const;
    void fill_zero();

private:
    std::size_t index(int row, int col) const;

    int rows_, cols_, tap_len_;
    std::vector<FirFilter> filters_;
};

// y(n) = sum_i taps[i] * u(n - i), one output sample per call.
double convolve_stream(const TapBuffer& buffer, const FirFilter& filter);

// [u(n-delay), u(n-delay-1), ..., u(n-delay-n_taps+1)]; the reference vector
// lagged so the time-reversed error filtering lines up causally.
std::vector<double> delayed_reference(const TapBuffer& buffer, int delay, int n_taps);

// sum_i window[i] * taps[i] with window in increasing-time order
// [e(n-L+1), ..., e(n)]: the error filtered through the time-reversed path
// model. Length mismatch is a programming error, not a config error.
double time_reversed_filter(const std::vector<double>& error_window, const FirFilter& path_taps);

} // namespace mvanc
