// SPDX-License-Identifier: Apache-2.0
#include "core/dsp.hpp"

#include <cmath>
#include <cstddef>

#include "core/opcount.hpp"

namespace mvanc {

FirFilter::FirFilter(int length) {
    if (length < 1) throw ConfigError("FirFilter length must be >= 1");
    taps_.assign(static_cast<std::size_t>(length), 0.0);
}

FirFilter::FirFilter(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) throw ConfigError("FirFilter needs at least one tap");
    if (!all_finite()) throw ConfigError("FirFilter taps must be finite");
}

bool FirFilter::all_finite() const {
    for (double t : taps_)
        if (!std::isfinite(t)) return false;
    return true;
}

TapBuffer::TapBuffer(int capacity) : cap_(capacity) {
    if (capacity < 1) throw ConfigError("TapBuffer capacity must be >= 1");
    data_.assign(static_cast<std::size_t>(capacity), 0.0);
}

void TapBuffer::require(int needed) const {
    if (needed > cap_)
        throw ConfigError("TapBuffer capacity " + std::to_string(cap_) +
                          " too small for access depth " + std::to_string(needed));
}

double TapBuffer::at_lag(int lag) const {
    require(lag + 1);
    int idx = pos_ - 1 - lag;
    if (idx < 0) idx += cap_;
    return data_[static_cast<std::size_t>(idx)];
}

double TapBuffer::dot(const double* taps, int len, int delay) const {
    require(delay + len);
    int idx = pos_ - 1 - delay;
    if (idx < 0) idx += cap_;
    double acc = 0.0;
    const double* base = data_.data();
    int i = 0;
    int run = idx + 1 < len ? idx + 1 : len;
    const double* p = base + idx;
    for (; i < run; ++i) acc += taps[i] * *p--;
    p = base + cap_ - 1;
    for (; i < len; ++i) acc += taps[i] * *p--;
    opcount::record_here(static_cast<std::uint64_t>(len),
                         static_cast<std::uint64_t>(len > 0 ? len - 1 : 0));
    return acc;
}

void TapBuffer::accumulate_scaled(double* taps_out, int len, int delay, double scale) const {
    require(delay + len);
    int idx = pos_ - 1 - delay;
    if (idx < 0) idx += cap_;
    const double* base = data_.data();
    int i = 0;
    int run = idx + 1 < len ? idx + 1 : len;
    const double* p = base + idx;
    for (; i < run; ++i) taps_out[i] += scale * *p--;
    p = base + cap_ - 1;
    for (; i < len; ++i) taps_out[i] += scale * *p--;
    opcount::record_here(static_cast<std::uint64_t>(len), static_cast<std::uint64_t>(len));
}

void TapBuffer::window_oldest_first(int window_len, double* out) const {
    require(window_len);
    for (int i = 0; i < window_len; ++i) out[i] = at_lag(window_len - 1 - i);
}

void TapBuffer::reset() {
    data_.assign(data_.size(), 0.0);
    pos_ = 0;
}

FilterBank::FilterBank(int rows, int cols, int tap_len) : rows_(rows), cols_(cols), tap_len_(tap_len) {
    if (rows < 1 || cols < 1) throw ConfigError("FilterBank dimensions must be >= 1");
    if (tap_len < 1) throw ConfigError("FilterBank tap length must be >= 1");
    filters_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
                    FirFilter(tap_len));
}

std::size_t FilterBank::index(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
        throw ConfigError("FilterBank index out of range");
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
}

bool FilterBank::all_finite() const {
    for (const auto& f : filters_)
        if (!f.all_finite()) return false;
    return true;
}

void FilterBank::fill_zero() {
    for (auto& f : filters_)
        for (int i = 0; i < f.length(); ++i) f[i] = 0.0;
}

double convolve_stream(const TapBuffer& buffer, const FirFilter& filter) {
    return buffer.dot(filter.data(), filter.length(), 0);
}

std::vector<double> delayed_reference(const TapBuffer& buffer, int delay, int n_taps) {
    if (delay < 0 || n_taps < 1) throw ConfigError("delayed_reference needs delay >= 0, n_taps >= 1");
    if (delay + n_taps > buffer.capacity())
        throw ConfigError("TapBuffer capacity too small for delayed reference");
    std::vector<double> out(static_cast<std::size_t>(n_taps));
    for (int i = 0; i < n_taps; ++i) out[static_cast<std::size_t>(i)] = buffer.at_lag(delay + i);
    return out;
}

double time_reversed_filter(const std::vector<double>& error_window, const FirFilter& path_taps) {
    if (static_cast<int>(error_window.size()) != path_taps.length())
        throw std::logic_error("time_reversed_filter: window/taps length mismatch");
    double acc = 0.0;
    const int len = path_taps.length();
    for (int i = 0; i < len; ++i) acc += error_window[static_cast<std::size_t>(i)] * path_taps[i];
    opcount::record_here(static_cast<std::uint64_t>(len),
                         static_cast<std::uint64_t>(len > 0 ? len - 1 : 0));
    return acc;
}

} // namespace mvanc
