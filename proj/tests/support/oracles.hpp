// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations. Everything here is deliberately
// brute-force and independent of the library's streaming kernels.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

// Direct-form convolution: y[n] = sum_k h[k] x[n-k], x zero outside [0, N).
inline std::vector<double> convolve_direct(const std::vector<double>& x,
                                           const std::vector<double>& h) {
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (std::size_t n = 0; n < y.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (n < k || n - k >= x.size()) continue;
            acc += h[k] * x[n - k];
        }
        y[n] = acc;
    }
    return y;
}

inline double at_or_zero(const std::vector<double>& v, long i) {
    return (i >= 0 && i < static_cast<long>(v.size())) ? v[static_cast<std::size_t>(i)] : 0.0;
}

// Radix-2 iterative FFT, power-of-two length.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft length not a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * 3.14159265358979323846 / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Welch PSD estimate, Hann window, 50% overlap. Returns one-sided PSD over
// frequencies f[k] = k * fs / nfft, k in [0, nfft/2].
struct Psd {
    std::vector<double> freq_hz;
    std::vector<double> power;
};

inline Psd welch_psd(const std::vector<double>& x, double sample_rate, std::size_t nfft = 4096) {
    Psd out;
    const std::size_t hop = nfft / 2;
    if (x.size() < nfft) throw std::invalid_argument("welch: signal shorter than nfft");
    std::vector<double> window(nfft);
    for (std::size_t i = 0; i < nfft; ++i)
        window[i] = 0.5 * (1.0 - std::cos(2.0 * 3.14159265358979323846 * static_cast<double>(i) /
                                          static_cast<double>(nfft - 1)));
    std::vector<double> acc(nfft / 2 + 1, 0.0);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + nfft <= x.size(); start += hop) {
        std::vector<std::complex<double>> seg(nfft);
        for (std::size_t i = 0; i < nfft; ++i) seg[i] = x[start + i] * window[i];
        fft_inplace(seg);
        for (std::size_t k = 0; k <= nfft / 2; ++k) acc[k] += std::norm(seg[k]);
        ++segments;
    }
    if (segments == 0) throw std::invalid_argument("welch: no segments");
    out.freq_hz.resize(acc.size());
    out.power.resize(acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k) {
        out.freq_hz[k] = sample_rate * static_cast<double>(k) / static_cast<double>(nfft);
        out.power[k] = acc[k] / static_cast<double>(segments);
    }
    return out;
}

// Dense least squares via normal equations + Cholesky; fine for the small
// identification problems the tests pose.
inline std::vector<double> solve_least_squares(const std::vector<std::vector<double>>& rows,
                                               const std::vector<double>& rhs) {
    if (rows.empty() || rows.size() != rhs.size())
        throw std::invalid_argument("lsq: bad shapes");
    const std::size_t p = rows[0].size();
    std::vector<double> ata(p * p, 0.0), atb(p, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& a = rows[r];
        for (std::size_t i = 0; i < p; ++i) {
            atb[i] += a[i] * rhs[r];
            for (std::size_t j = i; j < p; ++j) ata[i * p + j] += a[i] * a[j];
        }
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < i; ++j) ata[i * p + j] = ata[j * p + i];
    // small ridge keeps the factorization stable on band-limited excitation
    for (std::size_t i = 0; i < p; ++i) ata[i * p + i] += 1e-9 * (ata[i * p + i] + 1e-12);

    // Cholesky
    std::vector<double> chol(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = ata[i * p + j];
            for (std::size_t k2 = 0; k2 < j; ++k2) s -= chol[i * p + k2] * chol[j * p + k2];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("lsq: matrix not positive definite");
                chol[i * p + i] = std::sqrt(s);
            } else {
                chol[i * p + j] = s / chol[j * p + j];
            }
        }
    }
    std::vector<double> y(p, 0.0), sol(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        double s = atb[i];
        for (std::size_t k2 = 0; k2 < i; ++k2) s -= chol[i * p + k2] * y[k2];
        y[i] = s / chol[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k2 = ii + 1; k2 < p; ++k2) s -= chol[k2 * p + ii] * sol[k2];
        sol[ii] = s / chol[ii * p + ii];
    }
    return sol;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v)
        x = scale * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
    return v;
}

} // namespace oracle
