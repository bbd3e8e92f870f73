// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "core/dsp.hpp"
#include "support/oracles.hpp"

using namespace mvanc;

TEST_CASE("tap buffer starts silent and shifts lags by one per push") {
    TapBuffer buf(4);
    CHECK(buf.at_lag(0) == 0.0);
    CHECK(buf.at_lag(3) == 0.0);
    buf.push(1.0);
    buf.push(2.0);
    CHECK(buf.at_lag(0) == 2.0);
    CHECK(buf.at_lag(1) == 1.0);
    CHECK(buf.at_lag(2) == 0.0); // pre-stream
    buf.push(3.0);
    CHECK(buf.at_lag(0) == 3.0);
    CHECK(buf.at_lag(1) == 2.0);
    CHECK(buf.at_lag(2) == 1.0);
}

TEST_CASE("convolve_stream identity and zero filters") {
    TapBuffer buf(8);
    FirFilter identity(std::vector<double>{1.0});
    FirFilter zero(std::vector<double>{0.0, 0.0, 0.0});
    for (double x : {0.3, -1.7, 2.5}) {
        buf.push(x);
        CHECK(convolve_stream(buf, identity) == x);
        CHECK(convolve_stream(buf, zero) == 0.0);
    }
}

TEST_CASE("convolve_stream matches hand convolution for taps [1,2] on 1,1,1") {
    TapBuffer buf(4);
    FirFilter f(std::vector<double>{1.0, 2.0});
    std::vector<double> got;
    for (int i = 0; i < 3; ++i) {
        buf.push(1.0);
        got.push_back(convolve_stream(buf, f));
    }
    CHECK(got == std::vector<double>{1.0, 3.0, 3.0});
}

TEST_CASE("convolve_stream agrees with the direct-form oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 16 + rng() % 200;
        const std::size_t len = 1 + rng() % 48;
        const auto x = oracle::random_vector(rng, n);
        const auto h = oracle::random_vector(rng, len);
        const auto expect = oracle::convolve_direct(x, h);

        TapBuffer buf(static_cast<int>(len));
        FirFilter f((std::vector<double>(h)));
        for (std::size_t i = 0; i < n; ++i) {
            buf.push(x[i]);
            const double got = convolve_stream(buf, f);
            CHECK(got == doctest::Approx(expect[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("convolve_stream is linear in the input stream") {
    std::mt19937_64 rng(7);
    const double a = 1.75, b = -0.4;
    const auto u = oracle::random_vector(rng, 64);
    const auto v = oracle::random_vector(rng, 64);
    const auto taps = oracle::random_vector(rng, 9);
    FirFilter f((std::vector<double>(taps)));
    TapBuffer bu(9), bv(9), bw(9);
    for (std::size_t i = 0; i < u.size(); ++i) {
        bu.push(u[i]);
        bv.push(v[i]);
        bw.push(a * u[i] + b * v[i]);
        const double lhs = convolve_stream(bw, f);
        const double rhs = a * convolve_stream(bu, f) + b * convolve_stream(bv, f);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("delayed_reference with zero delay equals the plain tap vector") {
    TapBuffer buf(8);
    for (double x : {1.0, 2.0, 3.0, 4.0}) buf.push(x);
    const auto v = delayed_reference(buf, 0, 4);
    CHECK(v == std::vector<double>{4.0, 3.0, 2.0, 1.0});
}

TEST_CASE("delayed_reference indexes like a full stored history") {
    // spec example: delay 2, stream 5,6,7 newest=7, one tap -> [5]
    TapBuffer buf(3);
    for (double x : {5.0, 6.0, 7.0}) buf.push(x);
    CHECK(delayed_reference(buf, 2, 1) == std::vector<double>{5.0});

    std::mt19937_64 rng(99);
    const auto stream = oracle::random_vector(rng, 130);
    TapBuffer big(64);
    std::vector<double> history;
    for (double x : stream) {
        big.push(x);
        history.push_back(x);
        const int delay = static_cast<int>(rng() % 16);
        const int n_taps = 1 + static_cast<int>(rng() % 32);
        const auto got = delayed_reference(big, delay, n_taps);
        for (int i = 0; i < n_taps; ++i) {
            const long idx = static_cast<long>(history.size()) - 1 - delay - i;
            CHECK(got[static_cast<std::size_t>(i)] == oracle::at_or_zero(history, idx));
        }
    }
}

TEST_CASE("delayed_reference beyond the pushed samples reads zeros") {
    TapBuffer buf(16);
    buf.push(1.0);
    const auto v = delayed_reference(buf, 8, 4);
    for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("capacity shortfalls are configuration errors, not silent wraps") {
    TapBuffer buf(4);
    CHECK_THROWS_AS((void)delayed_reference(buf, 2, 3), ConfigError);
    FirFilter f(std::vector<double>{1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS((void)convolve_stream(buf, f), ConfigError);
    CHECK_THROWS_AS(TapBuffer(0), ConfigError);
    CHECK_THROWS_AS(FirFilter(0), ConfigError);
    CHECK_THROWS_AS(FirFilter(std::vector<double>{}), ConfigError);
}

TEST_CASE("time_reversed_filter picks the right window ends") {
    const int L = 5;
    std::vector<double> window = {10.0, 11.0, 12.0, 13.0, 14.0}; // e(n-4)..e(n)
    std::vector<double> newest(L, 0.0), oldest(L, 0.0);
    newest[L - 1] = 1.0;
    oldest[0] = 1.0;
    CHECK(time_reversed_filter(window, FirFilter(newest)) == 14.0);
    CHECK(time_reversed_filter(window, FirFilter(oldest)) == 10.0);
}

TEST_CASE("time_reversed_filter hand example") {
    CHECK(time_reversed_filter({1.0, 2.0, 3.0}, FirFilter(std::vector<double>{0.5, 0.0, 0.25})) ==
          doctest::Approx(1.25));
}

TEST_CASE("time_reversed_filter length mismatch is a programming error") {
    CHECK_THROWS_AS(
        (void)time_reversed_filter({1.0, 2.0}, FirFilter(std::vector<double>{1.0, 2.0, 3.0})),
        std::logic_error);
}

// The algebra that makes the delayed-reference / filtered-error pairing a
// valid surrogate for the filtered-x correlation: for zero-padded x, e and
// any FIR s of length L,
//   sum_n (s*x)(n) e(n) == sum_n x(n-L+1) e'(n).
TEST_CASE("adjoint identity on random sequences") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nx = 4 + rng() % 253;
        const std::size_t ne = 4 + rng() % 253;
        const int L = 1 + static_cast<int>(rng() % 32);
        const auto x = oracle::random_vector(rng, nx);
        const auto e = oracle::random_vector(rng, ne);
        const auto s = oracle::random_vector(rng, static_cast<std::size_t>(L));
        FirFilter s_fir((std::vector<double>(s)));

        const auto sx = oracle::convolve_direct(x, s);
        double lhs = 0.0;
        for (std::size_t n = 0; n < ne && n < sx.size(); ++n) lhs += sx[n] * e[n];

        double rhs = 0.0;
        const long n_hi = static_cast<long>(ne) + static_cast<long>(nx) + 2 * L;
        std::vector<double> window(static_cast<std::size_t>(L));
        for (long n = -2 * L; n < n_hi; ++n) {
            for (int i = 0; i < L; ++i)
                window[static_cast<std::size_t>(i)] = oracle::at_or_zero(e, n - L + 1 + i);
            const double eprime = time_reversed_filter(window, s_fir);
            rhs += oracle::at_or_zero(x, n - L + 1) * eprime;
        }

        const double scale = std::max({1e-30, std::fabs(lhs), std::fabs(rhs)});
        CHECK(std::fabs(lhs - rhs) / scale <= 1e-10);
    }
}

TEST_CASE("filter bank enforces uniform shape and rejects bad indices") {
    FilterBank bank(2, 3, 4);
    CHECK(bank.rows() == 2);
    CHECK(bank.cols() == 3);
    CHECK(bank.tap_len() == 4);
    CHECK(bank.all_finite());
    CHECK_THROWS_AS((void)bank.at(2, 0), ConfigError);
    CHECK_THROWS_AS((void)bank.at(0, 3), ConfigError);
    CHECK_THROWS_AS(FilterBank(0, 1, 1), ConfigError);
}
