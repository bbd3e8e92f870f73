// SPDX-License-Identifier: Apache-2.0
#include "core/rng.hpp"

#include <cmath>

namespace mvanc {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (purpose * 0xd6e8feb86659fd93ULL));
    h = splitmix64(h ^ (index * 0xa0761d6478bd642fULL));
    return h;
}

double Rng::gaussian() {
    // Box-Muller; u1 nudged away from 0 so log() stays finite.
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::uint64_t Rng::uniform_int(std::uint64_t upper_inclusive) {
    // Rejection-free modulo is fine here: ranges are tiny (path delays,
    // channel picks), bias is < 2^-50.
    return engine_() % (upper_inclusive + 1);
}

} // namespace mvanc
