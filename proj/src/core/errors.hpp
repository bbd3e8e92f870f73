// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mvanc {

// Invalid dimensions, bands, tap lengths, buffer capacities. Raised at
// construction/validation time, never mid-stream.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive run produced a non-finite value. Carries the sample index so the
// step-size diagnostics point at the exact spot.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::int64_t sample)
        : std::runtime_error(what + " (sample " + std::to_string(sample) + ")"),
          sample_index(sample) {}
    std::int64_t sample_index;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mvanc
