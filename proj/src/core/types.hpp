// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "core/errors.hpp"

namespace mvanc {

// J reference microphones, K secondary sources, M physical error microphones,
// Q virtual error microphones.
struct SystemDims {
    int refs = 1;      // J
    int sources = 1;   // K
    int phys_mics = 1; // M
    int virt_mics = 1; // Q

    void validate() const {
        if (refs < 1 || sources < 1 || phys_mics < 1 || virt_mics < 1)
            throw ConfigError("all channel counts must be >= 1");
    }
};

struct StepSizes {
    double mu_tuning = 0.0; // control-filter adaptation, tuning stage
    double mu_aux = 0.0;    // auxiliary-filter LMS
    double mu_control = 0.0; // control-filter adaptation, control stage

    void validate() const {
        if (mu_tuning <= 0.0 || mu_aux <= 0.0 || mu_control <= 0.0)
            throw ConfigError("step sizes must be > 0");
    }
};

enum class Algorithm { mcalms, mcfxlms };

inline std::string algorithm_name(Algorithm a) {
    return a == Algorithm::mcalms ? "mcalms" : "mcfxlms";
}

inline Algorithm algorithm_from_name(const std::string& name) {
    if (name == "mcalms") return Algorithm::mcalms;
    if (name == "mcfxlms") return Algorithm::mcfxlms;
    throw ConfigError("unknown algorithm '" + name + "' (expected mcalms or mcfxlms)");
}

} // namespace mvanc
