// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/opcount.hpp"
#include "core/types.hpp"

namespace mvanc {

// Per-sample-period operation counts for the whole control stage.
struct OpCount {
    std::uint64_t multiplications = 0;
    std::uint64_t additions = 0;
};

struct ComplexityParams {
    std::int64_t refs = 1;         // J
    std::int64_t sources = 1;      // K
    std::int64_t phys_mics = 1;    // M
    std::int64_t control_taps = 1; // N_x
    std::int64_t aux_taps = 1;     // N_h
    std::int64_t model_taps = 1;   // L

    void validate() const;
};

// Closed forms for one control-stage period. Overflow-checked exact integer
// arithmetic; any overflow throws instead of wrapping.
//   filtered-x: mult JKM(L + N_x + 1) + MJN_h
//               add  JKM(L + N_x - 1) + M(J + N_h - 1)
//   adjoint:    mult K(LM + JN_x + 1) + MJN_h
//               add  K[(L - 1)M + J(N_x + M - 1)] + M(J + N_h - 1)
OpCount ops_mcfxlms(const ComplexityParams& p);
OpCount ops_mcalms(const ComplexityParams& p);

struct SweepRow {
    int channels = 0; // J = K = M = channels
    OpCount mcfxlms;
    OpCount mcalms;
    double mult_ratio = 0.0; // mcfxlms / mcalms
    double add_ratio = 0.0;
};

std::vector<SweepRow> channel_sweep(std::int64_t control_taps, std::int64_t aux_taps,
                                    std::int64_t model_taps, int ch_max);

// Reconciliation of an instrumented control-stage sample against the closed
// forms. Each row maps one kernel tally to the closed-form term it should
// equal; terms the closed forms do not carry (or count differently) appear
// with a nonzero delta and stay visible rather than being folded away.
struct ReconciliationRow {
    std::string term;
    std::uint64_t measured_mult = 0;
    std::uint64_t measured_add = 0;
    std::uint64_t table_mult = 0; // closed-form attribution, 0 when uncovered
    std::uint64_t table_add = 0;
    bool covered_by_table = true; // false: term absent from the closed forms
};

struct Reconciliation {
    std::vector<ReconciliationRow> rows;
    OpCount measured_total; // controller categories only
    OpCount table_total;    // closed-form evaluation
    std::string to_text() const;
};

Reconciliation reconcile_counts(Algorithm algorithm, const ComplexityParams& p,
                                const OpCounter& counter);

} // namespace mvanc
