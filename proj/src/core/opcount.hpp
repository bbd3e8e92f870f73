// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace mvanc {

// Arithmetic instrumentation. The DSP kernels report how many multiplies and
// adds they perform; the pipeline tags each kernel call with the stage of the
// control cycle it belongs to so per-term tallies can be reconciled against
// the closed-form operation counts. Counting is off unless a counter is
// installed on the current thread, in which case the overhead is one branch
// per kernel call.
enum class OpCategory : int {
    control_filter = 0, // control-signal synthesis, y_k from the references
    aux_filter,         // auxiliary-filter prediction and inner-error subtract
    error_filter,       // error filtered through the time-reversed path model
    reference_filter,   // reference filtered through the path model (filtered-x)
    error_sum,          // per-source accumulation across error channels
    weight_update,      // coefficient updates including step-size scaling
    plant,              // true-path simulation; not controller cost
    evaluation,         // evaluation-only virtual taps; not controller cost
    count_
};

constexpr int kOpCategoryCount = static_cast<int>(OpCategory::count_);

struct OpTally {
    std::uint64_t multiplications = 0;
    std::uint64_t additions = 0;
};

class OpCounter {
public:
    void add(OpCategory cat, std::uint64_t mults, std::uint64_t adds) {
        auto& t = tallies_[static_cast<int>(cat)];
        t.multiplications += mults;
        t.additions += adds;
    }
    const OpTally& tally(OpCategory cat) const { return tallies_[static_cast<int>(cat)]; }

    // Controller cost only; plant and evaluation taps are the simulated world.
    OpTally controller_total() const {
        OpTally sum;
        for (int i = 0; i < kOpCategoryCount; ++i) {
            auto cat = static_cast<OpCategory>(i);
            if (cat == OpCategory::plant || cat == OpCategory::evaluation) continue;
            sum.multiplications += tallies_[i].multiplications;
            sum.additions += tallies_[i].additions;
        }
        return sum;
    }
    void reset() { tallies_ = {}; }

private:
    std::array<OpTally, kOpCategoryCount> tallies_{};
};

namespace opcount {

inline OpCounter*& active_slot() {
    thread_local OpCounter* slot = nullptr;
    return slot;
}
inline OpCounter* active() { return active_slot(); }

inline void record(OpCategory cat, std::uint64_t mults, std::uint64_t adds) {
    if (OpCounter* c = active()) c->add(cat, mults, adds);
}

// Installs a counter for the current scope and pins the category kernels
// record under until changed.
class Scope {
public:
    explicit Scope(OpCounter& counter) : previous_(active_slot()) { active_slot() = &counter; }
    ~Scope() { active_slot() = previous_; }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

private:
    OpCounter* previous_;
};

inline OpCategory& current_category_slot() {
    thread_local OpCategory cat = OpCategory::plant;
    return cat;
}
inline OpCategory current_category() { return current_category_slot(); }

class CategoryScope {
public:
    explicit CategoryScope(OpCategory cat) : previous_(current_category_slot()) {
        current_category_slot() = cat;
    }
    ~CategoryScope() { current_category_slot() = previous_; }
    CategoryScope(const CategoryScope&) = delete;
    CategoryScope& operator=(const CategoryScope&) = delete;

private:
    OpCategory previous_;
};

inline void record_here(std::uint64_t mults, std::uint64_t adds) {
    if (OpCounter* c = active()) c->add(current_category_slot(), mults, adds);
}

} // namespace opcount
} // namespace mvanc
