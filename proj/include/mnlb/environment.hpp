#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "mnlb/core.hpp"
#include "mnlb/rng.hpp"

namespace mnlb {

/// Global step counter with an optional horizon T. t counts consumed steps.
struct SimClock {
    std::uint64_t t = 0;
    std::uint64_t horizon = kUnbounded;

    static constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

    bool bounded() const { return horizon != kUnbounded; }
    bool exhausted() const { return bounded() && t >= horizon; }
};

/// One epoch of offering a fixed assortment until the first no-purchase (or
/// the horizon). `purchase_counts` is parallel to `offered.items()`.
struct EpochOutcome {
    Assortment offered;
    std::vector<int> purchase_counts;
    std::vector<int> step_choices;  // one entry per consumed step; 0 = no purchase
    std::uint64_t epoch_length = 0;
    bool truncated = false;
    double realized_revenue = 0.0;

    int purchases_of(int item) const;
    int total_purchases() const;
};

/// One categorical draw from choice_probabilities(inst, s); returns the chosen
/// item (0 = no purchase). Offered items are scanned in ascending index, the
/// no-purchase outcome takes the residual probability mass.
int sample_choice(const Instance& inst, const Assortment& s, Rng& rng);

/// Offers `s` one customer per step until a no-purchase ends the epoch or the
/// horizon truncates it. Throws horizon_exhausted when the clock has no steps
/// left on entry.
EpochOutcome run_epoch(const Instance& inst, const Assortment& s, SimClock& clock, Rng& rng);

}  // namespace mnlb
