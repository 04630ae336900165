#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mnlb/errors.hpp"

namespace mnlb {

/// An MNL-bandit problem: N items with rewards r_i in [0,1] and preference
/// weights v_i in [0,1], a capacity K on offered subsets, and the no-purchase
/// weight fixed to 1.
struct Instance {
    int n_items = 0;
    int capacity = 0;
    std::vector<double> rewards;
    std::vector<double> weights;

    static constexpr double no_purchase_weight = 1.0;

    // Throws bad_parameter if any invariant fails.
    void validate() const;

    double reward(int item) const { return rewards[static_cast<std::size_t>(item - 1)]; }
    double weight(int item) const { return weights[static_cast<std::size_t>(item - 1)]; }
    double max_reward() const;
};

/// An offered subset in canonical form: strictly increasing 1-based item
/// indices, so set equality is representation equality.
class Assortment {
public:
    Assortment() = default;
    // Canonicalizes: sorts and removes duplicates.
    explicit Assortment(std::vector<int> items);

    const std::vector<int>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    bool contains(int item) const;

    // Throws invalid_assortment on out-of-range indices or capacity overflow.
    void validate_for(const Instance& inst) const;

    bool operator==(const Assortment&) const = default;

private:
    std::vector<int> items_;
};

struct SwitchDelta {
    int asst_delta = 0;   // 1 iff the sets differ
    int item_delta = 0;   // |prev symmetric-difference next|
};

/// p_i = v_i / (1 + sum_{j in S} v_j) for offered i, p_0 the complement,
/// zero elsewhere. Index 0 of the result is the no-purchase probability.
std::vector<double> choice_probabilities(const Instance& inst, const Assortment& s);

/// R(S, v) = sum_{i in S} r_i v_i / (1 + sum_{j in S} v_j). When
/// `weights_override` is non-empty it replaces the instance weights (used
/// with UCB vectors); it must have N nonnegative entries.
double expected_revenue(const Instance& inst, const Assortment& s,
                        std::span<const double> weights_override = {});

SwitchDelta switch_deltas(const Assortment& prev, const Assortment& next);

}  // namespace mnlb
