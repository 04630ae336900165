#include "mnlb/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mnlb {

void Instance::validate() const {
    if (n_items < 1) throw bad_parameter("n_items must be positive, got " + std::to_string(n_items));
    if (capacity < 1 || capacity > n_items)
        throw bad_parameter("capacity must satisfy 1 <= capacity <= n_items, got " +
                            std::to_string(capacity) + " with n_items " + std::to_string(n_items));
    if (rewards.size() != static_cast<std::size_t>(n_items))
        throw bad_parameter("rewards must have exactly n_items entries");
    if (weights.size() != static_cast<std::size_t>(n_items))
        throw bad_parameter("weights must have exactly n_items entries");
    for (int i = 0; i < n_items; ++i) {
        const double r = rewards[static_cast<std::size_t>(i)];
        const double v = weights[static_cast<std::size_t>(i)];
        if (!(r >= 0.0 && r <= 1.0) || !std::isfinite(r))
            throw bad_parameter("reward of item " + std::to_string(i + 1) + " must lie in [0,1]");
        if (!(v >= 0.0 && v <= 1.0) || !std::isfinite(v))
            throw bad_parameter("weight of item " + std::to_string(i + 1) + " must lie in [0,1]");
    }
}

double Instance::max_reward() const {
    double m = 0.0;
    for (double r : rewards) m = std::max(m, r);
    return m;
}

Assortment::Assortment(std::vector<int> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool Assortment::contains(int item) const {
    return std::binary_search(items_.begin(), items_.end(), item);
}

void Assortment::validate_for(const Instance& inst) const {
    if (items_.size() > static_cast<std::size_t>(inst.capacity))
        throw invalid_assortment("assortment has " + std::to_string(items_.size()) +
                                 " items, capacity is " + std::to_string(inst.capacity));
    for (int item : items_) {
        if (item < 1 || item > inst.n_items)
            throw invalid_assortment("item index " + std::to_string(item) + " outside [1.." +
                                     std::to_string(inst.n_items) + "]");
    }
}

std::vector<double> choice_probabilities(const Instance& inst, const Assortment& s) {
    s.validate_for(inst);
    std::vector<double> probs(static_cast<std::size_t>(inst.n_items) + 1, 0.0);
    double denom = Instance::no_purchase_weight;
    for (int item : s.items()) denom += inst.weight(item);
    for (int item : s.items()) probs[static_cast<std::size_t>(item)] = inst.weight(item) / denom;
    probs[0] = Instance::no_purchase_weight / denom;
    return probs;
}

double expected_revenue(const Instance& inst, const Assortment& s,
                        std::span<const double> weights_override) {
    s.validate_for(inst);
    const bool use_override = !weights_override.empty();
    if (use_override && weights_override.size() != static_cast<std::size_t>(inst.n_items))
        throw bad_parameter("weights_override must have exactly n_items entries");

    double denom = Instance::no_purchase_weight;
    double numer = 0.0;
    for (int item : s.items()) {
        const double w =
            use_override ? weights_override[static_cast<std::size_t>(item - 1)] : inst.weight(item);
        if (use_override && (!(w >= 0.0) || !std::isfinite(w)))
            throw bad_parameter("weights_override entries must be nonnegative");
        denom += w;
        numer += inst.reward(item) * w;
    }
    return numer / denom;
}

SwitchDelta switch_deltas(const Assortment& prev, const Assortment& next) {
    const auto& a = prev.items();
    const auto& b = next.items();
    std::size_t i = 0, j = 0;
    int sym_diff = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++sym_diff;
            ++i;
        } else {
            ++sym_diff;
            ++j;
        }
    }
    sym_diff += static_cast<int>((a.size() - i) + (b.size() - j));
    return SwitchDelta{sym_diff > 0 ? 1 : 0, sym_diff};
}

}  // namespace mnlb
