#include "mnlb/environment.hpp"

#include <algorithm>

namespace mnlb {

int EpochOutcome::purchases_of(int item) const {
    const auto& items = offered.items();
    const auto it = std::lower_bound(items.begin(), items.end(), item);
    if (it == items.end() || *it != item) return 0;
    return purchase_counts[static_cast<std::size_t>(it - items.begin())];
}

int EpochOutcome::total_purchases() const {
    int total = 0;
    for (int c : purchase_counts) total += c;
    return total;
}

int sample_choice(const Instance& inst, const Assortment& s, Rng& rng) {
    s.validate_for(inst);
    double denom = Instance::no_purchase_weight;
    for (int item : s.items()) denom += inst.weight(item);

    const double u = rng.next_unit();
    double cum = 0.0;
    for (int item : s.items()) {
        cum += inst.weight(item) / denom;
        if (u < cum) return item;
    }
    return 0;
}

EpochOutcome run_epoch(const Instance& inst, const Assortment& s, SimClock& clock, Rng& rng) {
    if (clock.exhausted()) throw horizon_exhausted("no steps left at epoch start");
    s.validate_for(inst);

    EpochOutcome out;
    out.offered = s;
    out.purchase_counts.assign(s.size(), 0);

    while (true) {
        ++clock.t;
        ++out.epoch_length;
        const int choice = sample_choice(inst, s, rng);
        out.step_choices.push_back(choice);
        if (choice == 0) break;

        const auto& items = s.items();
        const auto it = std::lower_bound(items.begin(), items.end(), choice);
        ++out.purchase_counts[static_cast<std::size_t>(it - items.begin())];
        out.realized_revenue += inst.reward(choice);

        if (clock.exhausted()) {
            out.truncated = true;
            break;
        }
    }
    return out;
}

}  // namespace mnlb
