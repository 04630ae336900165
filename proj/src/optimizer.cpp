#include "mnlb/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

namespace mnlb {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr int kMaxBisectionIters = 200;

std::span<const double> effective_weights(const Instance& inst, std::span<const double> weights) {
    if (weights.empty()) return std::span<const double>(inst.weights);
    if (weights.size() != static_cast<std::size_t>(inst.n_items))
        throw bad_parameter("weight vector must have exactly n_items entries");
    return weights;
}

double revenue_of_mask(const Instance& inst, std::span<const double> w, std::uint32_t mask) {
    double denom = Instance::no_purchase_weight;
    double numer = 0.0;
    for (int i = 0; i < inst.n_items; ++i) {
        if (mask & (1u << i)) {
            denom += w[static_cast<std::size_t>(i)];
            numer += inst.rewards[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        }
    }
    return numer / denom;
}

Assortment mask_to_assortment(std::uint32_t mask, int n) {
    std::vector<int> items;
    for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) items.push_back(i + 1);
    return Assortment(std::move(items));
}

}  // namespace

Assortment static_linear_argmax(std::span<const double> weights, std::span<const double> rewards,
                                double theta, int capacity) {
    if (weights.size() != rewards.size())
        throw bad_parameter("weights and rewards must have equal length");
    const int n = static_cast<int>(weights.size());

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> gain(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (!(weights[static_cast<std::size_t>(i)] >= 0.0))
            throw bad_parameter("weights must be nonnegative");
        gain[static_cast<std::size_t>(i)] =
            weights[static_cast<std::size_t>(i)] * (rewards[static_cast<std::size_t>(i)] - theta);
    }
    // Gain descending, index ascending: within equal gains the lowest index
    // comes first, which realizes the sum-of-2^i tie-break.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ga = gain[static_cast<std::size_t>(a)];
        const double gb = gain[static_cast<std::size_t>(b)];
        if (ga != gb) return ga > gb;
        return a < b;
    });

    std::vector<int> chosen;
    for (int idx : order) {
        if (static_cast<int>(chosen.size()) >= capacity) break;
        if (!(gain[static_cast<std::size_t>(idx)] > 0.0)) break;
        chosen.push_back(idx + 1);
    }
    return Assortment(std::move(chosen));
}

double g_value(const Instance& inst, double theta, std::span<const double> weights) {
    const auto w = effective_weights(inst, weights);
    const Assortment s = static_linear_argmax(w, inst.rewards, theta, inst.capacity);
    if (s.empty()) return 0.0;
    return expected_revenue(inst, s, weights.empty() ? std::span<const double>{} : w);
}

FixedPointResult solve_theta_star(const Instance& inst, std::span<const double> weights,
                                  double tolerance) {
    if (!(tolerance > 0.0)) throw bad_parameter("tolerance must be positive");
    const auto w = effective_weights(inst, weights);

    double lo = 0.0;
    double hi = inst.max_reward();
    int iters = 0;
    while (hi - lo > tolerance && iters < kMaxBisectionIters) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // hit floating-point resolution
        const Assortment s = static_linear_argmax(w, inst.rewards, mid, inst.capacity);
        double value = 0.0;
        for (int item : s.items())
            value += w[static_cast<std::size_t>(item - 1)] * (inst.reward(item) - mid);
        if (value > mid)
            lo = mid;
        else
            hi = mid;
        ++iters;
    }

    FixedPointResult result;
    result.theta_star = 0.5 * (lo + hi);
    result.optimal_set = static_linear_argmax(w, inst.rewards, result.theta_star, inst.capacity);
    result.iterations = iters;
    result.residual = std::abs(g_value(inst, result.theta_star, weights) - result.theta_star);
    return result;
}

FixedPointResult brute_force_optimum(const Instance& inst, std::span<const double> weights) {
    if (inst.n_items > 22)
        throw enumeration_refused("brute-force enumeration refused for n_items = " +
                                  std::to_string(inst.n_items) + " (limit 22)");
    const auto w = effective_weights(inst, weights);
    const std::uint32_t mask_end = 1u << inst.n_items;

    double best_value = 0.0;  // empty set
    int evaluated = 1;
    for (std::uint32_t mask = 1; mask < mask_end; ++mask) {
        if (std::popcount(mask) > inst.capacity) continue;
        best_value = std::max(best_value, revenue_of_mask(inst, w, mask));
        ++evaluated;
    }

    // Second pass: among revenue ties the smallest mask wins. Bit i of the
    // mask is item i+1, so mask order equals sum-of-2^i order.
    std::uint32_t best_mask = 0;
    if (best_value > kTieTolerance) {
        for (std::uint32_t mask = 1; mask < mask_end; ++mask) {
            if (std::popcount(mask) > inst.capacity) continue;
            if (revenue_of_mask(inst, w, mask) >= best_value - kTieTolerance) {
                best_mask = mask;
                break;
            }
        }
    }

    FixedPointResult result;
    result.optimal_set = mask_to_assortment(best_mask, inst.n_items);
    result.theta_star = best_mask == 0 ? 0.0 : revenue_of_mask(inst, w, best_mask);
    result.iterations = evaluated;
    result.residual = 0.0;
    return result;
}

}  // namespace mnlb
