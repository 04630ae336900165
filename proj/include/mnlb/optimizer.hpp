#pragma once

#include <span>

#include "mnlb/core.hpp"

namespace mnlb {

/// Result of the capacitated revenue maximization: the optimal revenue
/// theta_star (the unique fixed point of G), the maximizing set under the
/// sum-of-2^i tie-break, and solver diagnostics.
struct FixedPointResult {
    double theta_star = 0.0;
    Assortment optimal_set;
    int iterations = 0;
    double residual = 0.0;  // |G(theta_star) - theta_star|
};

/// argmax over |S| <= capacity of sum_{i in S} weights_i * (rewards_i - theta).
/// Among maximizers returns the set minimizing sum_{i in S} 2^i: items are
/// ranked by (gain descending, index ascending) and included while the gain is
/// strictly positive. Zero-gain items are excluded.
Assortment static_linear_argmax(std::span<const double> weights, std::span<const double> rewards,
                                double theta, int capacity);

/// G(theta) = R(S_theta, w) with S_theta the static linear argmax at theta;
/// 0 when S_theta is empty. Empty `weights` means the instance's true weights.
double g_value(const Instance& inst, double theta, std::span<const double> weights = {});

/// Finds theta_star with G(theta_star) = theta_star = max_{|S|<=K} R(S, w) by
/// bisection over [0, max r_i], using the sign structure of G: the argmax value
/// sum w_i (r_i - theta) exceeds theta exactly when theta < theta_star.
FixedPointResult solve_theta_star(const Instance& inst, std::span<const double> weights = {},
                                  double tolerance = 1e-12);

/// Exhaustive verification oracle: enumerates every subset with |S| <= K
/// (requires N <= 22), picking the revenue maximizer; revenue ties within
/// 1e-12 are resolved by the sum-of-2^i rule.
FixedPointResult brute_force_optimum(const Instance& inst, std::span<const double> weights = {});

}  // namespace mnlb
