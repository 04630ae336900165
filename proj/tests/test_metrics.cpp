#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "mnlb/harness.hpp"
#include "mnlb/instances.hpp"
#include "mnlb/metrics.hpp"
#include "mnlb/optimizer.hpp"
#include "mnlb/policies.hpp"

using namespace mnlb;

namespace {

EpochOutcome fixed_epoch(const Instance& inst, const Assortment& s, std::uint64_t len,
                         SimClock& clock) {
    // Deterministic epoch: len - 1 purchases of the first offered item, then a
    // no-purchase (or truncation when len consumes the horizon).
    EpochOutcome out;
    out.offered = s;
    out.purchase_counts.assign(s.size(), 0);
    out.epoch_length = len;
    for (std::uint64_t k = 1; k < len; ++k) {
        out.step_choices.push_back(s.items().front());
        out.purchase_counts[0] += 1;
        out.realized_revenue += inst.reward(s.items().front());
    }
    out.step_choices.push_back(0);
    clock.t += len;
    return out;
}

}  // namespace

TEST_CASE("offering the optimal set accrues zero regret") {
    const Instance inst = gen_uniform_random(5, 2, 3);
    const FixedPointResult fp = solve_theta_star(inst);
    RunTrace trace(inst, fp.theta_star, TraceMode::kEpoch);
    SimClock clock;
    for (int e = 0; e < 20; ++e) {
        const std::uint64_t t0 = clock.t;
        trace.add_epoch(t0, fixed_epoch(inst, fp.optimal_set, 3, clock));
    }
    CHECK(trace.current().cum_regret == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(trace.current().asst_switches == 0);
    CHECK(trace.current().item_switches == 0);
}

TEST_CASE("constant suboptimal set accrues gap times steps, exactly") {
    const Instance inst = gen_uniform_random(5, 2, 4);
    const FixedPointResult fp = solve_theta_star(inst);
    Assortment sub({1});
    if (sub == fp.optimal_set) sub = Assortment({2});
    const double gap = fp.theta_star - expected_revenue(inst, sub);
    RunTrace trace(inst, fp.theta_star, TraceMode::kEpoch);
    SimClock clock;
    std::uint64_t steps = 0;
    double epoch_sum = 0.0;
    for (int e = 0; e < 17; ++e) {
        const std::uint64_t t0 = clock.t;
        const auto out = fixed_epoch(inst, sub, 4, clock);
        trace.add_epoch(t0, out);
        steps += out.epoch_length;
        epoch_sum += static_cast<double>(out.epoch_length) * gap;
    }
    CHECK(trace.current().t == steps);
    CHECK(trace.current().cum_regret == epoch_sum);  // exact epoch-level identity
}

TEST_CASE("a single switch charges one assortment and two item switches") {
    const Instance inst = gen_uniform_random(4, 2, 5);
    RunTrace trace(inst, solve_theta_star(inst).theta_star, TraceMode::kEpoch);
    SimClock clock;
    trace.add_epoch(clock.t, fixed_epoch(inst, Assortment({1, 2}), 2, clock));
    trace.add_epoch(clock.t, fixed_epoch(inst, Assortment({2, 3}), 2, clock));
    CHECK(trace.current().asst_switches == 1);
    CHECK(trace.current().item_switches == 2);
}

TEST_CASE("full and epoch traces agree exactly on cumulative regret") {
    const Instance inst = gen_uniform_random(6, 3, 6);
    const double theta_star = solve_theta_star(inst).theta_star;
    RunPoint full_final, epoch_final;
    std::vector<TraceRow> full_rows;
    for (TraceMode mode : {TraceMode::kFull, TraceMode::kEpoch}) {
        DeferredUcbPolicy policy(inst, true);
        SimClock clock{0, 2000};
        Rng rng(12);
        RunTrace trace(inst, theta_star, mode);
        while (!clock.exhausted()) {
            const std::uint64_t t0 = clock.t;
            trace.add_epoch(t0, policy.step(clock, rng));
        }
        if (mode == TraceMode::kFull) {
            full_final = trace.current();
            full_rows = trace.rows();
        } else {
            epoch_final = trace.current();
        }
    }
    CHECK(full_final.cum_regret == epoch_final.cum_regret);
    CHECK(full_final.asst_switches == epoch_final.asst_switches);
    CHECK(full_rows.size() == 2000);
    // cumulative columns are non-decreasing row-wise
    for (std::size_t i = 1; i < full_rows.size(); ++i) {
        CHECK(full_rows[i].cum_regret >= full_rows[i - 1].cum_regret);
        CHECK(full_rows[i].asst_switches >= full_rows[i - 1].asst_switches);
        CHECK(full_rows[i].item_switches >= full_rows[i - 1].item_switches);
    }
}

TEST_CASE("switch relation holds row-wise on policy traces") {
    const Instance inst = gen_uniform_random(7, 3, 8);
    const double theta_star = solve_theta_star(inst).theta_star;
    const std::uint64_t bound = static_cast<std::uint64_t>(std::min(2 * inst.capacity, inst.n_items));
    for (const char* name : {"baseline_ucb", "at_ducb", "fh_ducb"}) {
        PolicySpec spec;
        spec.name = name;
        auto policy = make_policy(spec, inst, 3000);
        SimClock clock{0, 3000};
        Rng rng(2);
        RunTrace trace(inst, theta_star, TraceMode::kEpoch);
        while (!clock.exhausted()) {
            const std::uint64_t t0 = clock.t;
            trace.add_epoch(t0, policy->step(clock, rng));
        }
        for (const TraceRow& row : trace.rows()) {
            CHECK(row.asst_switches <= row.item_switches);
            CHECK(row.item_switches <= bound * row.asst_switches);
        }
    }
}

TEST_CASE("checkpoints capture cumulative state at exact times") {
    const Instance inst = gen_uniform_random(5, 2, 9);
    const double theta_star = solve_theta_star(inst).theta_star;
    DeferredUcbPolicy policy(inst, true);
    SimClock clock{0, 1000};
    Rng rng(3);
    RunTrace trace(inst, theta_star, TraceMode::kFull, {1, 137, 1000});
    while (!clock.exhausted()) {
        const std::uint64_t t0 = clock.t;
        trace.add_epoch(t0, policy.step(clock, rng));
    }
    REQUIRE(trace.checkpoints().size() == 3);
    for (const RunPoint& p : trace.checkpoints()) {
        // the full rows are the per-step truth
        const TraceRow& row = trace.rows().at(static_cast<std::size_t>(p.t - 1));
        CHECK(row.t == p.t);
        CHECK(p.cum_regret == row.cum_regret);
        CHECK(p.asst_switches == row.asst_switches);
        CHECK(p.item_switches == row.item_switches);
    }
}

TEST_CASE("downsample carries cumulative values forward") {
    std::vector<TraceRow> rows;
    for (std::uint64_t t : {3ULL, 6ULL, 9ULL}) {
        TraceRow r;
        r.t = t;
        r.cum_regret = static_cast<double>(t);
        r.asst_switches = t / 3;
        rows.push_back(r);
    }

    bool truncated = false;
    const auto single = downsample(rows, {9}, &truncated);
    REQUIRE(single.size() == 1);
    CHECK(single[0].t == 9);
    CHECK(single[0].cum_regret == 9.0);
    CHECK(!truncated);

    const auto mid = downsample(rows, {2, 4, 8, 9});
    REQUIRE(mid.size() == 4);
    CHECK(mid[0].cum_regret == 0.0);  // before any recorded row
    CHECK(mid[1].cum_regret == 3.0);
    CHECK(mid[2].cum_regret == 6.0);
    CHECK(mid[3].cum_regret == 9.0);

    const auto empty = downsample(rows, {});
    CHECK(empty.empty());

    const auto past = downsample(rows, {3, 12}, &truncated);
    CHECK(past.size() == 1);
    CHECK(truncated);

    // idempotence on an already-downsampled trace with the same grid
    const std::vector<std::uint64_t> grid{2, 6, 9};
    const auto once = downsample(rows, grid);
    const auto twice = downsample(once, grid);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].t == twice[i].t);
        CHECK(once[i].cum_regret == twice[i].cum_regret);
    }

    CHECK_THROWS_AS(downsample(rows, {5, 5}), bad_parameter);
}

TEST_CASE("fit_scaling recovers exact synthetic laws") {
    std::vector<std::pair<double, double>> log_points, sqrt_points;
    for (int k = 10; k <= 16; ++k) {
        const double t = std::pow(2.0, k);
        log_points.emplace_back(t, 2.5 * std::log2(t));
        sqrt_points.emplace_back(t, 0.7 * std::sqrt(t));
    }
    const ScalingFit lf = fit_scaling(log_points);
    CHECK(lf.model == ScalingModel::kLog);
    CHECK(lf.coefficient == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(lf.r2 == doctest::Approx(1.0).epsilon(1e-12));

    const ScalingFit sf = fit_scaling(sqrt_points);
    CHECK(sf.model == ScalingModel::kSqrt);
    CHECK(sf.coefficient == doctest::Approx(0.7).epsilon(1e-12));

    CHECK_THROWS_AS(fit_scaling(std::vector<std::pair<double, double>>{{1024.0, 1.0}, {2048.0, 2.0}}),
                    bad_parameter);
    CHECK_THROWS_AS(
        fit_scaling(std::vector<std::pair<double, double>>{{8.0, 1.0}, {8.0, 2.0}, {16.0, 3.0}}),
        bad_parameter);
}
