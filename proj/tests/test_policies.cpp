#include <doctest.h>

#include <cmath>
#include <vector>

#include "mnlb/instances.hpp"
#include "mnlb/optimizer.hpp"
#include "mnlb/policies.hpp"

using namespace mnlb;

namespace {

// Runs a policy to the horizon, returning the number of epochs.
std::uint64_t drive(EpochPolicy& policy, const Instance&, std::uint64_t horizon,
                    std::uint64_t seed) {
    SimClock clock{0, horizon};
    Rng rng(seed);
    std::uint64_t epochs = 0;
    while (!clock.exhausted()) {
        policy.step(clock, rng);
        ++epochs;
    }
    return epochs;
}

}  // namespace

TEST_CASE("anytime UCB radius formula") {
    // mean 0, one epoch, one item, first epoch: both terms collapse to 48 ln 2
    CHECK(ucb_radius_atducb(0.0, 1, 1, 1) == 48.0 * std::log(2.0));
    CHECK(ucb_radius_atducb(0.0, 1, 1, 1) == doctest::Approx(33.2711).epsilon(1e-5));
    // radius vanishes as T_i grows with mean 0
    CHECK(ucb_radius_atducb(0.0, 1ull << 40, 1, 1) < 1e-9);
    CHECK_THROWS_AS(ucb_radius_atducb(0.5, 0, 1, 1), bad_parameter);
}

TEST_CASE("AT-DUCB offers the lowest-index singleton first on a uniform-reward instance") {
    const Instance inst = gen_lowerbound_base(6);  // r all one, K = 1
    DeferredUcbPolicy policy(inst, true);
    CHECK(policy.current_assortment() == Assortment({1}));
}

TEST_CASE("AT-DUCB update gate fires exactly at powers of two") {
    // Single item: T_1 equals the epoch index.
    Instance inst;
    inst.n_items = 1;
    inst.capacity = 1;
    inst.rewards = {1.0};
    inst.weights = {0.5};
    DeferredUcbPolicy policy(inst, true);
    SimClock clock;
    Rng rng(3);
    std::vector<std::uint64_t> fires;
    for (int e = 1; e <= 9; ++e) {
        policy.step(clock, rng);
        fires.push_back(policy.estimator().item(1).update_count);
    }
    CHECK(fires == std::vector<std::uint64_t>{1, 2, 2, 3, 3, 3, 3, 4, 4});
}

TEST_CASE("UCB values are non-increasing and per-item updates stay in budget") {
    const Instance inst = gen_uniform_random(6, 3, 91);
    const std::uint64_t horizon = 4096;
    DeferredUcbPolicy policy(inst, true);
    SimClock clock{0, horizon};
    Rng rng(17);
    std::vector<double> last(6, 1.0);
    while (!clock.exhausted()) {
        policy.step(clock, rng);
        const auto ucbs = policy.estimator().ucb_vector();
        for (int i = 0; i < 6; ++i) {
            CHECK(ucbs[static_cast<std::size_t>(i)] <= last[static_cast<std::size_t>(i)]);
            last[static_cast<std::size_t>(i)] = ucbs[static_cast<std::size_t>(i)];
        }
    }
    const auto budget = static_cast<std::uint64_t>(std::floor(std::log2(horizon))) + 1;
    std::uint64_t total = 0;
    for (int i = 1; i <= 6; ++i) {
        CHECK(policy.estimator().item(i).update_count <= budget);
        total += policy.estimator().item(i).update_count;
    }
    CHECK(policy.argmax_recomputations() <= 6 * budget);
    CHECK(policy.argmax_recomputations() <= total);
}

TEST_CASE("AT-DUCB optimism: the UCB rarely dips below the true weight") {
    int bad_runs = 0;
    const int runs = 200;
    for (int r = 0; r < runs; ++r) {
        const Instance inst = gen_uniform_random(10, 4, 7000 + static_cast<std::uint64_t>(r));
        DeferredUcbPolicy policy(inst, true);
        SimClock clock{0, 10000};
        Rng rng(static_cast<std::uint64_t>(r));
        bool dipped = false;
        while (!clock.exhausted()) {
            policy.step(clock, rng);
            for (int i = 1; i <= 10; ++i)
                if (policy.estimator().item(i).ucb < inst.weight(i)) dipped = true;
        }
        if (dipped) ++bad_runs;
    }
    CHECK(bad_runs <= runs / 20);  // at most 5%
}

TEST_CASE("baseline and AT-DUCB coincide while epoch counts are powers of two") {
    const Instance inst = gen_uniform_random(3, 3, 55);
    DeferredUcbPolicy baseline(inst, false);
    DeferredUcbPolicy deferred(inst, true);
    SimClock cb, cd;
    Rng rb(123), rd(123);
    for (int epoch = 1; epoch <= 3; ++epoch) {  // every T_i so far is 1 or 2
        const EpochOutcome ob = baseline.step(cb, rb);
        const EpochOutcome od = deferred.step(cd, rd);
        CHECK(ob.offered == od.offered);
        CHECK(ob.step_choices == od.step_choices);
        CHECK(baseline.estimator().ucb_vector() == deferred.estimator().ucb_vector());
    }
}

TEST_CASE("tau0 arithmetic") {
    CHECK(fh_tau0(1ull << 20, 16) == 5);
    CHECK(fh_tau0(1024, 4) == 4);  // log2 log2 256 = 3
    CHECK(fh_tau0(8, 4) == 1);     // clamped
    CHECK(fh_tau0(2, 4) == 1);
}

TEST_CASE("stage condition thresholds") {
    FhState st(4, 1024);
    REQUIRE(st.tau0 == 4);
    FhItemState& item = st.item(1);
    item.stage = 2;  // below tau0: weight-agnostic branch
    item.pre_stage_epochs = 16;
    item.stage_epochs = 65;  // threshold 1 + sqrt(1024*16/4) = 65
    CHECK(fh_condition(st, 1));
    item.stage_epochs = 64;
    CHECK(!fh_condition(st, 1));

    // at or past tau0 the dead-item conjunct gates everything
    item.stage = 4;
    item.stage_epochs = 1u << 20;
    item.ucb = 1.0;
    item.ucb_at_tau0 = 1.0 / std::sqrt(4.0 * 1024.0);  // not strictly above the floor
    CHECK(!fh_condition(st, 1));
    item.ucb_at_tau0 = 1.0;
    CHECK(fh_condition(st, 1));
}

TEST_CASE("FH-DUCB first epochs follow the stage schedule") {
    const Instance inst = gen_uniform_random(4, 2, 31);
    FhDucbPolicy policy(inst, 1024);
    SimClock clock{0, 1024};
    Rng rng(8);

    const Assortment initial = policy.current_assortment();
    const EpochOutcome first = policy.step(clock, rng);
    CHECK(first.offered == initial);               // no update can fire at epoch 1
    CHECK(policy.argmax_recomputations() == 0);
    for (int i = 1; i <= 4; ++i) CHECK(policy.state().item(i).stage == 1);

    policy.step(clock, rng);  // epoch 2: offered items concluded stage 1
    for (int item : initial.items()) CHECK(policy.state().item(item).stage == 2);
    for (int i = 1; i <= 4; ++i)
        if (!initial.contains(i)) CHECK(policy.state().item(i).stage == 1);
}

TEST_CASE("FH-DUCB stage totals stay small") {
    const Instance inst = gen_uniform_random(6, 3, 77);
    FhDucbPolicy policy(inst, 1 << 15);
    drive(policy, inst, 1 << 15, 5);
    // tau0 = ceil(log2 log2 (32768/6) + 1) = 5; a couple of adaptive stages on top
    for (int i = 1; i <= 6; ++i) CHECK(policy.state().item(i).stage <= 5 + 4);
    CHECK(fh_horizon_below_theory(1 << 15, 6));
    CHECK(!fh_horizon_below_theory(1 << 15, 2));
}

TEST_CASE("ESUCB probe budget formula and full-constant behaviour") {
    EsucbConfig cfg;
    cfg.delta = 1e-4;
    const double expected =
        44840.0 * 5.0 * std::pow(std::log(5.0 * 1e4 / 1e-4), 3) / ((1.0 / 3.0) * (1.0 / 3.0));
    CHECK(EsucbPolicy::t_max_for(cfg, 5, 10000, 1.0 / 3.0) == expected);
    CHECK(expected > 1e4);  // dwarfs the horizon: the run never leaves probe 1

    const Instance inst = gen_lowerbound_base(5);
    EsucbPolicy policy(inst, 10000, cfg);
    drive(policy, inst, 10000, 21);
    CHECK(policy.outer_iteration() == 1);
    CHECK(!policy.outer_records().front().concluded);
    CHECK(policy.outer_records().front().t_max == expected);
}

TEST_CASE("ESUCB stride schedule shrinks by two thirds") {
    const Instance inst = gen_lowerbound_base(4);
    EsucbConfig cfg;
    cfg.constant_scale = 1e-9;  // tiny budgets so invocations conclude fast
    EsucbPolicy policy(inst, 1 << 12, cfg);
    drive(policy, inst, 1 << 12, 4);
    const auto& recs = policy.outer_records();
    REQUIRE(recs.size() >= 3);
    double eps = 1.0 / 3.0;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(recs[i].epsilon == eps);
        eps *= 2.0 / 3.0;
    }
}

TEST_CASE("ESUCB outer update rule follows the probe verdict") {
    const Instance inst = gen_lowerbound_base(6);
    EsucbConfig cfg;
    const std::uint64_t horizon = 1 << 15;
    cfg.constant_scale =
        (static_cast<double>(horizon) / 8.0) / EsucbPolicy::t_max_for(cfg, 6, horizon, 1.0 / 3.0);
    EsucbPolicy policy(inst, horizon, cfg);
    drive(policy, inst, horizon, 11);

    const auto& recs = policy.outer_records();
    REQUIRE(recs.size() >= 2);
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        if (!recs[i].concluded) continue;
        const double next = recs[i].returned_true ? recs[i].theta_hat - recs[i].epsilon
                                                  : recs[i].theta_hat;
        CHECK(recs[i + 1].theta_hat == next);
    }
    // The first probe asks for revenue 2/3 on a 1/3-revenue instance: must fail.
    CHECK(recs[0].returned_true);

    // Empirical revenue-estimate sandwich against the optimizer's theta_star.
    const double theta_star = solve_theta_star(inst).theta_star;
    for (const auto& rec : recs) {
        CHECK(rec.theta_hat - 3.0 * rec.epsilon <= theta_star + 1e-9);
        CHECK(theta_star <= rec.theta_hat + 1e-9);
    }
}

TEST_CASE("ESUCB item switches per invocation stay within the update budget") {
    const Instance inst = gen_uniform_random(8, 3, 13);
    EsucbConfig cfg;
    const std::uint64_t horizon = 1 << 15;
    cfg.constant_scale =
        (static_cast<double>(horizon) / 8.0) / EsucbPolicy::t_max_for(cfg, 8, horizon, 1.0 / 3.0);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        EsucbPolicy policy(inst, horizon, cfg);
        drive(policy, inst, horizon, seed);
        for (const auto& rec : policy.outer_records()) {
            CHECK(rec.branch_flips <= 1);
            CHECK(rec.item_switches <=
                  2 * rec.ucb_updates + 2 * static_cast<std::uint64_t>(inst.capacity));
        }
    }
}

TEST_CASE("no-reset variant keeps counters across invocations") {
    const Instance inst = gen_uniform_random(5, 2, 29);
    EsucbConfig cfg;
    cfg.constant_scale = 1e-7;
    const std::uint64_t horizon = 1 << 14;

    EsucbConfig noreset = cfg;
    noreset.reset_counters = false;
    EsucbPolicy shared(inst, horizon, noreset, true);
    CHECK(shared.name() == "esucb_noreset");
    drive(shared, inst, horizon, 6);
    REQUIRE(shared.outer_iteration() > 2);
    // Counters never restart, so the power-of-two gate fires at most
    // floor(log2 epochs) + 1 times per item across the whole run.
    const auto budget = static_cast<std::uint64_t>(std::floor(std::log2(horizon))) + 1;
    std::uint64_t shared_fires = 0;
    for (int i = 1; i <= 5; ++i) {
        CHECK(shared.estimator().item(i).update_count <= budget);
        shared_fires += shared.estimator().item(i).update_count;
    }

    EsucbPolicy fresh(inst, horizon, cfg, false);
    drive(fresh, inst, horizon, 6);
    std::uint64_t fresh_fires = 0;
    for (const auto& rec : fresh.outer_records()) fresh_fires += rec.ucb_updates;
    CHECK(fresh_fires >= shared_fires);
}
