#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mnlb/core.hpp"
#include "mnlb/environment.hpp"

namespace mnlb {

/// Confidence radius added to the empirical mean by the anytime policy:
/// sqrt(48 mean ln(sqrt(N) l + 1) / T_i) + 48 ln(sqrt(N) l + 1) / T_i,
/// natural logarithm, where l is the global epoch count.
double ucb_radius_atducb(double mean, std::uint64_t t_i, std::uint64_t epoch_count, int n_items);

/// Per-item counts and the non-increasing optimistic weight estimate shared by
/// the epoch-based UCB policies.
struct ItemEstimator {
    std::uint64_t epoch_count = 0;     // epochs offering the item (T_i)
    std::uint64_t purchase_total = 0;  // purchases across those epochs (n_i)
    double ucb = 1.0;
    std::uint64_t update_count = 0;    // instrumentation: UCB recomputation events
};

struct EstimatorState {
    std::vector<ItemEstimator> items;
    std::uint64_t epoch_index = 0;  // global epoch count l

    explicit EstimatorState(int n_items) : items(static_cast<std::size_t>(n_items)) {}

    ItemEstimator& item(int i) { return items[static_cast<std::size_t>(i - 1)]; }
    const ItemEstimator& item(int i) const { return items[static_cast<std::size_t>(i - 1)]; }
    // Empirical mean n_i / T_i; defined as 0 before the first epoch.
    double mean(int i) const;
    std::vector<double> ucb_vector() const;
    void reset_counts();  // T_i, n_i, ucb back to the initial state
};

/// An epoch-granularity bandit policy bound to one simulation run: step() runs
/// exactly one epoch (decide, offer, absorb the outcome).
class EpochPolicy {
public:
    virtual ~EpochPolicy() = default;
    virtual EpochOutcome step(SimClock& clock, Rng& rng) = 0;
    virtual const Assortment& current_assortment() const = 0;
    virtual std::string name() const = 0;
};

/// Epoch-based UCB over the revenue objective. With `deferred` the estimate of
/// an item is recomputed only when its epoch count hits a power of two
/// (AT-DUCB); without it the recomputation happens every epoch (the
/// high-switching baseline).
class DeferredUcbPolicy : public EpochPolicy {
public:
    DeferredUcbPolicy(Instance inst, bool deferred);

    EpochOutcome step(SimClock& clock, Rng& rng) override;
    const Assortment& current_assortment() const override { return current_; }
    std::string name() const override { return deferred_ ? "at_ducb" : "baseline_ucb"; }

    const EstimatorState& estimator() const { return est_; }
    std::uint64_t argmax_recomputations() const { return recomputes_; }

private:
    Instance inst_;
    bool deferred_;
    EstimatorState est_;
    Assortment current_;
    bool dirty_ = false;
    std::uint64_t recomputes_ = 0;
};

/// Per-item stage bookkeeping for the fixed-horizon policy. Stage boundaries
/// are the item's UCB updates; the pre-stage totals exclude the running stage.
struct FhItemState {
    int stage = 1;                          // tau_i
    std::uint64_t stage_epochs = 0;         // |T(i, tau_i)|
    std::uint64_t stage_purchases = 0;      // n_{i, tau_i}
    std::uint64_t pre_stage_epochs = 0;     // T_i^(tau_i)
    std::uint64_t pre_stage_purchases = 0;  // n_i^(tau_i)
    double ucb = 1.0;                       // v-hat_{i, tau_i}
    double ucb_at_tau0 = 1.0;               // frozen when the item enters stage tau0
    std::uint64_t update_count = 0;
};

struct FhState {
    std::vector<FhItemState> items;
    std::uint64_t horizon = 0;
    int tau0 = 1;
    std::uint64_t epoch_index = 0;

    FhState(int n_items, std::uint64_t horizon);
    FhItemState& item(int i) { return items[static_cast<std::size_t>(i - 1)]; }
    const FhItemState& item(int i) const { return items[static_cast<std::size_t>(i - 1)]; }
};

/// tau0 = ceil(log2 log2 (T/N) + 1), clamped to at least 1.
int fh_tau0(std::uint64_t horizon, int n_items);

/// The stage-conclusion trigger P(i, tau_i). Before stage tau0 the threshold
/// is weight-agnostic; from tau0 on it adapts to the UCB and additionally
/// requires ucb_at_tau0 > 1/sqrt(NT).
bool fh_condition(const FhState& state, int item);

/// Theory behind the fixed-horizon policy assumes T >= N^4; shorter horizons
/// run fine but deserve a caller-side warning.
bool fh_horizon_below_theory(std::uint64_t horizon, int n_items);

class FhDucbPolicy : public EpochPolicy {
public:
    FhDucbPolicy(Instance inst, std::uint64_t horizon);

    EpochOutcome step(SimClock& clock, Rng& rng) override;
    const Assortment& current_assortment() const override { return current_; }
    std::string name() const override { return "fh_ducb"; }

    const FhState& state() const { return state_; }
    std::uint64_t total_stages() const;  // sum over items of tau_i
    std::uint64_t argmax_recomputations() const { return recomputes_; }

private:
    void update_item(int item);

    Instance inst_;
    FhState state_;
    Assortment current_;
    std::uint64_t recomputes_ = 0;
};

struct EsucbConfig {
    double delta = 0.0;  // 0 means the 1/T default
    double c1 = 44840.0;
    double c2 = 688.0;
    double c3 = 21732.0;
    // Desk-scale knob multiplying c1, c2, c3; the faithful constants push
    // t_max beyond any practical horizon.
    double constant_scale = 1.0;
    // false: keep T_i, n_i, ucb across probe invocations (the low item-switch
    // variant); true: re-initialize them per invocation as listed.
    bool reset_counters = true;
    // The probe radius log term; natural log by default.
    bool radius_log2 = false;

    double effective_delta(std::uint64_t horizon) const;
};

/// Exponential-stride search for the optimal revenue: an outer loop shrinks
/// the stride by 2/3 per iteration and probes `theta_r` achievability with an
/// inner deferred-update UCB routine over the linear objective at fixed theta.
class EsucbPolicy : public EpochPolicy {
public:
    /// Per outer iteration: the revenue estimate and stride at entry, the
    /// probe budget, and instrumentation gathered while the probe ran.
    struct OuterRecord {
        double theta_hat = 0.0;
        double epsilon = 0.0;
        double t_max = 0.0;
        bool concluded = false;
        bool returned_true = false;
        std::uint64_t epochs = 0;
        std::uint64_t item_switches = 0;  // within-invocation symmetric differences
        std::uint64_t ucb_updates = 0;    // UCB recomputation events in the invocation
        int branch_flips = 0;
    };

    EsucbPolicy(Instance inst, std::uint64_t horizon, EsucbConfig cfg, bool noreset_name = false);

    EpochOutcome step(SimClock& clock, Rng& rng) override;
    const Assortment& current_assortment() const override { return current_; }
    std::string name() const override { return noreset_name_ ? "esucb_noreset" : "esucb"; }

    double theta_hat() const { return theta_hat_; }
    double epsilon() const { return epsilon_; }
    int outer_iteration() const { return static_cast<int>(records_.size()); }
    const std::vector<OuterRecord>& outer_records() const { return records_; }
    const EstimatorState& estimator() const { return est_; }
    static double t_max_for(const EsucbConfig& cfg, int n_items, std::uint64_t horizon,
                            double epsilon);

private:
    void begin_invocation();
    void fold_epoch(const EpochOutcome& out);

    Instance inst_;
    std::uint64_t horizon_;
    EsucbConfig cfg_;
    bool noreset_name_;
    double log_cubed_;    // ln^3(NT/delta)
    double radius_log_;   // log(NT/delta + 1) in the configured base

    double theta_hat_ = 1.0;
    double epsilon_ = 1.0 / 3.0;
    EstimatorState est_;

    bool probe_active_ = false;
    double theta_l_ = 0.0;
    double theta_r_ = 0.0;
    double t_max_ = 0.0;
    double bonus_ = 0.0;  // c2 sqrt(N t_max ln^3) + c3 N ln^3
    double rho_ = 0.0;
    double rho_hat_ = 1.0;
    bool b_ = false;
    std::uint64_t t_probe_ = 0;
    bool prev_branch_left_ = false;
    bool have_prev_ = false;
    Assortment prev_offered_;

    Assortment current_;
    std::vector<OuterRecord> records_;
};

}  // namespace mnlb
