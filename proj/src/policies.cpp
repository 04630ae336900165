#include "mnlb/policies.hpp"

#include <cmath>

#include "mnlb/optimizer.hpp"

namespace mnlb {

namespace {

bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

}  // namespace

double ucb_radius_atducb(double mean, std::uint64_t t_i, std::uint64_t epoch_count, int n_items) {
    if (t_i == 0) throw bad_parameter("UCB radius needs at least one observed epoch");
    const double log_term =
        std::log(std::sqrt(static_cast<double>(n_items)) * static_cast<double>(epoch_count) + 1.0);
    const double ti = static_cast<double>(t_i);
    return std::sqrt(48.0 * mean * log_term / ti) + 48.0 * log_term / ti;
}

double EstimatorState::mean(int i) const {
    const auto& e = item(i);
    if (e.epoch_count == 0) return 0.0;
    return static_cast<double>(e.purchase_total) / static_cast<double>(e.epoch_count);
}

std::vector<double> EstimatorState::ucb_vector() const {
    std::vector<double> v(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) v[i] = items[i].ucb;
    return v;
}

void EstimatorState::reset_counts() {
    for (auto& e : items) {
        e.epoch_count = 0;
        e.purchase_total = 0;
        e.ucb = 1.0;
    }
}

// ---------------------------------------------------------------------------
// Baseline and AT-DUCB

DeferredUcbPolicy::DeferredUcbPolicy(Instance inst, bool deferred)
    : inst_(std::move(inst)), deferred_(deferred), est_(inst_.n_items) {
    inst_.validate();
    current_ = solve_theta_star(inst_, est_.ucb_vector()).optimal_set;
}

EpochOutcome DeferredUcbPolicy::step(SimClock& clock, Rng& rng) {
    if (dirty_) {
        current_ = solve_theta_star(inst_, est_.ucb_vector()).optimal_set;
        ++recomputes_;
        dirty_ = false;
    }
    ++est_.epoch_index;
    EpochOutcome out = run_epoch(inst_, current_, clock, rng);

    const auto& offered = out.offered.items();
    for (std::size_t j = 0; j < offered.size(); ++j) {
        ItemEstimator& e = est_.item(offered[j]);
        e.purchase_total += static_cast<std::uint64_t>(out.purchase_counts[j]);
        e.epoch_count += 1;
        if (!deferred_ || is_power_of_two(e.epoch_count)) {
            const double mean = est_.mean(offered[j]);
            const double candidate =
                mean + ucb_radius_atducb(mean, e.epoch_count, est_.epoch_index, inst_.n_items);
            ++e.update_count;
            if (candidate < e.ucb) {
                e.ucb = candidate;
                dirty_ = true;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// FH-DUCB

FhState::FhState(int n_items, std::uint64_t horizon)
    : items(static_cast<std::size_t>(n_items)), horizon(horizon),
      tau0(fh_tau0(horizon, n_items)) {}

int fh_tau0(std::uint64_t horizon, int n_items) {
    const double ratio = static_cast<double>(horizon) / static_cast<double>(n_items);
    const double inner = std::log2(ratio);
    if (!(inner > 1.0)) return 1;
    return std::max(1, static_cast<int>(std::ceil(std::log2(inner) + 1.0)));
}

bool fh_condition(const FhState& state, int item) {
    const FhItemState& s = state.item(item);
    const double t = static_cast<double>(state.horizon);
    const double n = static_cast<double>(state.items.size());
    const double pre = static_cast<double>(s.pre_stage_epochs);
    const double len = static_cast<double>(s.stage_epochs);

    if (s.stage < state.tau0) return len >= 1.0 + std::sqrt(t * pre / n);

    if (!(s.ucb_at_tau0 > 1.0 / std::sqrt(n * t))) return false;
    if (!(s.ucb > 0.0)) return false;
    return len >= 1.0 + std::sqrt(t * pre / (n * s.ucb));
}

bool fh_horizon_below_theory(std::uint64_t horizon, int n_items) {
    const double n = static_cast<double>(n_items);
    return static_cast<double>(horizon) < n * n * n * n;
}

FhDucbPolicy::FhDucbPolicy(Instance inst, std::uint64_t horizon)
    : inst_(std::move(inst)), state_(inst_.n_items, horizon) {
    inst_.validate();
    if (horizon == 0) throw bad_parameter("fixed-horizon policy needs a positive horizon");
    // The initial assortment: top set under all-ones optimistic weights, so the
    // capacity constraint holds from the first epoch.
    std::vector<double> ones(static_cast<std::size_t>(inst_.n_items), 1.0);
    current_ = solve_theta_star(inst_, ones).optimal_set;
}

void FhDucbPolicy::update_item(int item) {
    FhItemState& s = state_.item(item);
    s.stage += 1;
    s.pre_stage_epochs += s.stage_epochs;
    s.pre_stage_purchases += s.stage_purchases;
    s.stage_epochs = 0;
    s.stage_purchases = 0;

    const double pre = static_cast<double>(s.pre_stage_epochs);
    const double mean = static_cast<double>(s.pre_stage_purchases) / pre;
    const double log_term = std::log(std::sqrt(static_cast<double>(inst_.n_items)) *
                                         static_cast<double>(state_.horizon) *
                                         static_cast<double>(state_.horizon) +
                                     1.0);
    const double candidate =
        mean + std::sqrt(48.0 * mean * log_term / pre) + 48.0 * log_term / pre;
    s.ucb = std::min(s.ucb, candidate);
    if (s.stage == state_.tau0) s.ucb_at_tau0 = s.ucb;
    ++s.update_count;
}

EpochOutcome FhDucbPolicy::step(SimClock& clock, Rng& rng) {
    ++state_.epoch_index;
    bool fired = false;
    for (int i = 1; i <= inst_.n_items; ++i) {
        if (fh_condition(state_, i)) {
            update_item(i);
            fired = true;
        }
    }
    if (fired) {
        std::vector<double> ucbs(static_cast<std::size_t>(inst_.n_items));
        for (int i = 1; i <= inst_.n_items; ++i) ucbs[static_cast<std::size_t>(i - 1)] = state_.item(i).ucb;
        current_ = solve_theta_star(inst_, ucbs).optimal_set;
        ++recomputes_;
    }

    EpochOutcome out = run_epoch(inst_, current_, clock, rng);
    const auto& offered = out.offered.items();
    for (std::size_t j = 0; j < offered.size(); ++j) {
        FhItemState& s = state_.item(offered[j]);
        s.stage_purchases += static_cast<std::uint64_t>(out.purchase_counts[j]);
        s.stage_epochs += 1;
    }
    return out;
}

std::uint64_t FhDucbPolicy::total_stages() const {
    std::uint64_t total = 0;
    for (const auto& s : state_.items) total += static_cast<std::uint64_t>(s.stage);
    return total;
}

// ---------------------------------------------------------------------------
// ESUCB

double EsucbConfig::effective_delta(std::uint64_t horizon) const {
    if (delta > 0.0) return delta;
    return 1.0 / static_cast<double>(horizon);
}

double EsucbPolicy::t_max_for(const EsucbConfig& cfg, int n_items, std::uint64_t horizon,
                              double epsilon) {
    const double d = cfg.effective_delta(horizon);
    const double lc = std::log(static_cast<double>(n_items) * static_cast<double>(horizon) / d);
    return cfg.constant_scale * cfg.c1 * static_cast<double>(n_items) * lc * lc * lc /
           (epsilon * epsilon);
}

EsucbPolicy::EsucbPolicy(Instance inst, std::uint64_t horizon, EsucbConfig cfg, bool noreset_name)
    : inst_(std::move(inst)), horizon_(horizon), cfg_(cfg), noreset_name_(noreset_name),
      est_(inst_.n_items) {
    inst_.validate();
    if (horizon == 0) throw bad_parameter("ESUCB needs a positive horizon");
    if (!(cfg_.effective_delta(horizon) > 0.0)) throw bad_parameter("delta must be positive");
    if (!(cfg_.constant_scale > 0.0)) throw bad_parameter("constant_scale must be positive");

    const double nt = static_cast<double>(inst_.n_items) * static_cast<double>(horizon_) /
                      cfg_.effective_delta(horizon_);
    const double l = std::log(nt);
    log_cubed_ = l * l * l;
    radius_log_ = cfg_.radius_log2 ? std::log2(nt + 1.0) : std::log(nt + 1.0);
}

void EsucbPolicy::begin_invocation() {
    theta_l_ = theta_hat_ - 3.0 * epsilon_;
    theta_r_ = theta_hat_ - epsilon_;
    t_max_ = cfg_.constant_scale * cfg_.c1 * static_cast<double>(inst_.n_items) * log_cubed_ /
             (epsilon_ * epsilon_);
    bonus_ = cfg_.constant_scale * cfg_.c2 *
                 std::sqrt(static_cast<double>(inst_.n_items) * t_max_ * log_cubed_) +
             cfg_.constant_scale * cfg_.c3 * static_cast<double>(inst_.n_items) * log_cubed_;
    if (cfg_.reset_counters) est_.reset_counts();
    rho_ = 0.0;
    rho_hat_ = 1.0;
    b_ = false;
    t_probe_ = 0;
    have_prev_ = false;
    probe_active_ = true;

    OuterRecord rec;
    rec.theta_hat = theta_hat_;
    rec.epsilon = epsilon_;
    rec.t_max = t_max_;
    records_.push_back(rec);
}

void EsucbPolicy::fold_epoch(const EpochOutcome& out) {
    const auto& offered = out.offered.items();
    for (std::size_t j = 0; j < offered.size(); ++j) {
        ItemEstimator& e = est_.item(offered[j]);
        e.purchase_total += static_cast<std::uint64_t>(out.purchase_counts[j]);
        e.epoch_count += 1;
        if (is_power_of_two(e.epoch_count)) {
            const double ti = static_cast<double>(e.epoch_count);
            const double mean = static_cast<double>(e.purchase_total) / ti;
            const double candidate = mean + std::sqrt(196.0 * mean * radius_log_ / ti) +
                                     292.0 * radius_log_ / ti;
            e.ucb = std::min(e.ucb, candidate);
            ++e.update_count;
            records_.back().ucb_updates += 1;
        }
    }
}

EpochOutcome EsucbPolicy::step(SimClock& clock, Rng& rng) {
    if (!probe_active_) begin_invocation();
    OuterRecord& rec = records_.back();

    const bool left_branch = rho_hat_ < theta_r_;
    if (left_branch) b_ = true;
    const double theta = left_branch ? theta_l_ : theta_r_;
    const Assortment offered =
        static_linear_argmax(est_.ucb_vector(), inst_.rewards, theta, inst_.capacity);

    if (have_prev_) {
        rec.item_switches += static_cast<std::uint64_t>(switch_deltas(prev_offered_, offered).item_delta);
        if (left_branch != prev_branch_left_) rec.branch_flips += 1;
    }

    EpochOutcome out = run_epoch(inst_, offered, clock, rng);
    current_ = offered;
    t_probe_ += out.epoch_length;
    rec.epochs += 1;
    prev_offered_ = offered;
    prev_branch_left_ = left_branch;
    have_prev_ = true;

    if (!left_branch) {
        rho_ += out.realized_revenue;
        rho_hat_ = (rho_ + bonus_) / static_cast<double>(t_probe_);
    }

    // The invocation returns before folding the final epoch's counts, so a
    // concluding epoch never updates the estimators; a horizon-truncated epoch
    // mid-invocation still folds.
    if (static_cast<double>(t_probe_) >= t_max_) {
        rec.concluded = true;
        rec.returned_true = b_;
        if (b_) theta_hat_ -= epsilon_;
        epsilon_ *= 2.0 / 3.0;
        probe_active_ = false;
    } else {
        fold_epoch(out);
    }
    return out;
}

}  // namespace mnlb
