#include "mnlb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace mnlb {

TraceMode trace_mode_from_string(const std::string& s) {
    if (s == "full") return TraceMode::kFull;
    if (s == "epoch") return TraceMode::kEpoch;
    if (s == "summary") return TraceMode::kSummary;
    throw bad_parameter("trace_mode must be one of full|epoch|summary, got \"" + s + "\"");
}

std::string to_string(TraceMode mode) {
    switch (mode) {
        case TraceMode::kFull: return "full";
        case TraceMode::kEpoch: return "epoch";
        case TraceMode::kSummary: return "summary";
    }
    return "epoch";
}

RunTrace::RunTrace(const Instance& inst, double theta_star, TraceMode mode,
                   std::vector<std::uint64_t> checkpoints)
    : inst_(inst), theta_star_(theta_star), mode_(mode),
      checkpoint_times_(std::move(checkpoints)) {
    std::sort(checkpoint_times_.begin(), checkpoint_times_.end());
}

void RunTrace::add_epoch(std::uint64_t t_start, const EpochOutcome& out) {
    const double gap = theta_star_ - expected_revenue(inst_, out.offered);
    const std::uint64_t len = out.epoch_length;
    const std::uint64_t t_end = t_start + len;

    std::uint64_t asst_inc = 0, item_inc = 0;
    if (have_prev_) {
        const SwitchDelta d = switch_deltas(prev_offered_, out.offered);
        asst_inc = static_cast<std::uint64_t>(d.asst_delta);
        item_inc = static_cast<std::uint64_t>(d.item_delta);
    }

    // Checkpoints inside (t_start, t_end]: the switch is charged at the first
    // step of the epoch, so any checkpoint in the range already includes it.
    while (next_checkpoint_ < checkpoint_times_.size() &&
           checkpoint_times_[next_checkpoint_] <= t_end) {
        const std::uint64_t tc = checkpoint_times_[next_checkpoint_];
        if (tc <= t_start) {  // grid point before any consumed step of this epoch
            RunPoint p = cum_;
            p.t = tc;
            captured_.push_back(p);
        } else {
            RunPoint p;
            p.t = tc;
            const std::uint64_t k = tc - t_start;
            p.cum_regret = cum_.cum_regret + static_cast<double>(k) * gap;
            p.asst_switches = cum_.asst_switches + asst_inc;
            p.item_switches = cum_.item_switches + item_inc;
            double partial_revenue = 0.0;
            for (std::uint64_t s = 0; s < k; ++s) {
                const int choice = out.step_choices[static_cast<std::size_t>(s)];
                if (choice != 0) partial_revenue += inst_.reward(choice);
            }
            p.realized_total = cum_.realized_total + partial_revenue;
            p.epochs = cum_.epochs + 1;
            captured_.push_back(p);
        }
        ++next_checkpoint_;
    }

    if (mode_ == TraceMode::kFull) {
        for (std::uint64_t k = 1; k <= len; ++k) {
            TraceRow row;
            row.t = t_start + k;
            row.cum_regret = cum_.cum_regret + static_cast<double>(k) * gap;
            row.asst_switches = cum_.asst_switches + asst_inc;
            row.item_switches = cum_.item_switches + item_inc;
            row.choice = out.step_choices[static_cast<std::size_t>(k - 1)];
            row.reward = row.choice == 0 ? 0.0 : inst_.reward(row.choice);
            rows_.push_back(row);
        }
    }

    cum_.t = t_end;
    cum_.cum_regret += static_cast<double>(len) * gap;
    cum_.asst_switches += asst_inc;
    cum_.item_switches += item_inc;
    cum_.realized_total += out.realized_revenue;
    cum_.epochs += 1;

    if (mode_ == TraceMode::kEpoch) {
        TraceRow row;
        row.t = t_end;
        row.cum_regret = cum_.cum_regret;
        row.asst_switches = cum_.asst_switches;
        row.item_switches = cum_.item_switches;
        row.choice = out.step_choices.back();
        row.reward = row.choice == 0 ? 0.0 : inst_.reward(row.choice);
        rows_.push_back(row);
    }

    have_prev_ = true;
    prev_offered_ = out.offered;
}

std::vector<TraceRow> downsample(const std::vector<TraceRow>& rows,
                                 const std::vector<std::uint64_t>& grid, bool* truncated) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw bad_parameter("downsample grid must be increasing");
    if (truncated) *truncated = false;

    const std::uint64_t t_last = rows.empty() ? 0 : rows.back().t;
    std::vector<TraceRow> out;
    std::size_t cursor = 0;
    TraceRow carry;  // zero state before the first recorded row
    for (std::uint64_t tc : grid) {
        if (tc > t_last) {
            if (truncated) *truncated = true;
            break;
        }
        while (cursor < rows.size() && rows[cursor].t <= tc) {
            carry = rows[cursor];
            ++cursor;
        }
        TraceRow row = carry;
        row.t = tc;
        out.push_back(row);
    }
    return out;
}

std::string to_string(ScalingModel model) {
    switch (model) {
        case ScalingModel::kLog: return "log";
        case ScalingModel::kLogLog: return "loglog";
        case ScalingModel::kSqrt: return "sqrt";
        case ScalingModel::kLinear: return "linear";
    }
    return "log";
}

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw bad_parameter("fit_scaling needs at least 3 points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first))
            throw bad_parameter("fit_scaling needs strictly increasing T values");

    const auto regressor = [](ScalingModel m, double t) {
        switch (m) {
            case ScalingModel::kLog: return std::log2(t);
            case ScalingModel::kLogLog: return std::log2(std::log2(t));
            case ScalingModel::kSqrt: return std::sqrt(t);
            case ScalingModel::kLinear: return t;
        }
        return t;
    };

    double y_mean = 0.0;
    for (const auto& [t, y] : points) y_mean += y;
    y_mean /= static_cast<double>(points.size());
    double ss_tot = 0.0;
    for (const auto& [t, y] : points) ss_tot += (y - y_mean) * (y - y_mean);

    ScalingFit fit;
    double best_r2 = -std::numeric_limits<double>::infinity();
    const ScalingModel models[] = {ScalingModel::kLog, ScalingModel::kLogLog, ScalingModel::kSqrt,
                                   ScalingModel::kLinear};
    for (std::size_t m = 0; m < 4; ++m) {
        double sfy = 0.0, sff = 0.0;
        bool degenerate = false;
        for (const auto& [t, y] : points) {
            const double f = regressor(models[m], t);
            if (!std::isfinite(f)) degenerate = true;
            sfy += f * y;
            sff += f * f;
        }
        if (degenerate || sff == 0.0)
            throw bad_parameter("fit_scaling regressor degenerate for model " +
                                to_string(models[m]));
        const double c = sfy / sff;
        double ss_res = 0.0;
        for (const auto& [t, y] : points) {
            const double e = y - c * regressor(models[m], t);
            ss_res += e * e;
        }
        const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
        fit.r2_by_model[m] = r2;
        if (r2 > best_r2) {
            best_r2 = r2;
            fit.model = models[m];
            fit.coefficient = c;
            fit.r2 = r2;
        }
    }
    return fit;
}

void write_trace_csv(const std::string& path, const std::string& policy, std::uint64_t seed,
                     std::span<const TraceRow> rows) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write trace file " + path);
    out << "t,policy,seed,cum_regret,asst_switches,item_switches,choice,reward\n";
    char buf[64];
    for (const TraceRow& row : rows) {
        out << row.t << ',' << policy << ',' << seed << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", row.cum_regret);
        out << buf << ',' << row.asst_switches << ',' << row.item_switches << ',' << row.choice
            << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", row.reward);
        out << buf << '\n';
    }
}

}  // namespace mnlb
