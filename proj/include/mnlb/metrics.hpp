#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mnlb/core.hpp"
#include "mnlb/environment.hpp"

namespace mnlb {

enum class TraceMode { kFull, kEpoch, kSummary };

TraceMode trace_mode_from_string(const std::string& s);
std::string to_string(TraceMode mode);

struct TraceRow {
    std::uint64_t t = 0;
    double cum_regret = 0.0;
    std::uint64_t asst_switches = 0;
    std::uint64_t item_switches = 0;
    int choice = 0;
    double reward = 0.0;
};

/// Cumulative accounting captured at a fixed time.
struct RunPoint {
    std::uint64_t t = 0;
    double cum_regret = 0.0;
    std::uint64_t asst_switches = 0;
    std::uint64_t item_switches = 0;
    double realized_total = 0.0;
    std::uint64_t epochs = 0;
};

/// Per-run pseudo-regret and switching-cost accounting, fed one epoch at a
/// time. Pseudo-regret charges theta_star - R(S, v) (true weights) per step;
/// switches are charged at the first step of the epoch whose set differs from
/// its predecessor. Checkpoints capture cumulative state at exact times, even
/// mid-epoch.
class RunTrace {
public:
    RunTrace(const Instance& inst, double theta_star, TraceMode mode,
             std::vector<std::uint64_t> checkpoints = {});

    void add_epoch(std::uint64_t t_start, const EpochOutcome& out);

    RunPoint current() const { return cum_; }
    const std::vector<RunPoint>& checkpoints() const { return captured_; }
    const std::vector<TraceRow>& rows() const { return rows_; }
    double theta_star() const { return theta_star_; }

private:
    const Instance& inst_;
    double theta_star_;
    TraceMode mode_;
    std::vector<std::uint64_t> checkpoint_times_;
    std::size_t next_checkpoint_ = 0;

    RunPoint cum_;
    bool have_prev_ = false;
    Assortment prev_offered_;
    std::vector<RunPoint> captured_;
    std::vector<TraceRow> rows_;
};

/// Compacts a trace to the given strictly increasing grid of times, carrying
/// cumulative values forward; grid entries beyond the last recorded time are
/// dropped and flag `truncated` when provided.
std::vector<TraceRow> downsample(const std::vector<TraceRow>& rows,
                                 const std::vector<std::uint64_t>& grid,
                                 bool* truncated = nullptr);

enum class ScalingModel { kLog, kLogLog, kSqrt, kLinear };

std::string to_string(ScalingModel model);

struct ScalingFit {
    ScalingModel model = ScalingModel::kLog;
    double coefficient = 0.0;
    double r2 = 0.0;
    std::array<double, 4> r2_by_model{};  // indexed by ScalingModel order
};

/// Least-squares fit of value = c * f(T) through the origin for each candidate
/// regressor f in {log2 T, log2 log2 T, sqrt T, T}; returns the best-r2 model.
/// Needs at least 3 points with strictly increasing T.
ScalingFit fit_scaling(std::span<const std::pair<double, double>> points);

/// CSV with header `t,policy,seed,cum_regret,asst_switches,item_switches,choice,reward`.
void write_trace_csv(const std::string& path, const std::string& policy, std::uint64_t seed,
                     std::span<const TraceRow> rows);

}  // namespace mnlb
