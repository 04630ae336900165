#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mnlb/core.hpp"
#include "mnlb/metrics.hpp"
#include "mnlb/policies.hpp"

namespace mnlb {

struct PolicySpec {
    std::string name;  // baseline_ucb | at_ducb | fh_ducb | esucb | esucb_noreset
    EsucbConfig esucb;
};

bool policy_is_anytime(const std::string& name);
std::unique_ptr<EpochPolicy> make_policy(const PolicySpec& spec, const Instance& inst,
                                         std::uint64_t horizon);

struct GeneratorSpec {
    std::string family;  // uniform | lb-base | lb-perturbed
    int n = 0;
    std::optional<int> k;
    std::uint64_t seed = 0;
    int k_item = 1;
    std::uint64_t t1 = 1;

    Instance build(std::optional<int> n_override = {}) const;
};

struct ExperimentConfig {
    std::string instance_file;             // one of instance_file / generator
    std::optional<GeneratorSpec> generator;
    std::vector<PolicySpec> policies;
    std::vector<std::uint64_t> horizons;
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "out";
    TraceMode trace_mode = TraceMode::kEpoch;
    std::vector<std::uint64_t> downsample_grid;  // explicit grid
    bool downsample_pow2 = false;                // "pow2" shorthand
    std::vector<int> n_grid;                     // sweep only

    // Full config with defaults filled in, as deterministic JSON (provenance).
    std::string canonical_json() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct SeedStats {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Aggregated finals for one (policy, instance size, horizon) cell.
struct CellResult {
    std::string policy;
    int n_items = 0;
    std::uint64_t horizon = 0;
    int seed_count = 0;
    SeedStats regret;
    SeedStats asst_switches;
    SeedStats item_switches;
    std::vector<RunPoint> per_seed;  // ordered like config seeds
};

struct FitResult {
    std::string policy;
    int n_items = 0;
    std::string metric;
    ScalingFit fit;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    std::vector<FitResult> fits;
    std::vector<std::string> run_errors;
    std::vector<std::string> warnings;
    std::string summary_json;  // what was written to <output_dir>/summary.json

    const CellResult* find(const std::string& policy, int n_items, std::uint64_t horizon) const;
};

/// Runs every (policy, horizon, seed) combination on the configured instance,
/// writes traces and summary.json under output_dir. Deterministic given the
/// config. Per-run failures are isolated into run_errors.
ExperimentResult run_simulate(const ExperimentConfig& config);

/// Cross-product sweep over n_grid x horizons (generator-based instances).
ExperimentResult run_sweep(const ExperimentConfig& config);

/// Release-gate checks: optimizer/oracle equivalence, fixed-point sign
/// structure, geometric-epoch statistics, and the switch-cost relation on a
/// small policy sweep. Prints one line per suite; returns the number of failed
/// suites. `corrupt_tie_break` is a test fixture that deliberately breaks the
/// candidate tie-break to prove the suite catches it.
int run_verify(std::ostream& out, bool corrupt_tie_break = false);

int worker_count_from_env();

}  // namespace mnlb
