#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mnlb/harness.hpp"
#include "mnlb/instances.hpp"

namespace {

// Exit codes: 0 success, 1 run failure, 2 config error.
constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitConfigError = 2;

int report(const mnlb::ExperimentResult& result) {
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
    for (const mnlb::CellResult& cell : result.cells) {
        std::cout << cell.policy << "  n=" << cell.n_items << "  T=" << cell.horizon
                  << "  seeds=" << cell.seed_count << "  regret=" << cell.regret.mean << " (sd "
                  << cell.regret.stddev << ")  asst_switches=" << cell.asst_switches.mean
                  << "  item_switches=" << cell.item_switches.mean << "\n";
    }
    for (const mnlb::FitResult& fit : result.fits) {
        std::cout << "fit  " << fit.policy << "  n=" << fit.n_items << "  " << fit.metric << " ~ "
                  << mnlb::to_string(fit.fit.model) << "  coeff=" << fit.fit.coefficient
                  << "  r2=" << fit.fit.r2 << "\n";
    }
    if (!result.run_errors.empty()) {
        for (const std::string& e : result.run_errors) std::cerr << "run failed: " << e << "\n";
        return kExitRunFailure;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MNL-bandit simulation lab: low-switching-cost policies, exact assortment "
                 "optimization, and experiment sweeps"};
    app.require_subcommand(1);

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "Run every (policy, horizon, seed) combination "
                                                    "from a config file");
    simulate->add_option("--config", config_path, "experiment config JSON")->required();

    auto* sweep = app.add_subcommand("sweep", "Cross-product sweep over n_grid and horizons");
    sweep->add_option("--config", config_path, "experiment config JSON")->required();

    bool corrupt_tie_break = false;
    auto* verify = app.add_subcommand("verify", "Run the built-in verification suites");
    verify->add_flag("--corrupt-tie-break", corrupt_tie_break,
                     "test fixture: corrupt the reference tie-break (the suite must then fail)");

    auto* instance = app.add_subcommand("instance", "Instance file utilities");
    auto* gen = instance->add_subcommand("gen", "Generate an instance file");
    std::string family;
    int n = 0;
    std::optional<int> k;
    std::uint64_t seed = 0;
    int k_item = 1;
    std::uint64_t t1 = 1;
    std::string out_path;
    gen->add_option("family", family, "uniform | lb-base | lb-perturbed")->required();
    gen->add_option("--n", n, "number of items")->required();
    gen->add_option("--k", k, "capacity (uniform requires it; lb families default to 1)");
    gen->add_option("--seed", seed, "generator seed (uniform family)");
    gen->add_option("--k-item", k_item, "perturbed item index (lb-perturbed)");
    gen->add_option("--t1", t1, "perturbation horizon parameter (lb-perturbed)");
    gen->add_option("--out", out_path, "output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            mnlb::ExperimentConfig cfg = mnlb::load_experiment_config(config_path);
            return report(mnlb::run_simulate(cfg));
        }
        if (sweep->parsed()) {
            mnlb::ExperimentConfig cfg = mnlb::load_experiment_config(config_path);
            return report(mnlb::run_sweep(cfg));
        }
        if (verify->parsed()) {
            const int failed = mnlb::run_verify(std::cout, corrupt_tie_break);
            return failed == 0 ? kExitOk : kExitRunFailure;
        }
        if (gen->parsed()) {
            mnlb::GeneratorSpec spec;
            spec.family = family;
            spec.n = n;
            spec.k = k;
            spec.seed = seed;
            spec.k_item = k_item;
            spec.t1 = t1;
            bool clamped = false;
            mnlb::Instance inst;
            if (family == "lb-perturbed")
                inst = mnlb::gen_lowerbound_perturbed(n, k_item, t1, k.value_or(1), &clamped);
            else
                inst = spec.build();
            if (clamped)
                std::cerr << "warning: perturbed weight clamped to 1 (t1 too small)\n";
            if (out_path.empty())
                std::cout << mnlb::instance_to_json(inst);
            else
                mnlb::save_instance(inst, out_path);
            return kExitOk;
        }
        std::cerr << "no subcommand\n";
        return kExitConfigError;
    } catch (const mnlb::bad_parameter& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const mnlb::parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRunFailure;
    }
}
