#include "mnlb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "mnlb/environment.hpp"
#include "mnlb/instances.hpp"
#include "mnlb/optimizer.hpp"
#include "mnlb/rng.hpp"

namespace mnlb {

namespace {

using nlohmann::json;

constexpr const char* kBuildId = "mnlb 0.1.0";
constexpr std::uint64_t kFullTraceGuard = 1000000;

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void reject_unknown_fields(const json& obj, std::initializer_list<const char*> known,
                           const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* f : known) ok |= key == f;
        if (!ok) throw bad_parameter("unknown field \"" + key + "\" in " + where);
    }
}

std::vector<std::uint64_t> parse_u64_list(const json& arr, const std::string& field) {
    if (!arr.is_array() || arr.empty())
        throw bad_parameter("\"" + field + "\" must be a non-empty array");
    std::vector<std::uint64_t> out;
    for (const auto& v : arr) {
        if (!v.is_number_unsigned() && !v.is_number_integer())
            throw bad_parameter("\"" + field + "\" entries must be nonnegative integers");
        const std::int64_t x = v.get<std::int64_t>();
        if (x < 0) throw bad_parameter("\"" + field + "\" entries must be nonnegative");
        out.push_back(static_cast<std::uint64_t>(x));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

bool policy_is_anytime(const std::string& name) {
    return name == "baseline_ucb" || name == "at_ducb";
}

std::unique_ptr<EpochPolicy> make_policy(const PolicySpec& spec, const Instance& inst,
                                         std::uint64_t horizon) {
    if (spec.name == "baseline_ucb") return std::make_unique<DeferredUcbPolicy>(inst, false);
    if (spec.name == "at_ducb") return std::make_unique<DeferredUcbPolicy>(inst, true);
    if (spec.name == "fh_ducb") return std::make_unique<FhDucbPolicy>(inst, horizon);
    if (spec.name == "esucb") {
        EsucbConfig cfg = spec.esucb;
        cfg.reset_counters = true;
        return std::make_unique<EsucbPolicy>(inst, horizon, cfg, false);
    }
    if (spec.name == "esucb_noreset") {
        EsucbConfig cfg = spec.esucb;
        cfg.reset_counters = false;
        return std::make_unique<EsucbPolicy>(inst, horizon, cfg, true);
    }
    throw bad_parameter("unknown policy \"" + spec.name + "\"");
}

Instance GeneratorSpec::build(std::optional<int> n_override) const {
    const int nn = n_override.value_or(n);
    if (family == "uniform") {
        if (!k) throw bad_parameter("uniform generator needs \"k\"");
        return gen_uniform_random(nn, *k, seed);
    }
    if (family == "lb-base") {
        Instance inst = gen_lowerbound_base(nn);
        if (k) {
            inst.capacity = *k;
            inst.validate();
        }
        return inst;
    }
    if (family == "lb-perturbed") {
        return gen_lowerbound_perturbed(nn, k_item, t1, k.value_or(1));
    }
    throw bad_parameter("unknown generator family \"" + family + "\"");
}

namespace {

PolicySpec parse_policy_spec(const json& p) {
    if (!p.is_object() || !p.contains("name"))
        throw bad_parameter("each \"policies\" entry needs a \"name\"");
    reject_unknown_fields(
        p, {"name", "delta", "c1", "c2", "c3", "constant_scale", "radius_log2"}, "policy spec");
    PolicySpec spec;
    spec.name = p.at("name").get<std::string>();
    static const char* kNames[] = {"baseline_ucb", "at_ducb", "fh_ducb", "esucb", "esucb_noreset"};
    bool known = false;
    for (const char* n : kNames) known |= spec.name == n;
    if (!known) throw bad_parameter("unknown policy \"" + spec.name + "\"");
    if (p.contains("delta")) spec.esucb.delta = p.at("delta").get<double>();
    if (p.contains("c1")) spec.esucb.c1 = p.at("c1").get<double>();
    if (p.contains("c2")) spec.esucb.c2 = p.at("c2").get<double>();
    if (p.contains("c3")) spec.esucb.c3 = p.at("c3").get<double>();
    if (p.contains("constant_scale"))
        spec.esucb.constant_scale = p.at("constant_scale").get<double>();
    if (p.contains("radius_log2")) spec.esucb.radius_log2 = p.at("radius_log2").get<bool>();
    return spec;
}

GeneratorSpec parse_generator_spec(const json& g) {
    reject_unknown_fields(g, {"family", "n", "k", "seed", "k_item", "t1"}, "generator spec");
    if (!g.contains("family") || !g.contains("n"))
        throw bad_parameter("generator spec needs \"family\" and \"n\"");
    GeneratorSpec spec;
    spec.family = g.at("family").get<std::string>();
    spec.n = g.at("n").get<int>();
    if (g.contains("k")) spec.k = g.at("k").get<int>();
    if (g.contains("seed")) spec.seed = g.at("seed").get<std::uint64_t>();
    if (g.contains("k_item")) spec.k_item = g.at("k_item").get<int>();
    if (g.contains("t1")) spec.t1 = g.at("t1").get<std::uint64_t>();
    return spec;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("config JSON malformed: ") + e.what());
    }
    if (!doc.is_object()) throw bad_parameter("config must be a JSON object");
    reject_unknown_fields(doc,
                          {"instance", "policies", "horizons", "seeds", "output_dir", "trace_mode",
                           "downsample_grid", "n_grid"},
                          "config");

    ExperimentConfig cfg;

    if (!doc.contains("instance")) throw bad_parameter("config needs \"instance\"");
    const json& inst = doc.at("instance");
    reject_unknown_fields(inst, {"file", "generator"}, "\"instance\"");
    if (inst.contains("file") == inst.contains("generator"))
        throw bad_parameter("\"instance\" needs exactly one of \"file\" or \"generator\"");
    if (inst.contains("file"))
        cfg.instance_file = inst.at("file").get<std::string>();
    else
        cfg.generator = parse_generator_spec(inst.at("generator"));

    if (!doc.contains("policies") || !doc.at("policies").is_array() || doc.at("policies").empty())
        throw bad_parameter("config needs a non-empty \"policies\" array");
    for (const auto& p : doc.at("policies")) cfg.policies.push_back(parse_policy_spec(p));

    if (!doc.contains("horizons")) throw bad_parameter("config needs \"horizons\"");
    cfg.horizons = parse_u64_list(doc.at("horizons"), "horizons");
    for (std::uint64_t t : cfg.horizons)
        if (t == 0) throw bad_parameter("\"horizons\" entries must be positive");

    if (!doc.contains("seeds")) throw bad_parameter("config needs \"seeds\"");
    const json& seeds = doc.at("seeds");
    if (seeds.is_array()) {
        cfg.seeds = parse_u64_list(seeds, "seeds");
    } else if (seeds.is_object()) {
        reject_unknown_fields(seeds, {"base", "count"}, "\"seeds\"");
        if (!seeds.contains("base") || !seeds.contains("count"))
            throw bad_parameter("\"seeds\" object needs \"base\" and \"count\"");
        const std::uint64_t base = seeds.at("base").get<std::uint64_t>();
        const int count = seeds.at("count").get<int>();
        if (count < 1) throw bad_parameter("\"seeds.count\" must be positive");
        for (int i = 0; i < count; ++i) cfg.seeds.push_back(base + static_cast<std::uint64_t>(i));
    } else {
        throw bad_parameter("\"seeds\" must be an array or {base, count}");
    }

    if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("trace_mode"))
        cfg.trace_mode = trace_mode_from_string(doc.at("trace_mode").get<std::string>());

    if (doc.contains("downsample_grid")) {
        const json& grid = doc.at("downsample_grid");
        if (grid.is_string()) {
            if (grid.get<std::string>() != "pow2")
                throw bad_parameter("\"downsample_grid\" string form must be \"pow2\"");
            cfg.downsample_pow2 = true;
        } else {
            cfg.downsample_grid = parse_u64_list(grid, "downsample_grid");
            for (std::size_t i = 1; i < cfg.downsample_grid.size(); ++i)
                if (cfg.downsample_grid[i] <= cfg.downsample_grid[i - 1])
                    throw bad_parameter("\"downsample_grid\" must be strictly increasing");
        }
    }

    if (doc.contains("n_grid")) {
        for (const auto& v : doc.at("n_grid")) cfg.n_grid.push_back(v.get<int>());
        if (cfg.n_grid.empty()) throw bad_parameter("\"n_grid\" must be non-empty when present");
        for (int n : cfg.n_grid)
            if (n < 1) throw bad_parameter("\"n_grid\" entries must be positive");
    }

    if (cfg.trace_mode == TraceMode::kFull) {
        for (std::uint64_t t : cfg.horizons)
            if (t > kFullTraceGuard)
                throw bad_parameter("\"trace_mode\" full refused for horizons beyond 1e6 "
                                    "(memory guard); use epoch or summary");
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

std::string ExperimentConfig::canonical_json() const {
    json doc;
    if (!instance_file.empty()) {
        doc["instance"] = json{{"file", instance_file}};
    } else if (generator) {
        json g{{"family", generator->family}, {"n", generator->n}, {"seed", generator->seed}};
        if (generator->k) g["k"] = *generator->k;
        if (generator->family == "lb-perturbed") {
            g["k_item"] = generator->k_item;
            g["t1"] = generator->t1;
        }
        doc["instance"] = json{{"generator", g}};
    }
    doc["policies"] = json::array();
    for (const PolicySpec& p : policies) {
        json pj{{"name", p.name}};
        if (p.name == "esucb" || p.name == "esucb_noreset") {
            pj["delta"] = p.esucb.delta;
            pj["c1"] = p.esucb.c1;
            pj["c2"] = p.esucb.c2;
            pj["c3"] = p.esucb.c3;
            pj["constant_scale"] = p.esucb.constant_scale;
            pj["radius_log2"] = p.esucb.radius_log2;
        }
        doc["policies"].push_back(pj);
    }
    doc["horizons"] = horizons;
    doc["seeds"] = seeds;
    doc["output_dir"] = output_dir;
    doc["trace_mode"] = to_string(trace_mode);
    if (downsample_pow2)
        doc["downsample_grid"] = "pow2";
    else if (!downsample_grid.empty())
        doc["downsample_grid"] = downsample_grid;
    if (!n_grid.empty()) doc["n_grid"] = n_grid;
    return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Execution

int worker_count_from_env() {
    if (const char* env = std::getenv("MNLB_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

void parallel_for_each(std::size_t count, int workers,
                       const std::function<void(std::size_t)>& fn) {
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    }
    for (auto& t : threads) t.join();
}

struct RunPlan {
    const Instance* inst = nullptr;
    double theta_star = 0.0;
    std::string instance_id;
    PolicySpec policy;
    std::size_t policy_index = 0;             // position in the config list
    std::string label;                        // unique name for files/cells
    std::uint64_t horizon = 0;                // simulated horizon
    std::vector<std::uint64_t> checkpoints;   // horizons to report
    std::uint64_t seed = 0;
    int seed_index = 0;
};

struct RunResult {
    std::vector<RunPoint> finals;  // parallel to plan.checkpoints
    bool failed = false;
    std::string error;
};

std::vector<std::uint64_t> pow2_grid(std::uint64_t horizon) {
    std::vector<std::uint64_t> grid;
    for (std::uint64_t t = 1; t <= horizon; t *= 2) {
        grid.push_back(t);
        if (t > horizon / 2) break;
    }
    if (grid.empty() || grid.back() != horizon) grid.push_back(horizon);
    return grid;
}

RunResult execute_run(const RunPlan& plan, TraceMode mode, const ExperimentConfig& cfg) {
    RunResult result;
    try {
        SimClock clock{0, plan.horizon};
        Rng rng(plan.seed);
        auto policy = make_policy(plan.policy, *plan.inst, plan.horizon);
        RunTrace trace(*plan.inst, plan.theta_star, mode, plan.checkpoints);
        while (!clock.exhausted()) {
            const std::uint64_t t_start = clock.t;
            const EpochOutcome out = policy->step(clock, rng);
            trace.add_epoch(t_start, out);
        }
        result.finals.assign(trace.checkpoints().begin(), trace.checkpoints().end());
        if (result.finals.size() != plan.checkpoints.size())
            throw std::runtime_error("checkpoint capture incomplete");

        if (mode != TraceMode::kSummary) {
            std::vector<TraceRow> rows = trace.rows();
            if (cfg.downsample_pow2)
                rows = downsample(rows, pow2_grid(plan.horizon));
            else if (!cfg.downsample_grid.empty())
                rows = downsample(rows, cfg.downsample_grid);
            std::ostringstream name;
            name << "trace_" << plan.label << "_n" << plan.inst->n_items << "_T" << plan.horizon
                 << "_seed" << plan.seed << ".csv";
            const auto path = std::filesystem::path(cfg.output_dir) / name.str();
            write_trace_csv(path.string(), plan.label, plan.seed, rows);
        }
    } catch (const std::exception& e) {
        result.failed = true;
        result.error = e.what();
    }
    return result;
}

SeedStats stats_of(const std::vector<double>& xs) {
    SeedStats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return s;
}

ExperimentResult run_plans(const ExperimentConfig& cfg,
                           const std::vector<std::pair<int, Instance>>& instances) {
    ExperimentResult result;

    // theta_star per instance, from the true weights.
    std::vector<double> theta_stars;
    std::vector<std::string> hashes;
    for (const auto& [n, inst] : instances) {
        theta_stars.push_back(solve_theta_star(inst).theta_star);
        hashes.push_back(instance_hash(inst));
    }

    std::vector<std::uint64_t> sorted_horizons = cfg.horizons;
    std::sort(sorted_horizons.begin(), sorted_horizons.end());
    sorted_horizons.erase(std::unique(sorted_horizons.begin(), sorted_horizons.end()),
                          sorted_horizons.end());

    // A policy name listed twice (e.g. two esucb parameterizations) gets a
    // positional label so cells and trace files stay distinct.
    std::vector<std::string> labels(cfg.policies.size());
    for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
        int same = 0;
        for (const PolicySpec& other : cfg.policies) same += other.name == cfg.policies[pi].name;
        labels[pi] = same > 1 ? cfg.policies[pi].name + "@" + std::to_string(pi) : cfg.policies[pi].name;
    }

    std::vector<RunPlan> plans;
    for (std::size_t ii = 0; ii < instances.size(); ++ii) {
        const Instance& inst = instances[ii].second;
        for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
            const PolicySpec& pol = cfg.policies[pi];
            if (pol.name == "fh_ducb") {
                for (std::uint64_t t : sorted_horizons) {
                    if (fh_horizon_below_theory(t, inst.n_items)) {
                        result.warnings.push_back(
                            "fh_ducb at T=" + std::to_string(t) + ", n=" +
                            std::to_string(inst.n_items) +
                            ": horizon below N^4, outside the theory's regime");
                    }
                }
            }
            if (policy_is_anytime(pol.name)) {
                for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
                    RunPlan plan;
                    plan.inst = &inst;
                    plan.theta_star = theta_stars[ii];
                    plan.instance_id = hashes[ii];
                    plan.policy = pol;
                    plan.policy_index = pi;
                    plan.label = labels[pi];
                    plan.horizon = sorted_horizons.back();
                    plan.checkpoints = sorted_horizons;
                    plan.seed = cfg.seeds[si];
                    plan.seed_index = static_cast<int>(si);
                    plans.push_back(std::move(plan));
                }
            } else {
                for (std::uint64_t t : sorted_horizons) {
                    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
                        RunPlan plan;
                        plan.inst = &inst;
                        plan.theta_star = theta_stars[ii];
                        plan.instance_id = hashes[ii];
                        plan.policy = pol;
                        plan.policy_index = pi;
                        plan.label = labels[pi];
                        plan.horizon = t;
                        plan.checkpoints = {t};
                        plan.seed = cfg.seeds[si];
                        plan.seed_index = static_cast<int>(si);
                        plans.push_back(std::move(plan));
                    }
                }
            }
        }
    }

    std::filesystem::create_directories(cfg.output_dir);
    std::vector<RunResult> outputs(plans.size());
    parallel_for_each(plans.size(), worker_count_from_env(),
                      [&](std::size_t i) { outputs[i] = execute_run(plans[i], cfg.trace_mode, cfg); });

    // Aggregate into (policy, n, T) cells, preserving config policy order.
    std::map<std::tuple<std::size_t, int, std::uint64_t>, CellResult> cells;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const RunPlan& plan = plans[i];
        const RunResult& out = outputs[i];
        if (out.failed) {
            result.run_errors.push_back("policy=" + plan.label +
                                        " n=" + std::to_string(plan.inst->n_items) +
                                        " T=" + std::to_string(plan.horizon) +
                                        " seed=" + std::to_string(plan.seed) + ": " + out.error);
            continue;
        }
        for (std::size_t c = 0; c < plan.checkpoints.size(); ++c) {
            const auto key =
                std::make_tuple(plan.policy_index, plan.inst->n_items, plan.checkpoints[c]);
            CellResult& cell = cells[key];
            cell.policy = plan.label;
            cell.n_items = plan.inst->n_items;
            cell.horizon = plan.checkpoints[c];
            cell.per_seed.resize(cfg.seeds.size());
            cell.per_seed[static_cast<std::size_t>(plan.seed_index)] = out.finals[c];
            cell.seed_count += 1;
        }
    }
    for (auto& [key, cell] : cells) {
        (void)key;
        std::vector<double> regret, asst, item;
        for (const RunPoint& p : cell.per_seed) {
            regret.push_back(p.cum_regret);
            asst.push_back(static_cast<double>(p.asst_switches));
            item.push_back(static_cast<double>(p.item_switches));
        }
        cell.regret = stats_of(regret);
        cell.asst_switches = stats_of(asst);
        cell.item_switches = stats_of(item);
        result.cells.push_back(cell);
    }

    // Scaling fits across horizons per (policy, n, metric), when enough points.
    // Cells exit the map ordered by (policy index, n, T), so grouping runs of
    // equal (policy, n) keeps horizons sorted.
    std::vector<std::vector<const CellResult*>> groups;
    for (const CellResult& cell : result.cells) {
        if (groups.empty() || groups.back().front()->policy != cell.policy ||
            groups.back().front()->n_items != cell.n_items)
            groups.emplace_back();
        groups.back().push_back(&cell);
    }
    for (auto& cell_list : groups) {
        if (cell_list.size() < 3) continue;
        const char* metrics[] = {"regret", "asst_switches", "item_switches"};
        for (const char* metric : metrics) {
            std::vector<std::pair<double, double>> points;
            for (const CellResult* cell : cell_list) {
                const double y = metric == std::string("regret")  ? cell->regret.mean
                                 : metric == std::string("asst_switches")
                                     ? cell->asst_switches.mean
                                     : cell->item_switches.mean;
                points.emplace_back(static_cast<double>(cell->horizon), y);
            }
            FitResult fr;
            fr.policy = cell_list.front()->policy;
            fr.n_items = cell_list.front()->n_items;
            fr.metric = metric;
            fr.fit = fit_scaling(points);
            result.fits.push_back(fr);
        }
    }

    // Summary JSON: deterministic (sorted keys, fixed array orders, no times).
    json summary;
    json prov;
    prov["build_id"] = kBuildId;
    prov["rng_algorithm"] = Rng::algorithm_id;
    prov["config"] = json::parse(cfg.canonical_json());
    prov["config_hash"] = hex64(fnv1a(cfg.canonical_json()));
    json inst_ids = json::array();
    for (std::size_t ii = 0; ii < instances.size(); ++ii)
        inst_ids.push_back(json{{"n_items", instances[ii].second.n_items},
                                {"hash", hashes[ii]},
                                {"theta_star", theta_stars[ii]}});
    prov["instances"] = inst_ids;
    summary["provenance"] = prov;

    json cells_json = json::array();
    for (const CellResult& cell : result.cells) {
        cells_json.push_back(json{{"policy", cell.policy},
                                  {"n_items", cell.n_items},
                                  {"T", cell.horizon},
                                  {"seed_count", cell.seed_count},
                                  {"regret", {{"mean", cell.regret.mean}, {"std", cell.regret.stddev}}},
                                  {"asst_switches",
                                   {{"mean", cell.asst_switches.mean}, {"std", cell.asst_switches.stddev}}},
                                  {"item_switches",
                                   {{"mean", cell.item_switches.mean}, {"std", cell.item_switches.stddev}}}});
    }
    summary["results"] = cells_json;

    json fits_json = json::array();
    for (const FitResult& fr : result.fits) {
        fits_json.push_back(json{{"policy", fr.policy},
                                 {"n_items", fr.n_items},
                                 {"metric", fr.metric},
                                 {"model", to_string(fr.fit.model)},
                                 {"coefficient", fr.fit.coefficient},
                                 {"r2", fr.fit.r2}});
    }
    summary["fits"] = fits_json;
    summary["failures"] = result.run_errors;

    result.summary_json = summary.dump(2) + "\n";
    std::ofstream out(std::filesystem::path(cfg.output_dir) / "summary.json");
    out << result.summary_json;
    return result;
}

}  // namespace

const CellResult* ExperimentResult::find(const std::string& policy, int n_items,
                                         std::uint64_t horizon) const {
    for (const CellResult& cell : cells)
        if (cell.policy == policy && cell.n_items == n_items && cell.horizon == horizon)
            return &cell;
    return nullptr;
}

ExperimentResult run_simulate(const ExperimentConfig& cfg) {
    if (!cfg.n_grid.empty())
        throw bad_parameter("\"n_grid\" is a sweep option; use the sweep command");
    std::vector<std::pair<int, Instance>> instances;
    if (!cfg.instance_file.empty()) {
        Instance inst = load_instance(cfg.instance_file);
        instances.emplace_back(inst.n_items, std::move(inst));
    } else {
        Instance inst = cfg.generator->build();
        instances.emplace_back(inst.n_items, std::move(inst));
    }
    return run_plans(cfg, instances);
}

ExperimentResult run_sweep(const ExperimentConfig& cfg) {
    if (!cfg.generator)
        throw bad_parameter("sweep needs a generator-based \"instance\"");
    std::vector<int> ns = cfg.n_grid;
    if (ns.empty()) ns.push_back(cfg.generator->n);
    std::vector<std::pair<int, Instance>> instances;
    for (int n : ns) instances.emplace_back(n, cfg.generator->build(n));
    return run_plans(cfg, instances);
}

// ---------------------------------------------------------------------------
// Verification suites

namespace {

// Independent reference for the linear argmax: full subset enumeration with a
// 1e-12 tie band and the sum-of-2^i rule. `corrupt` flips the tie-break to
// prove the suite notices.
Assortment enumerate_linear_argmax(std::span<const double> weights,
                                   std::span<const double> rewards, double theta, int capacity,
                                   bool corrupt) {
    const int n = static_cast<int>(weights.size());
    const std::uint32_t end = 1u << n;
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < end; ++mask) {
        if (std::popcount(mask) > capacity) continue;
        double value = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i))
                value += weights[static_cast<std::size_t>(i)] *
                         (rewards[static_cast<std::size_t>(i)] - theta);
        best = std::max(best, value);
    }
    std::uint32_t chosen = 0;
    bool have = false;
    for (std::uint32_t mask = 0; mask < end; ++mask) {
        if (std::popcount(mask) > capacity) continue;
        double value = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i))
                value += weights[static_cast<std::size_t>(i)] *
                         (rewards[static_cast<std::size_t>(i)] - theta);
        if (value >= best - 1e-12) {
            if (!have || (corrupt ? mask > chosen : false)) chosen = mask;
            have = true;
            if (!corrupt) break;  // first hit is the smallest mask
        }
    }
    std::vector<int> items;
    for (int i = 0; i < n; ++i)
        if (chosen & (1u << i)) items.push_back(i + 1);
    return Assortment(std::move(items));
}

struct SuiteReport {
    std::string name;
    int failed = 0;
    int total = 0;
};

}  // namespace

int run_verify(std::ostream& out, bool corrupt_tie_break) {
    std::vector<SuiteReport> suites;

    {
        SuiteReport suite{"optimizer-oracle equivalence", 0, 0};
        Rng rng(20240601);
        for (int trial = 0; trial < 400; ++trial) {
            const int n = 1 + static_cast<int>(rng.next_u64() % 9);
            const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
            const Instance inst = gen_uniform_random(n, k, rng.next_u64());
            const FixedPointResult solved = solve_theta_star(inst);
            const FixedPointResult brute = brute_force_optimum(inst);
            ++suite.total;
            if (std::abs(solved.theta_star - brute.theta_star) > 1e-9 ||
                !(solved.optimal_set == brute.optimal_set))
                ++suite.failed;
        }
        // Crafted tie cases: identical items, so the tie-break decides alone.
        for (int n : {2, 5, 10}) {
            const Instance inst = gen_lowerbound_base(n);
            ++suite.total;
            if (!(solve_theta_star(inst).optimal_set == brute_force_optimum(inst).optimal_set))
                ++suite.failed;
        }
        suites.push_back(suite);
    }

    {
        SuiteReport suite{"linear argmax vs enumeration", 0, 0};
        Rng rng(20240602);
        for (int trial = 0; trial < 400; ++trial) {
            const int n = 1 + static_cast<int>(rng.next_u64() % 10);
            const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
            std::vector<double> w(static_cast<std::size_t>(n)), r(static_cast<std::size_t>(n));
            for (auto& x : w) x = rng.next_unit();
            for (auto& x : r) x = rng.next_unit();
            const double theta = rng.next_unit() * 1.2 - 0.1;
            ++suite.total;
            if (!(static_linear_argmax(w, r, theta, k) ==
                  enumerate_linear_argmax(w, r, theta, k, corrupt_tie_break)))
                ++suite.failed;
        }
        for (int n : {3, 6}) {  // exact gain ties
            std::vector<double> w(static_cast<std::size_t>(n), 0.5);
            std::vector<double> r(static_cast<std::size_t>(n), 1.0);
            ++suite.total;
            if (!(static_linear_argmax(w, r, 0.25, 2) ==
                  enumerate_linear_argmax(w, r, 0.25, 2, corrupt_tie_break)))
                ++suite.failed;
        }
        suites.push_back(suite);
    }

    {
        SuiteReport suite{"fixed-point sign structure", 0, 0};
        Rng rng(20240603);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 2 + static_cast<int>(rng.next_u64() % 8);
            const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
            const Instance inst = gen_uniform_random(n, k, rng.next_u64());
            const FixedPointResult fp = solve_theta_star(inst);
            ++suite.total;
            bool ok = fp.residual <= 1e-9;
            for (int probe = 0; probe < 20 && ok; ++probe) {
                const double below = fp.theta_star * (rng.next_unit() * 0.999);
                if (fp.theta_star - below >= 1e-6) ok = g_value(inst, below) > below;
                const double above =
                    fp.theta_star + (inst.max_reward() - fp.theta_star) * rng.next_unit() + 1e-6;
                if (ok) ok = g_value(inst, above) < above;
            }
            if (!ok) ++suite.failed;
        }
        suites.push_back(suite);
    }

    {
        SuiteReport suite{"geometric epoch statistics", 0, 0};
        const Instance inst = gen_lowerbound_base(2);
        Rng rng(20240604);
        const Assortment single({1});
        const int epochs = 100000;
        std::vector<std::uint64_t> histogram;
        double sum = 0.0;
        std::uint64_t purchase_steps = 0, steps = 0;
        for (int e = 0; e < epochs; ++e) {
            SimClock clock;  // unbounded
            const EpochOutcome outcome = run_epoch(inst, single, clock, rng);
            const int d = outcome.purchase_counts[0];
            sum += d;
            if (histogram.size() <= static_cast<std::size_t>(d))
                histogram.resize(static_cast<std::size_t>(d) + 1, 0);
            histogram[static_cast<std::size_t>(d)] += 1;
            purchase_steps += static_cast<std::uint64_t>(d);
            steps += outcome.epoch_length;
        }
        const double mean = sum / epochs;
        const double se = std::sqrt(0.5 * 1.5 / epochs);
        ++suite.total;
        if (std::abs(mean - 0.5) > 3 * se) ++suite.failed;

        // chi-squared against (v/(1+v))^m (1/(1+v)), bins 0..8 plus tail,
        // critical value 21.666 at the 1% level with 9 degrees of freedom.
        double chi2 = 0.0;
        double tail_expected = static_cast<double>(epochs);
        std::uint64_t tail_observed = epochs;
        for (int m = 0; m <= 8; ++m) {
            const double p = std::pow(1.0 / 3.0, m) * (2.0 / 3.0);
            const double expected = epochs * p;
            const std::uint64_t observed =
                static_cast<std::size_t>(m) < histogram.size() ? histogram[static_cast<std::size_t>(m)] : 0;
            chi2 += (observed - expected) * (observed - expected) / expected;
            tail_expected -= expected;
            tail_observed -= observed;
        }
        chi2 += (tail_observed - tail_expected) * (tail_observed - tail_expected) / tail_expected;
        ++suite.total;
        if (!(chi2 < 21.666)) ++suite.failed;

        // Purchase frequency of a single offered item should be 1/3.
        const double freq = static_cast<double>(purchase_steps) / static_cast<double>(steps);
        ++suite.total;
        if (std::abs(freq - 1.0 / 3.0) > 0.01) ++suite.failed;
        suites.push_back(suite);
    }

    {
        SuiteReport suite{"switch-cost relation", 0, 0};
        const Instance inst = gen_uniform_random(8, 3, 99);
        const double theta_star = solve_theta_star(inst).theta_star;
        const std::uint64_t bound =
            static_cast<std::uint64_t>(std::min(2 * inst.capacity, inst.n_items));
        const char* names[] = {"baseline_ucb", "at_ducb", "fh_ducb", "esucb"};
        for (const char* name : names) {
            for (std::uint64_t seed : {11ull, 12ull}) {
                PolicySpec spec;
                spec.name = name;
                spec.esucb.constant_scale = 1e-7;
                const std::uint64_t horizon = 4096;
                SimClock clock{0, horizon};
                Rng rng(seed);
                auto policy = make_policy(spec, inst, horizon);
                RunTrace trace(inst, theta_star, TraceMode::kEpoch);
                while (!clock.exhausted()) {
                    const std::uint64_t t_start = clock.t;
                    const EpochOutcome outcome = policy->step(clock, rng);
                    trace.add_epoch(t_start, outcome);
                }
                ++suite.total;
                bool ok = true;
                for (const TraceRow& row : trace.rows()) {
                    if (row.asst_switches > row.item_switches ||
                        row.item_switches > bound * row.asst_switches)
                        ok = false;
                }
                if (!ok) ++suite.failed;
            }
        }
        suites.push_back(suite);
    }

    int failed_suites = 0;
    for (const SuiteReport& suite : suites) {
        const bool ok = suite.failed == 0;
        out << (ok ? "PASS" : "FAIL") << "  " << suite.name << "  (" << (suite.total - suite.failed)
            << "/" << suite.total << " checks)\n";
        if (!ok) ++failed_suites;
    }
    return failed_suites;
}

}  // namespace mnlb
