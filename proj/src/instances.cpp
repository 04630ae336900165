#include "mnlb/instances.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mnlb/rng.hpp"

namespace mnlb {

Instance gen_uniform_random(int n, int k, std::uint64_t seed) {
    if (n < 1 || k < 1 || k > n)
        throw bad_parameter("uniform generator needs 1 <= k <= n, got n=" + std::to_string(n) +
                            " k=" + std::to_string(k));
    Rng rng(seed);
    Instance inst;
    inst.n_items = n;
    inst.capacity = k;
    inst.rewards.resize(static_cast<std::size_t>(n));
    inst.weights.resize(static_cast<std::size_t>(n));
    for (auto& r : inst.rewards) r = rng.next_unit();
    for (auto& v : inst.weights) v = rng.next_unit();
    inst.validate();
    return inst;
}

Instance gen_lowerbound_base(int n) {
    if (n < 2) throw bad_parameter("lower-bound base instance needs n >= 2");
    Instance inst;
    inst.n_items = n;
    inst.capacity = 1;
    inst.rewards.assign(static_cast<std::size_t>(n), 1.0);
    inst.weights.assign(static_cast<std::size_t>(n), 0.5);
    inst.validate();
    return inst;
}

Instance gen_lowerbound_perturbed(int n, int k_item, std::uint64_t t1, int capacity,
                                  bool* clamped) {
    if (k_item < 1 || k_item > n)
        throw bad_parameter("perturbed item index " + std::to_string(k_item) + " outside [1.." +
                            std::to_string(n) + "]");
    if (t1 < 1) throw bad_parameter("t1 must be positive");
    Instance inst = gen_lowerbound_base(n);
    inst.capacity = capacity;

    double v = 0.5 + (1.0 / 16.0) * std::sqrt(static_cast<double>(n) /
                                              (24.0 * static_cast<double>(t1)));
    if (clamped) *clamped = v > 1.0;
    v = std::min(v, 1.0);
    inst.weights[static_cast<std::size_t>(k_item - 1)] = v;
    inst.validate();
    return inst;
}

namespace {

nlohmann::json instance_to_json_obj(const Instance& inst) {
    return nlohmann::json{{"n_items", inst.n_items},
                          {"capacity", inst.capacity},
                          {"rewards", inst.rewards},
                          {"weights", inst.weights}};
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
    return instance_to_json_obj(inst).dump(2) + "\n";
}

Instance parse_instance_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("instance JSON malformed: ") + e.what());
    }
    if (!doc.is_object()) throw parse_error("instance JSON must be an object");

    static const char* kFields[] = {"n_items", "capacity", "rewards", "weights"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        bool known = false;
        for (const char* f : kFields) known |= key == f;
        if (!known) throw parse_error("instance JSON has unknown field \"" + key + "\"");
    }
    for (const char* f : kFields)
        if (!doc.contains(f)) throw parse_error(std::string("instance JSON missing field \"") + f + "\"");

    Instance inst;
    try {
        inst.n_items = doc.at("n_items").get<int>();
        inst.capacity = doc.at("capacity").get<int>();
        inst.rewards = doc.at("rewards").get<std::vector<double>>();
        inst.weights = doc.at("weights").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("instance JSON field has wrong type: ") + e.what());
    }
    try {
        inst.validate();
    } catch (const bad_parameter& e) {
        throw parse_error(std::string("instance JSON invalid: ") + e.what());
    }
    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open instance file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance_json(buf.str());
}

void save_instance(const Instance& inst, const std::string& path) {
    inst.validate();
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write instance file " + path);
    out << instance_to_json(inst);
}

std::string instance_hash(const Instance& inst) {
    const std::string text = instance_to_json_obj(inst).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace mnlb
