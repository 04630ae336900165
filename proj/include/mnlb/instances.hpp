#pragma once

#include <cstdint>
#include <string>

#include "mnlb/core.hpp"

namespace mnlb {

/// r_i, v_i i.i.d. uniform on [0,1) from the given seed (rewards drawn first,
/// then weights).
Instance gen_uniform_random(int n, int k, std::uint64_t seed);

/// The hard-instance base family: v_i = 1/2, r_i = 1 for every item, K = 1.
/// Requires n >= 2.
Instance gen_lowerbound_base(int n);

/// Base family with one perturbed item: v_k = 1/2 + (1/16) * sqrt(n / (24 t1)),
/// clamped to 1 (sets *clamped when provided). K = 1 unless overridden.
Instance gen_lowerbound_perturbed(int n, int k_item, std::uint64_t t1, int capacity = 1,
                                  bool* clamped = nullptr);

/// Strict instance JSON: exactly {"n_items", "capacity", "rewards", "weights"}.
/// Unknown or missing fields raise parse_error naming the field; decimal
/// values round-trip bit-exactly.
Instance load_instance(const std::string& path);
Instance parse_instance_json(const std::string& text);
void save_instance(const Instance& inst, const std::string& path);
std::string instance_to_json(const Instance& inst);

/// FNV-1a over the canonical JSON form; stable across platforms. Used as the
/// instance id in trace headers and summaries.
std::string instance_hash(const Instance& inst);

}  // namespace mnlb
