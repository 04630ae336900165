#pragma once

#include <cstdint>
#include <random>

namespace mnlb {

/// Deterministic stream for simulations: std::mt19937_64 raw output mapped to
/// doubles with the fixed 53-bit ldexp rule, so traces reproduce bit-exactly
/// across platforms and builds. The identifier below is recorded in result
/// provenance.
class Rng {
public:
    static constexpr const char* algorithm_id = "mt19937_64/u53";

    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 significant bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 gen_;
};

/// splitmix64 finalizer; derives isolated per-run seeds from (base, stream).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace mnlb
