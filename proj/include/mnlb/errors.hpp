#pragma once

#include <stdexcept>
#include <string>

namespace mnlb {

// Assortment refers to items outside [1..N] or exceeds the capacity.
struct invalid_assortment : std::runtime_error {
    explicit invalid_assortment(const std::string& what) : std::runtime_error(what) {}
};

// Bad operation parameter or malformed configuration value.
struct bad_parameter : std::runtime_error {
    explicit bad_parameter(const std::string& what) : std::runtime_error(what) {}
};

// Brute-force enumeration refused (instance too large).
struct enumeration_refused : std::runtime_error {
    explicit enumeration_refused(const std::string& what) : std::runtime_error(what) {}
};

// Simulation clock has no steps left for the requested operation.
struct horizon_exhausted : std::runtime_error {
    explicit horizon_exhausted(const std::string& what) : std::runtime_error(what) {}
};

// Malformed on-disk artifact (instance file, config file).
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mnlb
