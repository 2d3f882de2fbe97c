#pragma once

#include <stdexcept>
#include <string>

namespace bnncim {

// Mismatched vector lengths or tensor shapes.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A crossbar or counter too small to hold what was asked of it, or an
// unsupported mapping/backend combination.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Crossbar geometry that cannot hold a single weight element.
class CapacityError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Malformed or truncated manifest, weights, inputs or report files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reports that do not describe the same workload.
class ComparisonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bnncim
