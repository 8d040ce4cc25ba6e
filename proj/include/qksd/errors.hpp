#pragma once

#include <stdexcept>
#include <string>

namespace qksd {

/// Operands disagree on qubit / orbital count.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file or text record.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request that has no admissible solution (empty space, starved allocation, ...).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative or linear-algebra routine failed to meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index outside the range of the operator it refers to.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Invalid user configuration (CLI flags, run config).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qksd
