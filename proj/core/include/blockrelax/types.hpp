#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace blockrelax {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Zero-based column/row indices. File formats and user-facing output are
/// 1-based; conversion happens at the I/O boundary only.
using IndexList = std::vector<int>;

/// Thrown when inputs violate an operation's preconditions (bad shapes,
/// out-of-range parameters, inconsistent instances).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a combinatorial oracle would exceed its enumeration guard.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed instance containers or config files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blockrelax
