#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blockrelax/model.hpp"

namespace blockrelax {

/// Exhaustive result over all r^theta discrete selectors.
struct OracleResult {
  /// Every minimizing combination (k^1..k^theta), zero-based, in lexicographic order.
  std::vector<IndexList> best_combos;
  double best_objective = 0.0;
  std::uint64_t feasible_count = 0;
  std::uint64_t evaluated_count = 0;

  [[nodiscard]] bool unique() const { return best_combos.size() == 1; }
};

inline constexpr std::uint64_t kSelectorGuard = 1'000'000;

/// Enumerates all discrete selectors. A combination is feasible when
/// ||AX z - y|| <= tol_feas * (1 + ||y||) (same convention as the solver);
/// its objective is the sum of the chosen columns' l_p weights.
/// Combinations are split into contiguous ranges across `jobs` threads and
/// merged in lexicographic order, so the output does not depend on `jobs`.
OracleResult enumerate_selectors(const RelaxedInstance& inst, double p, double tol_feas, int jobs = 1);

/// Lower-level form on an explicit effective matrix and weights.
OracleResult enumerate_selectors(const Matrix& b, const Vector& w, const Vector& y, int theta, int r,
                                 double tol_feas, int jobs = 1);

struct L0Result {
  int min_l0 = 0;
  IndexList witness;  ///< zero-based columns of the first feasible support found
};

/// Minimum l_0 solution of Ax = y by scanning supports of increasing size.
/// A support is feasible iff its least-squares residual is <= tol.
/// Returns nullopt when no support of size <= max_support works.
std::optional<L0Result> l0_min_oracle(const Matrix& a, const Vector& y, int max_support, double tol);

struct DiscreteLpResult {
  double min_value = 0.0;
  std::vector<Vector> witnesses;  ///< all minimizers, in grid-scan order
};

/// Full scan of grid^dim for min ||x||_p^p subject to ||Ax - y|| <= tol.
/// The grid must contain 0. Ties are values within 1e-12 relative.
std::optional<DiscreteLpResult> discrete_lp_oracle(const Matrix& a, const Vector& y, double p,
                                                   const std::vector<double>& grid, double tol);

}  // namespace blockrelax
