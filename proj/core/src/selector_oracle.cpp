#include "blockrelax/selector_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "blockrelax/linalg.hpp"

namespace blockrelax {

namespace {

std::uint64_t checked_power(int base, int exp, std::uint64_t guard) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= static_cast<std::uint64_t>(base);
    if (v > guard)
      throw GuardExceeded("enumeration of " + std::to_string(base) + "^" + std::to_string(exp) +
                          " points exceeds the guard of " + std::to_string(guard));
  }
  return v;
}

struct RangeResult {
  std::vector<IndexList> best;
  double best_objective = std::numeric_limits<double>::infinity();
  std::uint64_t feasible = 0;
};

bool ties(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

void merge_into(RangeResult& acc, RangeResult&& part) {
  acc.feasible += part.feasible;
  if (part.best.empty()) return;
  if (acc.best.empty() || (part.best_objective < acc.best_objective && !ties(part.best_objective, acc.best_objective))) {
    acc.best = std::move(part.best);
    acc.best_objective = part.best_objective;
  } else if (ties(part.best_objective, acc.best_objective)) {
    for (auto& c : part.best) acc.best.push_back(std::move(c));
    acc.best_objective = std::min(acc.best_objective, part.best_objective);
  }
}

}  // namespace

OracleResult enumerate_selectors(const Matrix& b, const Vector& w, const Vector& y, int theta, int r,
                                 double tol_feas, int jobs) {
  if (theta < 1 || r < 1 || b.cols() != static_cast<Eigen::Index>(theta) * r || w.size() != b.cols() ||
      y.size() != b.rows())
    throw InvalidArgument("enumerate_selectors: dimension mismatch");
  const std::uint64_t total = checked_power(r, theta, kSelectorGuard);
  const double tol = tol_feas * (1.0 + y.norm());

  auto scan = [&](std::uint64_t begin, std::uint64_t end) {
    RangeResult out;
    IndexList combo(static_cast<std::size_t>(theta));
    Vector resid(b.rows());
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      // Lexicographic decoding: block 1 is the most significant digit.
      std::uint64_t rest = idx;
      for (int l = theta - 1; l >= 0; --l) {
        combo[static_cast<std::size_t>(l)] = static_cast<int>(rest % static_cast<std::uint64_t>(r));
        rest /= static_cast<std::uint64_t>(r);
      }
      resid = -y;
      double obj = 0.0;
      for (int l = 0; l < theta; ++l) {
        const int col = l * r + combo[static_cast<std::size_t>(l)];
        resid += b.col(col);
        obj += w(col);
      }
      if (resid.norm() > tol) continue;
      ++out.feasible;
      if (out.best.empty() || (obj < out.best_objective && !ties(obj, out.best_objective))) {
        out.best.assign(1, combo);
        out.best_objective = obj;
      } else if (ties(obj, out.best_objective)) {
        out.best.push_back(combo);
        out.best_objective = std::min(out.best_objective, obj);
      }
    }
    return out;
  };

  const auto workers = static_cast<std::uint64_t>(std::clamp<std::uint64_t>(
      static_cast<std::uint64_t>(std::max(jobs, 1)), 1, std::max<std::uint64_t>(1, total / 1024)));
  std::vector<RangeResult> parts(workers);
  if (workers == 1) {
    parts[0] = scan(0, total);
  } else {
    std::vector<std::jthread> threads;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (std::uint64_t t = 0; t < workers; ++t) {
      const std::uint64_t lo = std::min(total, t * chunk);
      const std::uint64_t hi = std::min(total, lo + chunk);
      threads.emplace_back([&, t, lo, hi] { parts[t] = scan(lo, hi); });
    }
  }
  RangeResult acc;
  for (auto& part : parts) merge_into(acc, std::move(part));

  OracleResult res;
  res.best_combos = std::move(acc.best);
  res.best_objective = res.best_combos.empty() ? std::numeric_limits<double>::infinity() : acc.best_objective;
  res.feasible_count = acc.feasible;
  res.evaluated_count = total;
  return res;
}

OracleResult enumerate_selectors(const RelaxedInstance& inst, double p, double tol_feas, int jobs) {
  return enumerate_selectors(effective_matrix(inst.A, inst.X), solver_weights(inst.X, p), inst.y, inst.X.theta(),
                             inst.X.r(), tol_feas, jobs);
}

std::optional<L0Result> l0_min_oracle(const Matrix& a, const Vector& y, int max_support, double tol) {
  if (max_support < 0 || max_support > 12) throw GuardExceeded("l0_min_oracle: max_support must lie in [0, 12]");
  if (y.size() != a.rows()) throw InvalidArgument("l0_min_oracle: y length != rows of A");
  if (y.norm() <= tol) return L0Result{0, {}};
  const int cols = static_cast<int>(a.cols());
  for (int k = 1; k <= std::min(max_support, cols); ++k) {
    // Lexicographic k-subsets of {0..cols-1}.
    IndexList subset(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
    for (;;) {
      const Matrix as = linalg::select_columns(a, subset);
      const Vector xs = linalg::least_squares(as, y);
      if ((as * xs - y).norm() <= tol) return L0Result{k, subset};
      int i = k - 1;
      while (i >= 0 && subset[static_cast<std::size_t>(i)] == cols - k + i) --i;
      if (i < 0) break;
      ++subset[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return std::nullopt;
}

std::optional<DiscreteLpResult> discrete_lp_oracle(const Matrix& a, const Vector& y, double p,
                                                   const std::vector<double>& grid, double tol) {
  if (!(p > 0.0) || p > 1.0) throw InvalidArgument("discrete_lp_oracle: p must lie in (0, 1]");
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end())
    throw InvalidArgument("discrete_lp_oracle: grid must contain 0");
  if (y.size() != a.rows()) throw InvalidArgument("discrete_lp_oracle: y length != rows of A");
  const int dim = static_cast<int>(a.cols());
  checked_power(static_cast<int>(grid.size()), dim, 10'000'000);

  std::vector<double> cost(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) cost[g] = grid[g] == 0.0 ? 0.0 : std::pow(std::abs(grid[g]), p);

  // Depth-first odometer over the whole grid; partial[d] holds A x restricted
  // to the first d coordinates so each leaf costs one column update.
  std::vector<Vector> partial(static_cast<std::size_t>(dim) + 1, Vector::Zero(a.rows()));
  partial[0] = -y;
  std::vector<std::size_t> digit(static_cast<std::size_t>(dim), 0);
  std::vector<double> partial_cost(static_cast<std::size_t>(dim) + 1, 0.0);

  DiscreteLpResult res;
  res.min_value = std::numeric_limits<double>::infinity();
  Vector point(dim);
  auto visit_leaf = [&]() {
    const double value = partial_cost[static_cast<std::size_t>(dim)];
    if (partial[static_cast<std::size_t>(dim)].norm() > tol) return;
    for (int d = 0; d < dim; ++d) point(d) = grid[digit[static_cast<std::size_t>(d)]];
    if (res.witnesses.empty() || (value < res.min_value && !ties(value, res.min_value))) {
      res.witnesses.assign(1, point);
      res.min_value = value;
    } else if (ties(value, res.min_value)) {
      res.witnesses.push_back(point);
      res.min_value = std::min(res.min_value, value);
    }
  };

  if (dim == 0) {
    visit_leaf();
  } else {
    int d = 0;
    digit[0] = 0;
    for (;;) {
      const auto du = static_cast<std::size_t>(d);
      partial[du + 1] = partial[du] + grid[digit[du]] * a.col(d);
      partial_cost[du + 1] = partial_cost[du] + cost[digit[du]];
      if (d + 1 < dim) {
        ++d;
        digit[static_cast<std::size_t>(d)] = 0;
        continue;
      }
      visit_leaf();
      // Advance the odometer.
      while (d >= 0 && ++digit[static_cast<std::size_t>(d)] == grid.size()) --d;
      if (d < 0) break;
    }
  }
  if (res.witnesses.empty()) return std::nullopt;
  return res;
}

}  // namespace blockrelax
