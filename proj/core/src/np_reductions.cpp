#include "blockrelax/np_reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blockrelax/linalg.hpp"
#include "blockrelax/selector_oracle.hpp"

namespace blockrelax {

namespace {

constexpr double kWindowSlack = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

// Column-norm window |S| <= ||A_S||_F^2 <= hi |S| for every S reduces to a
// per-column check, since the squared Frobenius norm is additive over columns.
void assert_block_windows(const BlockSensingMatrix& a, double col_hi, double spec_lo, double spec_hi,
                          const std::string& who) {
  for (int l = 0; l < a.theta(); ++l) {
    for (int j = 0; j < a.n(); ++j) {
      const double c = a.block(l).col(j).squaredNorm();
      if (c < 1.0 - kWindowSlack || c > col_hi + kWindowSlack)
        throw std::logic_error(who + ": column norm window violated");
    }
    const double s = linalg::spectral_norm(a.block(l));
    if (s < spec_lo - kWindowSlack || s > spec_hi + kWindowSlack)
      throw std::logic_error(who + ": spectral norm window violated");
  }
}

}  // namespace

void X3CInstance::validate() const {
  require(m >= 3 && m % 3 == 0, "X3C: m must be a positive multiple of 3");
  require(!triples.empty(), "X3C: need at least one triple");
  require(n >= 2, "X3C: n must be at least 2");
  require(n < m - 2, "X3C: the reduction needs n < m - 2 (m >= 6 when n = 2)");
  for (const auto& t : triples) {
    for (int e : t) require(e >= 1 && e <= m, "X3C: triple element out of range");
    require(t[0] != t[1] && t[0] != t[2] && t[1] != t[2], "X3C: triple elements must be distinct");
  }
}

void PartitionInstance::validate() const {
  require(!a.empty(), "partition: need at least one number");
  for (double v : a) require(v > 0.0 && std::isfinite(v), "partition: entries must be positive");
}

Reduction x3c_to_l0(const X3CInstance& inst, std::uint64_t seed) {
  inst.validate();
  const int m = inst.m;
  const int n = inst.n;
  const int rows = m + n - 1;
  Stream root(seed);
  std::vector<Matrix> blocks;
  for (std::size_t l = 0; l < inst.triples.size(); ++l) {
    Matrix b = Matrix::Zero(rows, n);
    for (int e : inst.triples[l]) b(e - 1, 0) = 1.0;
    Stream rng = root.substream("orthogonal", l);
    b.block(m, 1, n - 1, n - 1) = linalg::random_orthonormal(rng, n - 1, n - 1);
    blocks.push_back(std::move(b));
  }
  Reduction red;
  red.A = BlockSensingMatrix(std::move(blocks));
  red.y = Vector::Zero(rows);
  red.y.head(m).setOnes();
  red.target = m / 3.0;
  assert_block_windows(red.A, 3.0, 1.0, std::sqrt(3.0), "x3c_to_l0");
  return red;
}

Reduction partition_to_lp(const PartitionInstance& inst, double p) {
  require(p > 0.0 && p < 1.0, "partition_to_lp: p must lie in (0, 1)");
  inst.validate();
  const int m = static_cast<int>(inst.a.size());
  Vector a(m);
  for (int i = 0; i < m; ++i) a(i) = inst.a[static_cast<std::size_t>(i)];
  Reduction red;
  red.last_row_scale = 1.0 / std::max(1.0, std::sqrt(2.0) * a.norm());
  Matrix left = Matrix::Zero(m + 1, m);
  Matrix right = Matrix::Zero(m + 1, m);
  left.topRows(m).setIdentity();
  right.topRows(m).setIdentity();
  left.row(m) = red.last_row_scale * a.transpose();
  right.row(m) = -red.last_row_scale * a.transpose();
  red.A = BlockSensingMatrix({left, right});
  red.y = Vector::Ones(m + 1);
  red.y(m) = 0.0;
  red.target = m;
  assert_block_windows(red.A, 2.0, std::sqrt(0.5), std::sqrt(1.5), "partition_to_lp");
  return red;
}

const std::vector<double>& partition_grid() {
  static const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  return grid;
}

Decision decide_x3c_via_l0(const X3CInstance& inst, std::uint64_t seed) {
  const Reduction red = x3c_to_l0(inst, seed);
  const Matrix a = red.A.full();
  const int guard = std::min<int>(12, static_cast<int>(a.cols()));
  const auto res = l0_min_oracle(a, red.y, guard, 1e-9 * (1.0 + red.y.norm()));
  Decision d;
  d.oracle_value = res ? res->min_l0 : std::numeric_limits<double>::infinity();
  d.yes = res && std::abs(res->min_l0 - red.target) < 1e-9;
  return d;
}

Decision decide_partition_via_lp(const PartitionInstance& inst, double p) {
  const Reduction red = partition_to_lp(inst, p);
  const auto res = discrete_lp_oracle(red.A.full(), red.y, p, partition_grid(), 1e-9 * (1.0 + red.y.norm()));
  Decision d;
  d.oracle_value = res ? res->min_value : std::numeric_limits<double>::infinity();
  d.yes = res && std::abs(res->min_value - red.target) <= 1e-6;
  return d;
}

bool x3c_brute_force(const X3CInstance& inst) {
  const auto theta = inst.triples.size();
  if (theta > 30) throw GuardExceeded("x3c_brute_force: too many triples");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << theta); ++mask) {
    std::vector<int> hits(static_cast<std::size_t>(inst.m) + 1, 0);
    for (std::size_t l = 0; l < theta; ++l)
      if (mask >> l & 1U)
        for (int e : inst.triples[l]) ++hits[static_cast<std::size_t>(e)];
    if (std::all_of(hits.begin() + 1, hits.end(), [](int h) { return h == 1; })) return true;
  }
  return false;
}

bool partition_brute_force(const PartitionInstance& inst) {
  const auto m = inst.a.size();
  if (m > 30) throw GuardExceeded("partition_brute_force: too many numbers");
  double total = 0.0;
  for (double v : inst.a) total += v;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1U) s += inst.a[i];
    if (std::abs(2.0 * s - total) <= 1e-9 * (1.0 + total)) return true;
  }
  return false;
}

InstanceContainer reduction_container(const Reduction& red, const std::string& kind, const Decision& verified) {
  InstanceContainer c;
  c.set("kind", "reduction");
  c.set("reduction", kind);
  c.set("m", std::to_string(red.A.m()));
  c.set("n", std::to_string(red.A.n()));
  c.set("theta", std::to_string(red.A.theta()));
  c.set("target", format_double(red.target));
  if (kind == "partition") {
    c.set("last_row_scale", format_double(red.last_row_scale));
    c.set("last_row_rescaling", "divide by max(1, sqrt(2)*||a||_2)");
  }
  c.set("oracle_verification", std::isfinite(verified.oracle_value) ? format_double(verified.oracle_value) : "infeasible");
  c.set("decision", verified.yes ? "yes" : "no");
  for (int l = 0; l < red.A.theta(); ++l) c.set_matrix("A" + std::to_string(l + 1), red.A.block(l));
  c.set_matrix("y", red.y);
  return c;
}

}  // namespace blockrelax
