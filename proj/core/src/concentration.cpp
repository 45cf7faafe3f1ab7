#include "blockrelax/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockrelax/linalg.hpp"
#include "blockrelax/parallel.hpp"
#include "blockrelax/theory_bounds.hpp"

namespace blockrelax {

EnsembleTemplate EnsembleTemplate::from_instance(const RelaxedInstance& inst, const GenConfig& law) {
  EnsembleTemplate t;
  t.A = inst.A;
  t.support = inst.support;
  t.planted_columns = inst.X.planted_columns();
  t.r = inst.X.r();
  t.law = law;
  t.law.reject_zero_guess_columns = false;
  return t;
}

double EnsembleTemplate::p_x() const { return planted_second_moment(law); }

GuessEnsemble EnsembleTemplate::draw(Stream& rng) const {
  const int n = A.n();
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(A.theta()));
  const auto alpha_size = static_cast<std::uint64_t>(law.planted_alphabet.size());
  for (int l = 0; l < A.theta(); ++l) {
    Matrix b = Matrix::Zero(n, r);
    const int planted = planted_columns[static_cast<std::size_t>(l)];
    for (int j : support.block(l)) {
      if (law.continuous_planted) {
        double v = 0.0;
        while (v == 0.0) v = 2.0 * rng.uniform() - 1.0;
        b(j, planted) = v;
      } else {
        b(j, planted) = law.planted_alphabet[rng.below(alpha_size)];
      }
    }
    for (int c = 0; c < r; ++c) {
      if (c == planted) continue;
      for (int j = 0; j < n; ++j) b(j, c) = rng.uniform() < law.guess_density ? rng.rademacher() : 0.0;
    }
    blocks.push_back(std::move(b));
  }
  return GuessEnsemble(std::move(blocks), planted_columns);
}

namespace {

double bernoulli_sigma(double freq, std::uint64_t trials) {
  return std::sqrt(std::max(freq * (1.0 - freq), 0.0) / static_cast<double>(trials));
}

Vector apply_ax(const BlockSensingMatrix& a, const GuessEnsemble& x, const Vector& u) {
  Vector out = Vector::Zero(a.m());
  const int r = x.r();
  for (int l = 0; l < a.theta(); ++l) out += a.block(l) * (x.block(l) * u.segment(static_cast<Eigen::Index>(l) * r, r));
  return out;
}

// A spread at round-off level means the sampled quantity is deterministic;
// then the mean either matches to round-off or is infinitely many sigmas off.
double mc_z_score(double mean, double reference, double std_error) {
  const double roundoff = 1e-12 * (1.0 + std::abs(reference));
  const double diff = mean - reference;
  if (std_error > roundoff) return diff / std_error;
  if (std::abs(diff) <= roundoff) return 0.0;
  return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

double hw_exponent(double ratio, double c, double K, double eps) {
  const double K2 = K * K;
  return c * ratio * std::min(eps * eps / (K2 * K2), eps / K2);
}

}  // namespace

ConcentrationRun empirical_concentration_tail(const EnsembleTemplate& tpl, const Vector& u,
                                              const std::vector<double>& epsilons, std::uint64_t trials,
                                              std::uint64_t seed, double c, double K, int jobs) {
  if (trials < 100) throw InvalidArgument("empirical_concentration_tail: need at least 100 trials");
  const int r = tpl.r;
  if (u.size() != static_cast<Eigen::Index>(tpl.A.theta()) * r)
    throw InvalidArgument("empirical_concentration_tail: u has wrong length");

  ConcentrationRun run;
  const double na = a_norm(u, tpl.A, tpl.support, tpl.planted_columns, r, tpl.p_x(), tpl.p_X());
  run.expected = na * na;
  const Vector fw = a_norm_weights(tpl.A, tpl.support, tpl.planted_columns, r, 1.0, 1.0);
  run.F2 = fw.cwiseProduct(u).squaredNorm();
  const MatrixConstants mc = matrix_constants(tpl.A, tpl.support);

  std::vector<double> values(trials);
  const Stream root(seed);
  parallel_for(trials, jobs, [&](std::uint64_t t) {
    Stream rng = root.substream("trial", t);
    const GuessEnsemble x = tpl.draw(rng);
    values[t] = apply_ax(tpl.A, x, u).squaredNorm();
  });

  double sum = 0.0;
  for (double v : values) sum += v;
  run.sample_mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (double v : values) ss += (v - run.sample_mean) * (v - run.sample_mean);
  const double var = ss / static_cast<double>(trials - 1);
  run.std_error = std::sqrt(var / static_cast<double>(trials));
  run.z_score = mc_z_score(run.sample_mean, run.expected, run.std_error);

  for (double eps : epsilons) {
    if (eps < 0.0) throw InvalidArgument("empirical_concentration_tail: epsilon must be >= 0");
    TailEstimate te;
    te.epsilon = eps;
    te.trials = trials;
    const double thresh = eps * run.F2;
    for (double v : values)
      if (std::abs(v - run.expected) >= thresh) ++te.exceed_count;
    te.frequency = static_cast<double>(te.exceed_count) / static_cast<double>(trials);
    te.paper_bound = 2.0 * std::exp(-hw_exponent(mc.stable_ratio, c, K, eps));
    te.bound_falsified = te.paper_bound < te.frequency - 3.0 * bernoulli_sigma(te.frequency, trials);
    run.tails.push_back(te);
  }
  return run;
}

VectorizationCheck vectorization_check(const Matrix& m, const Matrix& r, const Vector& w) {
  if (m.cols() != r.rows() || r.cols() != w.size()) throw InvalidArgument("vectorization_check: incompatible shapes");
  const Eigen::Index a = m.rows(), b = m.cols(), c = r.cols();
  Matrix kron(a, b * c);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < b; ++j)
      for (Eigen::Index k = 0; k < c; ++k) kron(i, j * c + k) = m(i, j) * w(k);
  Vector r_hat(b * c);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index k = 0; k < c; ++k) r_hat(j * c + k) = r(j, k);
  const Vector lhs = m * (r * w);
  const Vector rhs = kron * r_hat;
  VectorizationCheck out;
  out.max_deviation = lhs.size() ? (lhs - rhs).cwiseAbs().maxCoeff() : 0.0;
  out.scale = 1.0 + m.norm() * r.norm() * w.norm();
  return out;
}

double EntryDistribution::variance() const {
  switch (law) {
    case EntryLaw::Zero: return 0.0;
    case EntryLaw::Rademacher: return 1.0;
    case EntryLaw::Gaussian: return density;
    case EntryLaw::Ternary: return density;
  }
  return 0.0;
}

double EntryDistribution::mean_abs() const {
  switch (law) {
    case EntryLaw::Zero: return 0.0;
    case EntryLaw::Rademacher: return 1.0;
    case EntryLaw::Gaussian: return std::sqrt(2.0 * density / M_PI);
    case EntryLaw::Ternary: return density;
  }
  return 0.0;
}

double EntryDistribution::draw(Stream& rng) const {
  switch (law) {
    case EntryLaw::Zero: return 0.0;
    case EntryLaw::Rademacher: return rng.rademacher();
    case EntryLaw::Gaussian: return std::sqrt(density) * rng.normal();
    case EntryLaw::Ternary: return rng.uniform() < density ? rng.rademacher() : 0.0;
  }
  return 0.0;
}

SqNormCheck expected_sq_norm_check(const Matrix& m, const Vector& w, const EntryDistribution& law,
                                   std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1000) throw InvalidArgument("expected_sq_norm_check: need at least 1000 trials");
  if (m.cols() == 0 || w.size() == 0) throw InvalidArgument("expected_sq_norm_check: empty shapes");
  Stream rng(seed);
  Matrix r(m.cols(), w.size());
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (Eigen::Index k = 0; k < r.cols(); ++k)
      for (Eigen::Index j = 0; j < r.rows(); ++j) r(j, k) = law.draw(rng);
    const double v = (m * (r * w)).squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  SqNormCheck out;
  const double nt = static_cast<double>(trials);
  out.empirical_mean = sum / nt;
  const double var = std::max(0.0, (sum_sq - nt * out.empirical_mean * out.empirical_mean) / (nt - 1.0));
  out.std_error = std::sqrt(var / nt);
  out.analytic = law.variance() * m.squaredNorm() * w.squaredNorm();
  out.z_score = mc_z_score(out.empirical_mean, out.analytic, out.std_error);
  return out;
}

std::vector<WindowCheck> singular_window_check(const EnsembleTemplate& tpl, const std::vector<double>& deltas,
                                               std::uint64_t trials, std::uint64_t seed, double c, double K,
                                               int jobs) {
  const int theta = tpl.A.theta();
  const double p_x = tpl.p_x();
  const Vector wa = a_norm_weights(tpl.A, tpl.support, tpl.planted_columns, tpl.r, p_x, tpl.p_X());
  if (wa.size() == 0 || wa.minCoeff() <= 0.0)
    throw InvalidArgument("singular_window_check: W_A is singular (need F_S > 0, p_x > 0, p_X > 0)");
  const MatrixConstants mc = matrix_constants(tpl.A, tpl.support);

  std::vector<Vector> sv(trials);
  const Stream root(seed);
  parallel_for(trials, jobs, [&](std::uint64_t t) {
    Stream rng = root.substream("trial", t);
    const GuessEnsemble x = tpl.draw(rng);
    Matrix cols(tpl.A.m(), theta);
    for (int l = 0; l < theta; ++l) {
      const int k = tpl.planted_columns[static_cast<std::size_t>(l)];
      cols.col(l) = tpl.A.block(l) * x.block(l).col(k) / wa(l * tpl.r + k);
    }
    sv[t] = Eigen::JacobiSVD<Matrix>(cols).singularValues();
  });

  std::vector<WindowCheck> out;
  for (double delta : deltas) {
    if (!(delta > 0.0) || delta >= 1.0) throw InvalidArgument("singular_window_check: delta must lie in (0, 1)");
    WindowCheck wc;
    wc.delta = delta;
    wc.trials = trials;
    for (const Vector& s : sv) {
      const bool ok = s.size() == 0 || (s.minCoeff() >= 1.0 - delta && s.maxCoeff() <= 1.0 + delta);
      if (ok) ++wc.inside;
    }
    wc.frequency = static_cast<double>(wc.inside) / static_cast<double>(trials);
    const double K2 = K * K;
    const double inner = std::min(p_x * p_x * delta * delta / (4.0 * K2 * K2), p_x * delta / (2.0 * K2));
    wc.paper_floor = 1.0 - 2.0 * std::exp(theta * std::log(12.0 / delta) - c * mc.stable_ratio * inner);
    out.push_back(wc);
  }
  return out;
}

BlockNormCheck block_norm_bound_check(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) throw InvalidArgument("block_norm_bound_check: no blocks");
  const Eigen::Index rows = blocks.front().rows();
  Eigen::Index cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw InvalidArgument("block_norm_bound_check: blocks must share row count");
    cols += b.cols();
  }
  Matrix c(rows, cols);
  Eigen::Index off = 0;
  BlockNormCheck out;
  for (const auto& b : blocks) {
    c.middleCols(off, b.cols()) = b;
    off += b.cols();
    const double nb = linalg::spectral_norm(b);
    out.rhs += nb * nb;
  }
  const double nc = linalg::spectral_norm(c);
  out.lhs = nc * nc;
  out.slack = out.rhs - out.lhs;
  return out;
}

double inner_product_bound(double nu, int d, double v_sq_norm) {
  const double dd = d;
  return 2.0 * std::exp(-(nu * nu * dd * dd) / (dd + 2.0 * v_sq_norm));
}

InnerProductTail inner_product_tail_check(const EntryDistribution& law, const Vector& v, double p,
                                          std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1000) throw InvalidArgument("inner_product_tail_check: need at least 1000 trials");
  if (law.law == EntryLaw::Gaussian) throw InvalidArgument("inner_product_tail_check: entries must lie in [-1, 1]");
  const int d = static_cast<int>(v.size());
  Stream rng(seed);
  Vector x(d);
  InnerProductTail out;
  out.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (int i = 0; i < d; ++i) x(i) = law.draw(rng);
    if (x.dot(v) >= lp_norm(x, p)) ++out.hits;
  }
  out.frequency = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.std_error = bernoulli_sigma(out.frequency, trials);
  out.hoeffding_bound = inner_product_bound(law.mean_abs(), d, v.squaredNorm());
  out.exceeds_bound = out.frequency > out.hoeffding_bound + 3.0 * out.std_error;
  return out;
}

std::vector<double> recovery_vector_quantiles(const EnsembleTemplate& tpl, double p, std::uint64_t trials,
                                              std::uint64_t seed) {
  if (trials == 0) throw InvalidArgument("recovery_vector_quantiles: need trials > 0");
  const int theta = tpl.A.theta();
  std::vector<double> norms;
  norms.reserve(trials);
  const Stream root(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    Stream rng = root.substream("trial", t);
    const GuessEnsemble x = tpl.draw(rng);
    Matrix bt(tpl.A.m(), theta);
    Vector wt(theta);
    for (int l = 0; l < theta; ++l) {
      const Vector col = x.block(l).col(tpl.planted_columns[static_cast<std::size_t>(l)]);
      bt.col(l) = tpl.A.block(l) * col;
      wt(l) = lp_norm(col, p);
    }
    norms.push_back((linalg::pseudo_inverse(bt).transpose() * wt).norm());
  }
  std::sort(norms.begin(), norms.end());
  std::vector<double> q;
  for (double f : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const auto idx = static_cast<std::size_t>(std::min<double>(f * static_cast<double>(norms.size() - 1) + 0.5,
                                                               static_cast<double>(norms.size() - 1)));
    q.push_back(norms[idx]);
  }
  return q;
}

}  // namespace blockrelax
