#include "blockrelax/theory_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockrelax/linalg.hpp"

namespace blockrelax {

MatrixConstants matrix_constants(const BlockSensingMatrix& a, const SupportPattern& support) {
  if (support.theta() != a.theta() || support.n() != a.n())
    throw InvalidArgument("matrix_constants: support inconsistent with A");
  MatrixConstants mc;
  double f2 = std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (int l = 0; l < a.theta(); ++l) {
    double fs = 0.0;
    for (int j : support.block(l)) fs += a.block(l).col(j).squaredNorm();
    f2 = std::min(f2, fs);
    m = std::max(m, linalg::spectral_norm(a.block(l), 1e-13));
  }
  mc.F_S = std::sqrt(f2);
  mc.M = m;
  mc.s_bar = support.s_bar();
  mc.stable_ratio = m > 0.0 ? f2 / (m * m) : 0.0;
  return mc;
}

Vector a_norm_weights(const BlockSensingMatrix& a, const SupportPattern& support, const IndexList& planted_columns,
                      int r, double p_x, double p_X) {
  const int theta = a.theta();
  if (support.theta() != theta || static_cast<int>(planted_columns.size()) != theta || r < 1)
    throw InvalidArgument("a_norm_weights: inconsistent block structure");
  Vector w(static_cast<Eigen::Index>(theta) * r);
  for (int l = 0; l < theta; ++l) {
    double fs = 0.0;
    for (int j : support.block(l)) fs += a.block(l).col(j).squaredNorm();
    const double planted = std::sqrt(p_x * fs);
    const double other = std::sqrt(p_X) * a.block(l).norm();
    for (int k = 0; k < r; ++k) w(l * r + k) = (k == planted_columns[static_cast<std::size_t>(l)]) ? planted : other;
  }
  return w;
}

double a_norm(const Vector& u, const BlockSensingMatrix& a, const SupportPattern& support,
              const IndexList& planted_columns, int r, double p_x, double p_X) {
  const Vector w = a_norm_weights(a, support, planted_columns, r, p_x, p_X);
  if (u.size() != w.size()) throw InvalidArgument("a_norm: u has wrong length");
  return w.cwiseProduct(u).norm();
}

DeltaValue delta_from_alpha(double alpha, int t_size, int s_bar, double F_S, double p_x) {
  const double denom = alpha * F_S * std::sqrt(p_x);
  if (!(denom > 0.0)) throw InvalidArgument("delta_from_alpha: alpha * F_S * sqrt(p_x) must be positive");
  DeltaValue d;
  d.delta = 1.0 - std::sqrt(static_cast<double>(t_size)) * s_bar / denom;
  d.in_range = d.delta >= 0.0 && d.delta <= 1.0;
  return d;
}

double alpha_from_delta(double delta, int t_size, int s_bar, double F_S, double p_x) {
  const double denom = (1.0 - delta) * F_S * std::sqrt(p_x);
  if (!(std::abs(denom) > 0.0)) throw InvalidArgument("alpha_from_delta: (1 - delta) F_S sqrt(p_x) must be nonzero");
  return std::sqrt(static_cast<double>(t_size)) * s_bar / denom;
}

FailureBound theorem3_failure_bound(const BoundInputs& in) {
  if (in.delta < 0.0 || in.delta > 1.0) throw InvalidArgument("theorem3_failure_bound: delta must lie in [0, 1]");
  if (!(in.c > 0.0) || !(in.K > 0.0)) throw InvalidArgument("theorem3_failure_bound: c and K must be positive");
  if (in.R < in.t_size) throw InvalidArgument("theorem3_failure_bound: R < |T|");
  const double M2 = in.constants.M * in.constants.M;
  const double F2 = in.constants.F_S * in.constants.F_S;
  const double n = in.n;

  FailureBound fb;
  const double count = 2.0 * (in.R - in.t_size);
  const double expo1 = -(in.nu * in.nu * n * n) / (n + 2.0 * M2 * in.alpha * in.alpha);
  fb.log_term_coherence = count > 0.0 ? std::log(count) + expo1 : -std::numeric_limits<double>::infinity();
  fb.term_coherence = std::exp(fb.log_term_coherence);

  if (in.delta == 0.0) {
    fb.log_term_rip = std::numeric_limits<double>::infinity();
    fb.term_rip = std::numeric_limits<double>::infinity();
  } else {
    const double K2 = in.K * in.K;
    const double inner = std::min(in.p_x * in.p_x * in.delta * in.delta / (4.0 * K2 * K2), in.p_x * in.delta / (2.0 * K2));
    const double ratio = M2 > 0.0 ? F2 / M2 : 0.0;
    fb.log_term_rip = std::log(2.0) + in.t_size * std::log(12.0 / in.delta) - in.c * ratio * inner;
    fb.term_rip = std::exp(fb.log_term_rip);
  }
  fb.total = fb.term_coherence + fb.term_rip;
  return fb;
}

double max_trials_bound(double s, double n, double theta) {
  if (!(s > 0.0) || !(n > 0.0) || !(theta > 0.0)) throw InvalidArgument("max_trials_bound: arguments must be positive");
  const double e = std::min(s / theta, s * s / n);
  return std::exp(e - std::log(theta));
}

double success_prob_r_trials(double p, double r) {
  if (p < 0.0 || p > 1.0 || r < 1.0) throw InvalidArgument("success_prob_r_trials: need p in [0,1], r >= 1");
  if (p == 1.0) return 1.0;
  return -std::expm1(r * std::log1p(-p));
}

BlockRelaxationProbability success_prob_block_relaxation(const std::vector<double>& p_l, double r, double p_select) {
  if (p_select < 0.0 || p_select > 1.0) throw InvalidArgument("success_prob_block_relaxation: p_select outside [0,1]");
  BlockRelaxationProbability out{p_select, p_select};
  for (double p : p_l) {
    out.exact *= success_prob_r_trials(p, r);
    out.approximate *= p * r;
  }
  return out;
}

BlockRelaxationProbability success_prob_block_relaxation(double p_l, double r, int theta, double p_select) {
  return success_prob_block_relaxation(std::vector<double>(static_cast<std::size_t>(theta), p_l), r, p_select);
}

double repeat_failure(double p, double q) {
  if (p < 0.0 || p >= 1.0 || !(q > 0.0)) throw InvalidArgument("repeat_failure: need 0 <= p < 1, q > 0");
  return std::exp(std::log1p(-p) / q);
}

double limit_ratio(double p, double q) {
  if (p >= 1.0) throw InvalidArgument("limit_ratio: p must be < 1");
  if (p < 0.0 || !(q > 0.0)) throw InvalidArgument("limit_ratio: need p >= 0, q > 0");
  if (p == 0.0) return 1.0;
  return -std::expm1(std::log1p(-p) / q) / (p / q);
}

}  // namespace blockrelax
