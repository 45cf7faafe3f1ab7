#include "blockrelax/wl1_solver.hpp"

#include <algorithm>
#include <cmath>

#include "blockrelax/linalg.hpp"

namespace blockrelax {

void SolveOptions::validate() const {
  if (!(tol_feas > 0.0) || !(tol_opt > 0.0) || !(support_threshold > 0.0) || !(rho > 0.0))
    throw InvalidArgument("SolveOptions: tolerances and rho must be positive");
  if (max_iter < 1 || check_every < 1) throw InvalidArgument("SolveOptions: iteration counts must be positive");
  if (!(over_relaxation > 0.0) || over_relaxation >= 2.0)
    throw InvalidArgument("SolveOptions: over_relaxation must lie in (0, 2)");
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "max-iter";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

std::string_view to_string(RecoveryOutcome o) {
  switch (o) {
    case RecoveryOutcome::Exact: return "exact";
    case RecoveryOutcome::SupportMatch: return "support-match";
    case RecoveryOutcome::Fail: return "fail";
  }
  return "?";
}

IndexList detect_support(const Vector& z, double rel_threshold) {
  IndexList s;
  if (z.size() == 0) return s;
  const double zmax = z.cwiseAbs().maxCoeff();
  if (zmax == 0.0) return s;
  const double cut = rel_threshold * zmax;
  for (Eigen::Index k = 0; k < z.size(); ++k)
    if (std::abs(z(k)) > cut) s.push_back(static_cast<int>(k));
  return s;
}

namespace {

double weighted_l1(const Vector& w, const Vector& z) { return w.cwiseProduct(z.cwiseAbs()).sum(); }

// Lower bound y^T h' on the optimum, where h' is h scaled into the dual
// feasible set {h : |B_k^T h| <= w_k}. Returns -inf if no scaling works.
double dual_lower_bound(const Matrix& b, const Vector& w, const Vector& y, const Vector& h) {
  const Vector g = b.transpose() * h;
  double scale = 1.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double a = std::abs(g(k));
    if (w(k) > 0.0) {
      scale = std::max(scale, a / w(k));
    } else if (a > 1e-14 * (1.0 + h.norm())) {
      return -std::numeric_limits<double>::infinity();
    }
  }
  return y.dot(h) / scale;
}

struct Candidate {
  Vector z;
  double objective = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  bool polished = false;
};

Candidate polish_on_support(const Matrix& b, const Vector& w, const Vector& y, const IndexList& support) {
  Candidate c;
  c.z = Vector::Zero(b.cols());
  c.polished = true;
  if (support.empty()) {
    c.residual = y.norm();
    c.objective = 0.0;
    c.lower = 0.0;
    return c;
  }
  const Matrix bs = linalg::select_columns(b, support);
  const Matrix bs_pinv = linalg::pseudo_inverse(bs);
  const Vector zs = bs_pinv * y;
  for (std::size_t i = 0; i < support.size(); ++i) c.z(support[i]) = zs(static_cast<Eigen::Index>(i));
  c.residual = (b * c.z - y).norm();
  c.objective = weighted_l1(w, c.z);
  Vector ws(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double v = zs(static_cast<Eigen::Index>(i));
    ws(static_cast<Eigen::Index>(i)) = w(support[i]) * (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
  }
  const Vector h = bs_pinv.transpose() * ws;
  c.lower = dual_lower_bound(b, w, y, h);
  return c;
}

}  // namespace

SolveResult solve_weighted_bp(const Matrix& b, const Vector& w, const Vector& y, const SolveOptions& opts) {
  opts.validate();
  const Eigen::Index R = b.cols();
  if (w.size() != R) throw InvalidArgument("solve_weighted_bp: weight length != columns of B");
  if (y.size() != b.rows()) throw InvalidArgument("solve_weighted_bp: y length != rows of B");
  if (R > 0 && w.minCoeff() < 0.0) throw InvalidArgument("solve_weighted_bp: weights must be nonnegative");

  const double ynorm = y.norm();
  const double feas_tol = opts.tol_feas * (1.0 + ynorm);
  const Matrix b_pinv = linalg::pseudo_inverse(b);
  const Vector z_ls = b_pinv * y;

  SolveResult result;
  const double min_residual = (b * z_ls - y).norm();
  if (min_residual > feas_tol) {
    result.z = z_ls;
    result.objective = weighted_l1(w, z_ls);
    result.feas_residual = min_residual;
    result.status = SolveStatus::Infeasible;
    result.detected_support = detect_support(z_ls, opts.support_threshold);
    return result;
  }

  // Projection onto {z : Bz = y}: P(v) = Q v + c.
  const Matrix q = Matrix::Identity(R, R) - b_pinv * b;
  const Vector c = z_ls;
  auto project = [&](const Vector& v) -> Vector { return q * v + c; };

  Candidate best;
  auto consider = [&](Candidate cand) {
    if (cand.residual > feas_tol) return;
    const double gap_old = best.objective - best.lower;
    const double gap_new = cand.objective - cand.lower;
    const bool take = !std::isfinite(best.objective) || cand.objective < best.objective - 1e-15 * (1.0 + best.objective) ||
                      (cand.objective <= best.objective + 1e-15 * (1.0 + best.objective) && gap_new < gap_old);
    const double lower = std::max(best.lower, cand.lower);
    if (take) best = std::move(cand);
    best.lower = lower;
  };
  auto certified = [&]() {
    return std::isfinite(best.objective) && best.objective - best.lower <= opts.tol_opt * (1.0 + std::abs(best.objective));
  };

  Vector u = c;
  Vector lambda = Vector::Zero(R);
  Vector z = c;
  double rho = opts.rho;
  const double alpha = opts.over_relaxation;
  int it = 0;
  if (R > 0) {
    for (it = 1; it <= opts.max_iter; ++it) {
      z = project(u - lambda);
      const Vector zr = alpha * z + (1.0 - alpha) * u;
      const Vector u_prev = u;
      const Vector v = zr + lambda;
      for (Eigen::Index k = 0; k < R; ++k) {
        const double t = w(k) / rho;
        const double a = std::abs(v(k)) - t;
        u(k) = a > 0.0 ? std::copysign(a, v(k)) : 0.0;
      }
      lambda += zr - u;

      if (it % opts.check_every == 0 || it == opts.max_iter) {
        // Raw iterate, made exactly feasible, with the ADMM multiplier as dual.
        Candidate raw;
        raw.z = project(u);
        raw.residual = (b * raw.z - y).norm();
        raw.objective = weighted_l1(w, raw.z);
        const Vector h_admm = -(b_pinv.transpose() * (rho * lambda));
        raw.lower = std::max(dual_lower_bound(b, w, y, h_admm), dual_lower_bound(b, w, y, -h_admm));
        consider(raw);

        if (opts.polish) {
          Candidate pol = polish_on_support(b, w, y, detect_support(u, opts.support_threshold));
          // Keep the polished point only if it is no worse in objective.
          if (pol.residual <= std::max(raw.residual, feas_tol) &&
              pol.objective <= raw.objective + opts.tol_opt * (1.0 + std::abs(raw.objective)))
            consider(std::move(pol));
          else
            best.lower = std::max(best.lower, pol.lower);
        }
        if (certified()) break;

        // Residual balancing; the projection does not depend on rho.
        const double r_primal = (z - u).norm();
        const double r_dual = rho * (u - u_prev).norm();
        if (r_primal > 10.0 * r_dual && rho < 1e8) {
          rho *= 2.0;
          lambda /= 2.0;
        } else if (r_dual > 10.0 * r_primal && rho > 1e-8) {
          rho /= 2.0;
          lambda *= 2.0;
        }
      }
    }
  } else {
    best.z = Vector(0);
    best.objective = 0.0;
    best.lower = 0.0;
    best.residual = ynorm;
  }

  if (!std::isfinite(best.objective)) {
    best.z = project(u);
    best.residual = (b * best.z - y).norm();
    best.objective = weighted_l1(w, best.z);
  }
  result.z = best.z;
  result.objective = best.objective;
  result.feas_residual = best.residual;
  result.duality_gap = best.objective - best.lower;
  result.polished = best.polished;
  result.iterations = std::min(it, opts.max_iter);
  result.detected_support = detect_support(result.z, opts.support_threshold);
  result.status = (certified() && result.feas_residual <= feas_tol) ? SolveStatus::Optimal : SolveStatus::MaxIter;
  return result;
}

CertificateResult kkt_certificate(const Matrix& b, const Vector& w, const IndexList& support, const Vector& signs) {
  if (support.empty()) throw InvalidArgument("kkt_certificate: support must be nonempty");
  if (static_cast<Eigen::Index>(support.size()) != signs.size())
    throw InvalidArgument("kkt_certificate: one sign per support index required");
  if (w.size() != b.cols()) throw InvalidArgument("kkt_certificate: weight length != columns of B");
  std::vector<char> in_support(static_cast<std::size_t>(b.cols()), 0);
  for (int j : support) {
    if (j < 0 || j >= b.cols()) throw InvalidArgument("kkt_certificate: support index out of range");
    if (in_support[static_cast<std::size_t>(j)]) throw InvalidArgument("kkt_certificate: duplicate support index");
    in_support[static_cast<std::size_t>(j)] = 1;
  }

  CertificateResult out;
  const Matrix bs = linalg::select_columns(b, support);
  out.injective = linalg::numerical_rank(bs) == static_cast<int>(support.size());
  Vector ws(signs.size());
  for (Eigen::Index i = 0; i < signs.size(); ++i) ws(i) = w(support[static_cast<std::size_t>(i)]) * signs(i);
  out.h = linalg::pseudo_inverse(bs.transpose()) * ws;

  out.margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    if (in_support[static_cast<std::size_t>(j)]) continue;
    out.margin = std::min(out.margin, w(j) - std::abs(b.col(j).dot(out.h)));
  }
  out.holds = out.injective && out.margin > 0.0;
  return out;
}

RecoveryOutcome recovery_check(const RelaxedInstance& inst, const SolveResult& result, double tol) {
  if (result.status != SolveStatus::Optimal) throw InvalidArgument("recovery_check: solve status is not optimal");
  const Selector z(result.z, inst.X.theta(), inst.X.r());
  const double err = (apply_selector(inst.X, z) - inst.x).cwiseAbs().maxCoeff();
  IndexList t = inst.X.planted_global();
  std::sort(t.begin(), t.end());
  const bool support_ok = result.detected_support == t;
  if (support_ok && err <= tol) return RecoveryOutcome::Exact;
  if (support_ok) return RecoveryOutcome::SupportMatch;
  return RecoveryOutcome::Fail;
}

}  // namespace blockrelax
