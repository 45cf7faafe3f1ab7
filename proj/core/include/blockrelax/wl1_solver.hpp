#pragma once

#include <limits>
#include <string_view>

#include "blockrelax/model.hpp"

namespace blockrelax {

struct SolveOptions {
  double tol_feas = 1e-8;            ///< relative: ||Bz - y|| <= tol_feas * (1 + ||y||)
  double tol_opt = 1e-8;             ///< relative duality gap
  int max_iter = 20000;
  double support_threshold = 1e-7;   ///< relative to max|z|
  bool polish = true;
  double rho = 1.0;                  ///< initial ADMM penalty
  double over_relaxation = 1.6;
  int check_every = 10;              ///< iterations between polish/certification attempts

  void validate() const;
};

enum class SolveStatus { Optimal, MaxIter, Infeasible };
std::string_view to_string(SolveStatus s);

struct SolveResult {
  Vector z;
  double objective = 0.0;
  double feas_residual = 0.0;
  IndexList detected_support;  ///< zero-based
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  /// Objective minus the best dual-feasible lower bound found.
  double duality_gap = std::numeric_limits<double>::infinity();
  bool polished = false;
};

/// Weighted basis pursuit: min sum_k w_k |z_k| subject to B z = y.
///
/// ADMM splitting between the affine constraint (projection through a cached
/// pseudo-inverse, independent of the penalty) and weighted soft
/// thresholding. Every `check_every` iterations the current support is
/// polished by least squares and optimality is certified with a dual-feasible
/// vector; the status is Optimal only when that duality gap is below tol_opt.
/// Never claims uniqueness; use kkt_certificate for that.
SolveResult solve_weighted_bp(const Matrix& b, const Vector& w, const Vector& y,
                              const SolveOptions& opts = {});

struct CertificateResult {
  bool holds = false;
  /// min over j outside the support of (w_j - |<B_j, h>|); +inf if the support is everything.
  double margin = 0.0;
  bool injective = false;
  Vector h;
};

/// Weighted KKT certificate on `support` with the given signs: with
/// h = (B_S^T)^+ (w_S .* signs), the sign-consistent vector on S is the
/// unique minimizer if B_S is injective and |<B_j, h>| < w_j off S.
CertificateResult kkt_certificate(const Matrix& b, const Vector& w, const IndexList& support,
                                  const Vector& signs);

enum class RecoveryOutcome { Exact, SupportMatch, Fail };
std::string_view to_string(RecoveryOutcome o);

/// Compares a solve against the planted selector of `inst`.
/// Requires result.status == Optimal.
RecoveryOutcome recovery_check(const RelaxedInstance& inst, const SolveResult& result, double tol);

/// Indices k with |z_k| > rel_threshold * max|z|.
IndexList detect_support(const Vector& z, double rel_threshold);

}  // namespace blockrelax
