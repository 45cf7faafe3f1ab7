#pragma once

#include "blockrelax/model.hpp"

namespace blockrelax {

/// The only properties of the sensing matrix that enter the recovery bound.
struct MatrixConstants {
  double F_S = 0.0;   ///< min_l ||A^l_{., S^l}||_F
  double M = 0.0;     ///< max_l ||A^l|| (spectral)
  int s_bar = 0;      ///< max_l |S^l|
  double stable_ratio = 0.0;  ///< F_S^2 / M^2
};

MatrixConstants matrix_constants(const BlockSensingMatrix& a, const SupportPattern& support);

/// Diagonal of W_A: sqrt(p_x)||A_{.,S^l}||_F on planted columns,
/// sqrt(p_X)||A^l||_F on the others. Length R = r * theta.
Vector a_norm_weights(const BlockSensingMatrix& a, const SupportPattern& support, const IndexList& planted_columns,
                      int r, double p_x, double p_X);

/// ||u||_A = ||W_A u||, the square root of E||AXu||^2.
double a_norm(const Vector& u, const BlockSensingMatrix& a, const SupportPattern& support,
              const IndexList& planted_columns, int r, double p_x, double p_X);

/// 1 - delta = sqrt(|T|) s_bar / (alpha F_S sqrt(p_x)).
struct DeltaValue {
  double delta = 0.0;
  bool in_range = true;  ///< false when delta falls outside [0, 1]; value reported unclamped
};
DeltaValue delta_from_alpha(double alpha, int t_size, int s_bar, double F_S, double p_x);
double alpha_from_delta(double delta, int t_size, int s_bar, double F_S, double p_x);

struct BoundInputs {
  double alpha = 0.0;
  double delta = 0.0;
  double nu = 0.0;
  double p_x = 0.0;
  double p_X = 0.0;
  int n = 0;
  int R = 0;
  int t_size = 0;
  double c = 1.0;
  double K = 1.0;
  MatrixConstants constants;
};

struct FailureBound {
  double term_coherence = 0.0;  ///< 2(R-|T|) exp(-nu^2 n^2 / (n + 2 M^2 alpha^2))
  double term_rip = 0.0;        ///< 2 (12/delta)^|T| exp(-c F_S^2/M^2 min{...})
  double total = 0.0;           ///< uncapped sum
  double log_term_coherence = 0.0;
  double log_term_rip = 0.0;
};

/// Failure probability bound of the block-relaxed recovery. Evaluated in log
/// space; not clamped to [0, 1]. delta = 0 yields an infinite RIP term.
FailureBound theorem3_failure_bound(const BoundInputs& in);

/// min{ e^{s/theta} / theta, e^{s^2/n} / theta } with generic constants set to 1.
double max_trials_bound(double s, double n, double theta);

/// 1 - (1 - p)^r.
double success_prob_r_trials(double p, double r);

struct BlockRelaxationProbability {
  double exact = 0.0;        ///< p_select * prod_l (1 - (1 - p_l)^r)
  double approximate = 0.0;  ///< p_select * prod_l (p_l r)
};
BlockRelaxationProbability success_prob_block_relaxation(const std::vector<double>& p_l, double r, double p_select);
BlockRelaxationProbability success_prob_block_relaxation(double p_l, double r, int theta, double p_select);

/// (1 - (1 - p)^{1/q}) / (p / q); tends to 1 when p, q, p/q -> 0.
double limit_ratio(double p, double q);

/// (1 - p)^{1/q}; tends to 0 when p/q -> infinity.
double repeat_failure(double p, double q);

}  // namespace blockrelax
