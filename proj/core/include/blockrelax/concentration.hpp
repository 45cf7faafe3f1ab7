#pragma once

#include <cstdint>
#include <vector>

#include "blockrelax/instance_gen.hpp"
#include "blockrelax/model.hpp"

namespace blockrelax {

/// Fixed geometry for redrawing guess ensembles: the sensing matrix, the
/// support S and the planted column per block stay put; the planted values
/// and all non-planted guess entries are redrawn every trial.
struct EnsembleTemplate {
  BlockSensingMatrix A;
  SupportPattern support;
  IndexList planted_columns;  ///< k^l, zero-based within each block
  int r = 1;
  GenConfig law;              ///< planted alphabet and guess density

  static EnsembleTemplate from_instance(const RelaxedInstance& inst, const GenConfig& law);
  /// One fresh guess ensemble (zero columns are not rejected here, so the
  /// entry law keeps its exact moments).
  [[nodiscard]] GuessEnsemble draw(Stream& rng) const;
  [[nodiscard]] double p_x() const;
  [[nodiscard]] double p_X() const { return law.guess_density; }
};

struct TailEstimate {
  double epsilon = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t exceed_count = 0;
  double frequency = 0.0;
  double paper_bound = 0.0;   ///< 2 exp(-c F_S^2/M^2 min{eps^2/K^4, eps/K^2})
  bool bound_falsified = false;  ///< bound < frequency - 3 sigma for this (c, K)
};

struct ConcentrationRun {
  double expected = 0.0;     ///< ||u||_A^2
  double F2 = 0.0;           ///< sum_l ||A_{S^l}||_F^2 |v^l|^2 + ||A^l||_F^2 ||u^l||^2
  double sample_mean = 0.0;  ///< mean of ||AXu||^2
  double std_error = 0.0;
  double z_score = 0.0;      ///< (sample_mean - expected) / std_error; 0 or +-inf when the spread is round-off
  std::vector<TailEstimate> tails;  ///< one per epsilon, same trials
};

/// Redraws X per trial and records the events |‖AXu‖² − ‖u‖_A²| ≥ eps F².
/// Deterministic for a given seed regardless of `jobs`.
ConcentrationRun empirical_concentration_tail(const EnsembleTemplate& tpl, const Vector& u,
                                              const std::vector<double>& epsilons, std::uint64_t trials,
                                              std::uint64_t seed, double c, double K, int jobs = 1);

struct VectorizationCheck {
  double max_deviation = 0.0;
  double scale = 0.0;  ///< 1 + ||M||_F ||R||_F ||w||
};

/// ‖MRw − (M ⊗ wᵀ) vec(R)‖∞ with the Kronecker operator built explicitly
/// (vec(R) row-major, index j*c + k).
VectorizationCheck vectorization_check(const Matrix& m, const Matrix& r, const Vector& w);

enum class EntryLaw { Zero, Rademacher, Gaussian, Ternary };

struct EntryDistribution {
  EntryLaw law = EntryLaw::Rademacher;
  double density = 1.0;  ///< nu for Ternary; variance for Gaussian

  [[nodiscard]] double variance() const;
  [[nodiscard]] double mean_abs() const;
  double draw(Stream& rng) const;
};

struct SqNormCheck {
  double empirical_mean = 0.0;
  double analytic = 0.0;  ///< V ||M||_F^2 ||w||^2
  double std_error = 0.0;
  double z_score = 0.0;
};

/// Monte Carlo of E‖MRw‖² over random R with i.i.d. entries.
SqNormCheck expected_sq_norm_check(const Matrix& m, const Vector& w, const EntryDistribution& law,
                                   std::uint64_t trials, std::uint64_t seed);

struct WindowCheck {
  double delta = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t inside = 0;
  double frequency = 0.0;  ///< fraction of trials with all singular values in [1-delta, 1+delta]
  double paper_floor = 0.0;  ///< 1 - 2(12/delta)^|T| exp(-c F_S^2/M^2 min{...}), may be negative
};

/// Singular values of (AX W_A^{-1})_{., T} per trial against [1-delta, 1+delta].
/// One entry per delta, all from the same trials.
std::vector<WindowCheck> singular_window_check(const EnsembleTemplate& tpl, const std::vector<double>& deltas,
                                               std::uint64_t trials, std::uint64_t seed, double c, double K,
                                               int jobs = 1);

struct BlockNormCheck {
  double lhs = 0.0;    ///< ||C||^2
  double rhs = 0.0;    ///< sum_l ||C_l||^2
  double slack = 0.0;  ///< rhs - lhs
};

/// Spectral norm bound for a row-compatible block matrix C = (C_1 ... C_theta).
BlockNormCheck block_norm_bound_check(const std::vector<Matrix>& blocks);

struct InnerProductTail {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double frequency = 0.0;
  double std_error = 0.0;
  double hoeffding_bound = 0.0;  ///< 2 exp(-nu^2 d^2 / (d + 2 ||v||^2))
  bool exceeds_bound = false;    ///< frequency > bound + 3 sigma
};

double inner_product_bound(double nu, int d, double v_sq_norm);

/// P(<x, v> >= ‖x‖_p^p) for x with i.i.d. entries from `law`.
InnerProductTail inner_product_tail_check(const EntryDistribution& law, const Vector& v, double p,
                                          std::uint64_t trials, std::uint64_t seed);

/// Empirical quantiles (0, .1, .5, .9, 1) of ‖(AX_T)^{+*} W_T sign‖ over trials.
std::vector<double> recovery_vector_quantiles(const EnsembleTemplate& tpl, double p, std::uint64_t trials,
                                              std::uint64_t seed);

}  // namespace blockrelax
