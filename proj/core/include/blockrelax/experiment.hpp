#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blockrelax/config.hpp"
#include "blockrelax/instance_gen.hpp"
#include "blockrelax/wl1_solver.hpp"

namespace blockrelax {

inline constexpr int kCsvSchema = 1;

/// Guess density of a cell: a fixed value, or s/n evaluated per cell.
struct DensityRule {
  bool ratio_s_over_n = false;
  double value = 0.25;
  [[nodiscard]] double resolve(int s, int n) const;
  [[nodiscard]] std::string label() const;
  static DensityRule parse(const std::string& text);
};

/// Single-instance generator fields from a config (m, n, theta, r, s, nu,
/// sensing_kind, support_mode, planted_alphabet, continuous_planted,
/// reject_zero_guess_columns, seed); missing keys keep `defaults`.
GenConfig gen_config_from(const KeyValueConfig& cfg, const GenConfig& defaults);

/// Cartesian grid over the generator fields. When `m_equals_n` is set the m
/// axis is ignored and every cell uses m = n.
struct GridSpec {
  std::vector<int> m{16};
  bool m_equals_n = true;
  std::vector<int> n{16};
  std::vector<int> theta{2};
  std::vector<int> r{4};
  std::vector<int> s{4};
  std::vector<DensityRule> nu{DensityRule{true, 0.0}};
  std::vector<SensingKind> sensing{SensingKind::OrthonormalBlocks};
  std::vector<SupportMode> support{SupportMode::Equidistributed};
  std::vector<double> planted_alphabet{-1.0, -0.5, 0.5, 1.0};
  bool reject_zero_guess_columns = true;

  /// Reads the grid keys (m, n, theta, r, s, nu, sensing_kind, support_mode,
  /// planted_alphabet, reject_zero_guess_columns). `m=n` ties m to n.
  static GridSpec from_config(const KeyValueConfig& cfg, const GridSpec& defaults);
  /// Cells in lexicographic order of (n, m, theta, r, s, nu, sensing, support);
  /// master_seed is left at zero.
  [[nodiscard]] std::vector<GenConfig> cells() const;
  /// Density label per cell, aligned with cells().
  [[nodiscard]] std::vector<std::string> density_labels() const;
};

struct SweepConfig {
  GridSpec grid;
  int trials = 50;
  double p = 0.5;  ///< l_p exponent of the solver weights
  SolveOptions solver;
  double recovery_tol = 1e-6;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  bool oracle = true;
  std::uint64_t oracle_max_combos = 4096;  ///< run the selector oracle when r^theta <= this
  std::string out;

  static SweepConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

/// Seed of cell `cell` (zero-based) and of trial `trial` (zero-based) within it.
std::uint64_t cell_seed(std::uint64_t master_seed, std::uint64_t cell);
std::uint64_t trial_seed(std::uint64_t cell_seed, std::uint64_t trial);

struct TrialRecord {
  int cell = 0;   ///< zero-based
  int trial = 0;  ///< zero-based
  std::uint64_t seed = 0;
  bool error = false;          ///< the trial threw; `message` says why
  std::string message;
  SolveStatus status = SolveStatus::MaxIter;
  RecoveryOutcome outcome = RecoveryOutcome::Fail;
  double reconstruction_error = 0.0;  ///< ||Xz - x||_inf
  int iterations = 0;
  bool certified = false;
  double margin = 0.0;
  bool oracle_run = false;
  bool oracle_unique = false;
  bool oracle_agrees = false;  ///< unique best combo equals the detected support
  /// Certificate holds but the solver did not return the planted selector.
  bool soundness_violation = false;
  /// Certificate holds, oracle optimum unique, and it differs from the solver.
  bool oracle_violation = false;
};

struct Rate {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at 95%.
Rate wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct CellResult {
  int cell = 0;
  std::uint64_t seed = 0;
  GenConfig params;
  std::string nu_label;
  int trials = 0;
  int n_exact = 0;
  int n_support_match = 0;
  int n_fail = 0;
  int n_solver_failure = 0;  ///< not Optimal, or threw
  int n_certified = 0;
  int n_oracle_run = 0;
  int n_oracle_unique = 0;
  int n_oracle_agree = 0;
  int n_soundness_violation = 0;
  int n_oracle_violation = 0;
  Rate exact;
  Rate certified;
  double wall_time = 0.0;  ///< summed per-trial seconds
};

struct SweepResult {
  std::vector<CellResult> cells;
  std::vector<TrialRecord> trials;  ///< (cell, trial) order
  [[nodiscard]] int invariant_failures() const;
};

/// One trial: build_instance, solve, recovery check, certificate on T and,
/// if enabled and small enough, the exhaustive selector oracle.
TrialRecord run_trial(const SweepConfig& cfg, const GenConfig& cell, int cell_index, int trial_index);
SweepResult run_sweep(const SweepConfig& cfg);
void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const SweepResult& result);

/// The instance and record of a single (cell, trial), both zero-based.
struct Replay {
  GenConfig gen;
  RelaxedInstance instance;
  TrialRecord record;
};
Replay replay_trial(const SweepConfig& cfg, int cell_index, int trial_index);
void write_trial_csv(std::ostream& os, const SweepConfig& cfg, const Replay& replay);

// ---------------------------------------------------------------------------
// r-trials baseline against block relaxation

struct ComparisonConfig {
  GridSpec grid;
  int trials = 1000;
  double p = 0.5;
  SolveOptions solver;
  double recovery_tol = 1e-6;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  std::string out;

  static ComparisonConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

/// Probability that one non-planted guess column equals a planted block with
/// exactly `s` nonzeros drawn uniformly from `alphabet`, under the ternary
/// guess law with density `nu` (conditioned on a nonzero column when
/// `reject_zero` is set).
double guess_match_probability(int n, int s, double nu, const std::vector<double>& alphabet, bool reject_zero);

struct ComparisonRow {
  int cell = 0;
  std::uint64_t seed = 0;
  GenConfig params;
  std::string nu_label;
  int trials = 0;
  double p_l = 0.0;
  int n_block_success = 0;
  int n_baseline_success = 0;
  int n_planted_certified = 0;
  int n_planted_exact = 0;
  Rate block;
  Rate baseline;
  double joint_z = 0.0;  ///< (block - baseline) / sqrt(se_block^2 + se_baseline^2)
  double p_select = 0.0;             ///< certificate success rate on planted instances
  double p_select_recovery = 0.0;    ///< exact-recovery rate on planted instances
  double formula_block_exact = 0.0;
  double formula_block_taylor = 0.0;
  double formula_baseline_exact = 0.0;   ///< 1 - (1 - p_l^theta)^r
  double formula_baseline_taylor = 0.0;  ///< p_l^theta r
  double wall_time = 0.0;
};

/// Per trial: an unplanted ensemble (every guess column random) feeds both the
/// baseline (guess k = concatenation of column k of every block; success iff
/// one equals x) and the relaxation (success iff the solver returns one
/// nonzero per block, on a column equal to x^l, with coefficient 1). A second,
/// planted instance per trial measures p_select.
std::vector<ComparisonRow> run_comparison(const ComparisonConfig& cfg);
void write_comparison_csv(std::ostream& os, const ComparisonConfig& cfg, const std::vector<ComparisonRow>& rows);

// ---------------------------------------------------------------------------
// concentration and identity checks

enum class CheckStatus { Ok, Flag, Fail };
std::string_view to_string(CheckStatus s);

struct ConcentrationRow {
  std::string suite;
  std::string case_label;
  std::uint64_t seed = 0;
  std::string quantity;
  double value = 0.0;
  double reference = 0.0;
  double z_score = 0.0;
  CheckStatus status = CheckStatus::Ok;
};

struct ConcentrationConfig {
  std::vector<std::string> suites{"vectorization", "blocknorm", "sqnorm", "mean", "window", "inner"};
  GenConfig gen;  ///< geometry and laws for the ensemble-based suites
  std::uint64_t trials = 10000;
  int shapes = 100;
  std::vector<double> epsilons{0.1, 0.25, 0.5};
  std::vector<double> deltas{0.25, 0.5, 0.75};
  /// Selector directions for the mean suite: "T" (ones on the planted
  /// columns) and/or "generic" (Gaussian entries).
  std::vector<std::string> directions{"T", "generic"};
  double c = 1.0;
  double K = 1.0;
  double p = 0.5;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  std::string out;

  static ConcentrationConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

std::vector<ConcentrationRow> run_concentration(const ConcentrationConfig& cfg);
void write_concentration_csv(std::ostream& os, const ConcentrationConfig& cfg,
                             const std::vector<ConcentrationRow>& rows);
int count_failures(const std::vector<ConcentrationRow>& rows);

}  // namespace blockrelax
