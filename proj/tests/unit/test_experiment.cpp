#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "blockrelax/experiment.hpp"

using namespace blockrelax;

namespace {

SweepConfig one_cell_sweep(int r, int trials, std::uint64_t seed) {
  SweepConfig cfg;
  cfg.grid.n = {16};
  cfg.grid.theta = {2};
  cfg.grid.s = {4};
  cfg.grid.r = {r};
  cfg.grid.nu = {DensityRule{false, 0.25}};
  cfg.trials = trials;
  cfg.master_seed = seed;
  return cfg;
}

std::string strip_last_column(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') line = line.substr(0, line.rfind(','));
    out += line + '\n';
  }
  return out;
}

int data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int rows = -1;  // header line
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++rows;
  return rows;
}

}  // namespace

TEST(DensityRule, ParseAndResolve) {
  const auto ratio = DensityRule::parse("s/n");
  EXPECT_TRUE(ratio.ratio_s_over_n);
  EXPECT_DOUBLE_EQ(ratio.resolve(4, 16), 0.25);
  EXPECT_EQ(ratio.label(), "s/n");
  const auto fixed = DensityRule::parse("0.3");
  EXPECT_DOUBLE_EQ(fixed.resolve(4, 16), 0.3);
  EXPECT_THROW(DensityRule::parse("half"), FormatError);
}

TEST(GridSpec, CellOrderAndMTiedToN) {
  const auto cfg = KeyValueConfig::parse_string("n=16,32\ntheta=2\ntheta=4\nr=2\ns=4\nnu=s/n\n");
  const auto g = GridSpec::from_config(cfg, GridSpec{});
  const auto cells = g.cells();
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].n, 16);
  EXPECT_EQ(cells[0].theta, 2);
  EXPECT_EQ(cells[1].theta, 4);
  EXPECT_EQ(cells[2].n, 32);
  for (const auto& c : cells) {
    EXPECT_EQ(c.m, c.n);
    EXPECT_DOUBLE_EQ(c.guess_density, 4.0 / c.n);
  }
  const auto explicit_m = GridSpec::from_config(KeyValueConfig::parse_string("m=20\nn=16\n"), GridSpec{});
  EXPECT_EQ(explicit_m.cells()[0].m, 20);
}

TEST(Seeds, DerivedPerCellAndTrial) {
  EXPECT_EQ(cell_seed(7, 0), derive_seed(7, "cell", 0));
  EXPECT_EQ(trial_seed(cell_seed(7, 0), 3), derive_seed(cell_seed(7, 0), "trial", 3));
  EXPECT_NE(cell_seed(7, 0), cell_seed(7, 1));
}

TEST(Wilson, Interval) {
  const auto r = wilson_interval(0, 50);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.lo, 0.0);
  EXPECT_GT(r.hi, 0.0);
  const auto h = wilson_interval(25, 50);
  EXPECT_DOUBLE_EQ(h.value, 0.5);
  EXPECT_NEAR(h.lo + h.hi, 1.0, 1e-12);
  // Wilson bound for 25/50 at z = 1.96: (0.5 + z^2/100 -/+ z sqrt(0.005 + z^2/10000)) / (1 + z^2/50)
  const double z = 1.959963984540054;
  const double lo = (0.5 + z * z / 100 - z * std::sqrt(0.25 / 50 + z * z / 10000)) / (1 + z * z / 50);
  EXPECT_NEAR(h.lo, lo, 1e-12);
}

TEST(Sweep, OneCellBookkeeping) {
  const auto cfg = one_cell_sweep(2, 50, 7);
  const auto res = run_sweep(cfg);
  ASSERT_EQ(res.cells.size(), 1u);
  const auto& c = res.cells[0];
  EXPECT_EQ(c.trials, 50);
  EXPECT_LE(c.n_exact + c.n_support_match + c.n_fail, 50);
  EXPECT_EQ(c.n_exact + c.n_support_match + c.n_fail + c.n_solver_failure, 50);
  EXPECT_LE(c.n_certified, 50);
  EXPECT_LE(c.n_oracle_unique, c.n_oracle_run);
  EXPECT_EQ(c.n_soundness_violation, 0);
  EXPECT_EQ(c.n_oracle_violation, 0);
  EXPECT_EQ(res.invariant_failures(), 0);
  EXPECT_GE(c.exact.value, c.exact.lo);
  EXPECT_LE(c.exact.value, c.exact.hi);

  std::ostringstream os;
  write_sweep_csv(os, cfg, res);
  EXPECT_EQ(os.str().rfind("# schema=1 kind=sweep", 0), 0u);
  EXPECT_EQ(data_rows(os.str()), 1);
}

TEST(Sweep, SingleGuessCertifiedMeansExact) {
  const auto res = run_sweep(one_cell_sweep(1, 50, 3));
  int certified = 0;
  for (const auto& t : res.trials) {
    if (!t.certified) continue;
    ++certified;
    EXPECT_EQ(t.outcome, RecoveryOutcome::Exact);
  }
  EXPECT_GT(certified, 0);
  EXPECT_EQ(res.cells[0].n_certified, certified);
}

TEST(Sweep, CsvIndependentOfJobs) {
  auto cfg = one_cell_sweep(4, 12, 11);
  cfg.grid.theta = {2, 3};
  std::ostringstream a, b;
  cfg.jobs = 1;
  write_sweep_csv(a, cfg, run_sweep(cfg));
  cfg.jobs = 8;
  write_sweep_csv(b, cfg, run_sweep(cfg));
  EXPECT_EQ(strip_last_column(a.str()), strip_last_column(b.str()));
  EXPECT_EQ(data_rows(a.str()), 2);
}

TEST(Sweep, ReplayReproducesRecord) {
  const auto cfg = one_cell_sweep(3, 6, 19);
  const auto res = run_sweep(cfg);
  for (int t : {0, 5}) {
    const auto rep = replay_trial(cfg, 0, t);
    const auto& orig = res.trials[static_cast<std::size_t>(t)];
    EXPECT_EQ(rep.record.seed, orig.seed);
    EXPECT_EQ(rep.record.certified, orig.certified);
    EXPECT_EQ(rep.record.outcome, orig.outcome);
    EXPECT_EQ(rep.record.margin, orig.margin);
    EXPECT_EQ(rep.instance.master_seed, orig.seed);
  }
  EXPECT_THROW(replay_trial(cfg, 1, 0), InvalidArgument);
  EXPECT_THROW(replay_trial(cfg, 0, 6), InvalidArgument);
}

TEST(Sweep, ValidateRejectsBadConfig) {
  auto cfg = one_cell_sweep(2, 0, 1);
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = one_cell_sweep(2, 5, 1);
  cfg.grid.s = {20};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(GuessMatch, AnalyticMatchesMonteCarlo) {
  const int n = 4, s = 1;
  const double nu = 0.25;
  const std::vector<double> alphabet{-1.0, 1.0};
  Stream rng(4);
  for (bool reject : {false, true}) {
    const double p = guess_match_probability(n, s, nu, alphabet, reject);
    const int trials = 200000;
    int hits = 0, draws = 0;
    Vector target = Vector::Zero(n);
    while (draws < trials) {
      Vector col(n);
      for (int j = 0; j < n; ++j) col(j) = sample_guess_entry(rng, nu);
      if (reject && col.isZero(0.0)) continue;
      ++draws;
      // The planted block: one nonzero at a uniform position with a uniform sign.
      target.setZero();
      target(static_cast<int>(rng.below(n))) = alphabet[rng.below(2)];
      hits += col == target;
    }
    EXPECT_NEAR(static_cast<double>(hits) / trials, p, 4.0 * std::sqrt(p * (1 - p) / trials));
  }
  EXPECT_DOUBLE_EQ(guess_match_probability(4, 1, 0.25, {-0.5, 0.5}, false), 0.0);
  EXPECT_NEAR(guess_match_probability(4, 1, 0.25, {-1.0, 1.0}, false), std::pow(0.75, 3) * 0.125, 1e-15);
}

TEST(Comparison, SingleGuessBothRatesEstimatePlSquared) {
  ComparisonConfig cfg;
  cfg.grid.n = {4};
  cfg.grid.theta = {2};
  cfg.grid.r = {1};
  cfg.grid.s = {1};
  cfg.grid.nu = {DensityRule{false, 0.5}};
  cfg.grid.planted_alphabet = {-1.0, 1.0};
  cfg.trials = 4000;
  cfg.master_seed = 3;
  const auto rows = run_comparison(cfg);
  ASSERT_EQ(rows.size(), 1u);
  const auto& row = rows[0];
  const double target = row.p_l * row.p_l;
  EXPECT_LE(std::abs(row.joint_z), 3.0);
  EXPECT_NEAR(row.baseline.value, target, 4.0 * std::sqrt(target * (1 - target) / cfg.trials));
  EXPECT_NEAR(row.formula_baseline_exact, target, 1e-15);

  std::ostringstream os;
  write_comparison_csv(os, cfg, rows);
  EXPECT_EQ(os.str().rfind("# schema=1 kind=compare", 0), 0u);
}

TEST(Comparison, FormulaColumnsMatchTheoryModule) {
  ComparisonConfig cfg;
  cfg.grid.n = {6};
  cfg.grid.theta = {2};
  cfg.grid.r = {3};
  cfg.grid.s = {1};
  cfg.grid.nu = {DensityRule{false, 0.3}};
  cfg.grid.planted_alphabet = {-1.0, 1.0};
  cfg.trials = 200;
  cfg.master_seed = 9;
  const auto row = run_comparison(cfg).at(0);
  const double per_block = 1.0 - std::pow(1.0 - row.p_l, 3);
  EXPECT_NEAR(row.formula_block_exact, row.p_select * per_block * per_block, 1e-12);
  EXPECT_NEAR(row.formula_block_taylor, row.p_select * std::pow(3.0 * row.p_l, 2), 1e-12);
  EXPECT_NEAR(row.formula_baseline_exact, 1.0 - std::pow(1.0 - row.p_l * row.p_l, 3), 1e-12);
  EXPECT_NEAR(row.formula_baseline_taylor, row.p_l * row.p_l * 3.0, 1e-12);
  EXPECT_LE(row.p_select, 1.0);
  EXPECT_GE(row.p_select, 0.0);
}

TEST(Concentration, DeterministicEnsembleHasZeroTailFrequencies) {
  auto cfg = ConcentrationConfig::from_config(KeyValueConfig::parse_string(
      "suite=mean\ntheta=1\nplanted_alphabet=-1,1\nu=T\ntrials=500\n"));
  const auto rows = run_concentration(cfg);
  int tails = 0;
  for (const auto& r : rows) {
    if (r.quantity.rfind("tail_freq", 0) == 0) {
      ++tails;
      EXPECT_EQ(r.value, 0.0) << r.case_label << ' ' << r.quantity;
    }
  }
  EXPECT_GT(tails, 0);
}

TEST(Concentration, IdentitySuitesPass) {
  auto cfg = ConcentrationConfig::from_config(KeyValueConfig::parse_string("suite=vectorization,blocknorm\n"));
  const auto rows = run_concentration(cfg);
  EXPECT_FALSE(rows.empty());
  EXPECT_EQ(count_failures(rows), 0);
  std::ostringstream os;
  write_concentration_csv(os, cfg, rows);
  EXPECT_EQ(os.str().rfind("# schema=1 kind=concentration", 0), 0u);
  EXPECT_THROW(ConcentrationConfig::from_config(KeyValueConfig::parse_string("suite=bogus\n")).validate(),
               InvalidArgument);
}
