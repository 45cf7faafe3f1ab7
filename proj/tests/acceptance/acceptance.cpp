// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "blockrelax/concentration.hpp"
#include "blockrelax/experiment.hpp"
#include "blockrelax/instance_gen.hpp"
#include "blockrelax/np_reductions.hpp"
#include "blockrelax/selector_oracle.hpp"
#include "blockrelax/theory_bounds.hpp"
#include "blockrelax/wl1_solver.hpp"
#include "oracles.hpp"

using namespace blockrelax;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// The soundness corpus: m = n in {16, 32}, theta in {2, 4}, s in {4, 8},
// r in {2, 4, 8}, nu = s/n, 21 seeded instances per cell (504 in total).
struct CorpusCase {
  GenConfig cfg;
};

std::vector<CorpusCase> soundness_corpus() {
  std::vector<CorpusCase> out;
  std::uint64_t idx = 0;
  for (int n : {16, 32})
    for (int theta : {2, 4})
      for (int s : {4, 8})
        for (int r : {2, 4, 8})
          for (int t = 0; t < 21; ++t) {
            GenConfig g;
            g.m = g.n = n;
            g.theta = theta;
            g.s = s;
            g.r = r;
            g.guess_density = static_cast<double>(s) / n;
            g.master_seed = derive_seed(2024, "acceptance-corpus", idx++);
            out.push_back({g});
          }
  return out;
}

struct CorpusOutcome {
  int instances = 0;
  int certified = 0;
  int soundness_violations = 0;
  int oracle_checked = 0;
  int oracle_unique = 0;
  int oracle_violations = 0;
  double seconds = 0.0;
};

CorpusOutcome run_corpus() {
  CorpusOutcome o;
  const auto t0 = Clock::now();
  for (const auto& c : soundness_corpus()) {
    const auto inst = build_instance(c.cfg);
    ++o.instances;
    const Matrix b = effective_matrix(inst.A, inst.X);
    const Vector w = solver_weights(inst.X, 0.5);
    const IndexList t = inst.X.planted_global();
    const auto cert = kkt_certificate(b, w, t, Vector::Ones(static_cast<Eigen::Index>(t.size())));
    if (!cert.holds) continue;
    ++o.certified;
    const auto res = solve_weighted_bp(b, w, inst.y);
    const Vector target = Selector::discrete(inst.X.planted_columns(), inst.X.r()).values();
    const bool ok = res.status == SolveStatus::Optimal && (res.z - target).cwiseAbs().maxCoeff() <= 1e-6 &&
                    (apply_selector(inst.X, Selector(res.z, inst.X.theta(), inst.X.r())) - inst.x)
                            .cwiseAbs()
                            .maxCoeff() <= 1e-6;
    if (!ok) ++o.soundness_violations;

    if (std::pow(static_cast<double>(c.cfg.r), c.cfg.theta) <= 4096.0) {
      ++o.oracle_checked;
      const auto ora = enumerate_selectors(inst, 0.5, 1e-8);
      if (ora.unique()) {
        ++o.oracle_unique;
        IndexList combo_global;
        for (int l = 0; l < inst.X.theta(); ++l) combo_global.push_back(l * inst.X.r() + ora.best_combos[0][l]);
        if (combo_global != res.detected_support) ++o.oracle_violations;
      }
    }
  }
  o.seconds = seconds_since(t0);
  return o;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict criterion_1(const CorpusOutcome& o) {
  const bool pass = o.instances >= 500 && o.certified > 0 && o.soundness_violations == 0 && o.seconds <= 300.0;
  return {pass, fmt("%d instances, %d certified, %d violations, %.1f s", o.instances, o.certified,
                    o.soundness_violations, o.seconds)};
}

Verdict criterion_2(const CorpusOutcome& o) {
  return {o.oracle_checked > 0 && o.oracle_violations == 0,
          fmt("%d certified instances enumerated, %d unique optima, %d disagreements", o.oracle_checked,
              o.oracle_unique, o.oracle_violations)};
}

Verdict criterion_3() {
  Stream rng(3);
  int mismatches = 0, solved = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const int cols = std::min(12, m + 1 + static_cast<int>(rng.below(7)));
    Matrix b(m, cols);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < cols; ++j) b(i, j) = rng.normal();
    Vector w(cols);
    for (int j = 0; j < cols; ++j) w(j) = 0.1 + rng.uniform();
    Vector z0 = Vector::Zero(cols);
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(m, 3))));
    for (int i = 0; i < k; ++i) z0(static_cast<int>(rng.below(static_cast<std::uint64_t>(cols)))) = rng.normal();
    const Vector y = b * z0;
    const auto ref = oracle::lp_vertex_min(b, w, y, 1e-9 * (1.0 + y.norm()));
    const auto res = solve_weighted_bp(b, w, y);
    if (!ref || res.status != SolveStatus::Optimal) {
      ++mismatches;
      continue;
    }
    ++solved;
    const double rel = std::abs(res.objective - ref->objective) / std::max(1.0, ref->objective);
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++mismatches;
  }
  return {mismatches == 0, fmt("%d/100 programs matched, worst relative gap %.2e", solved - mismatches, worst)};
}

Verdict criterion_4() {
  int flags = 0, fails = 0;
  double worst = 0.0;
  std::uint64_t seed = 40;
  for (int theta : {1, 4}) {
    GenConfig g;
    g.m = g.n = 16;
    g.theta = theta;
    g.s = 4;
    g.r = 4;
    g.guess_density = 0.25;
    g.master_seed = seed++;
    const auto tpl = EnsembleTemplate::from_instance(build_instance(g), g);
    const auto R = static_cast<Eigen::Index>(theta) * g.r;
    Vector on_t = Vector::Zero(R);
    for (int l = 0; l < theta; ++l) on_t(l * g.r + tpl.planted_columns[l]) = 1.0;
    Stream rng(seed++);
    Vector generic(R);
    for (Eigen::Index i = 0; i < R; ++i) generic(i) = rng.normal();
    for (const Vector& u : {on_t, generic}) {
      const auto run = empirical_concentration_tail(tpl, u, {}, 10000, seed++, 1.0, 1.0,
                                                    static_cast<int>(std::thread::hardware_concurrency()));
      const double z = std::abs(run.z_score);
      worst = std::max(worst, z);
      if (z > 4.0) ++fails;
      else if (z > 3.0) ++flags;
    }
  }
  return {fails == 0, fmt("4 ensembles, max |z| = %.2f, %d flagged above 3 sigma, %d above 4 sigma", worst, flags,
                          fails)};
}

Verdict criterion_5() {
  Stream rng(5);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int a = 1 + static_cast<int>(rng.below(8)), b = 1 + static_cast<int>(rng.below(8)),
              c = 1 + static_cast<int>(rng.below(8));
    Matrix m(a, b), r(b, c);
    Vector w(c);
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < b; ++j) m(i, j) = rng.normal();
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < c; ++j) r(i, j) = rng.normal();
    for (int i = 0; i < c; ++i) w(i) = rng.normal();
    const auto chk = vectorization_check(m, r, w);
    worst = std::max(worst, chk.max_deviation / chk.scale);
  }
  return {worst <= 1e-12, fmt("100 shapes, max deviation/scale = %.2e", worst)};
}

Verdict criterion_6() {
  Stream rng(6);
  double min_slack = 1e300;
  for (int t = 0; t < 100; ++t) {
    const int rows = 1 + static_cast<int>(rng.below(10));
    const int theta = 1 + static_cast<int>(rng.below(6));
    std::vector<Matrix> blocks;
    for (int l = 0; l < theta; ++l) {
      Matrix c(rows, 1 + static_cast<int>(rng.below(5)));
      for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = rng.normal();
      blocks.push_back(c);
    }
    min_slack = std::min(min_slack, block_norm_bound_check(blocks).slack);
  }
  return {min_slack >= -1e-9, fmt("100 block sets, min slack = %.3e", min_slack)};
}

Verdict criterion_7() {
  double last_gap = 1.0;
  bool agree = true;
  for (int k = 4; k <= 12; ++k) {
    const double p = std::pow(10.0, -k), q = std::pow(10.0, -k / 2.0);
    const double v = limit_ratio(p, q);
    agree = agree && std::abs(v - static_cast<double>(oracle::limit_ratio_ld(p, q))) <= 1e-12;
    last_gap = std::abs(v - 1.0);
  }
  double last_fail = 1.0;
  for (int k = 1; k <= 6; ++k) last_fail = repeat_failure(std::pow(10.0, -k), std::pow(10.0, -2 * k));
  return {agree && last_gap <= 1e-3 && last_fail <= 1e-6,
          fmt("|ratio-1| = %.2e at k=12, (1-p)^(1/q) = %.2e at k=6, long-double agreement %s", last_gap, last_fail,
              agree ? "yes" : "no")};
}

Verdict criterion_8() {
  const auto t0 = Clock::now();
  const std::vector<std::array<int, 3>> pool{{1, 2, 3}, {4, 5, 6}, {1, 4, 5}, {2, 3, 6},
                                             {1, 2, 4}, {3, 5, 6}, {2, 4, 6}, {1, 3, 5}};
  int x3c_count = 0, x3c_bad = 0, x3c_yes = 0;
  for (unsigned mask = 1; mask < (1u << pool.size()); ++mask) {
    if (__builtin_popcount(mask) > 4) continue;
    X3CInstance inst{6, {}, 2};
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (1u << i)) inst.triples.push_back(pool[i]);
    const bool expected = oracle::exact_cover_exists(6, inst.triples);
    const bool got = decide_x3c_via_l0(inst, mask).yes;
    ++x3c_count;
    x3c_yes += expected;
    if (got != expected) ++x3c_bad;
  }
  int part_count = 0, part_bad = 0, part_yes = 0;
  for (int m = 1; m <= 4; ++m) {
    int total = 1;
    for (int i = 0; i < m; ++i) total *= 4;
    for (int code = 0; code < total; ++code) {
      std::vector<int> ints;
      PartitionInstance inst;
      for (int i = 0, c = code; i < m; ++i, c /= 4) {
        ints.push_back(1 + c % 4);
        inst.a.push_back(ints.back());
      }
      const bool expected = oracle::equal_sum_partition_exists(ints);
      ++part_count;
      part_yes += expected;
      if (decide_partition_via_lp(inst, 0.5).yes != expected) ++part_bad;
    }
  }
  const double secs = seconds_since(t0);
  return {x3c_bad == 0 && part_bad == 0 && secs <= 600.0,
          fmt("X3C %d instances (%d yes), %d disagreements; partition %d instances (%d yes), %d disagreements; %.1f s",
              x3c_count, x3c_yes, x3c_bad, part_count, part_yes, part_bad, secs)};
}

Verdict criterion_9() {
  ComparisonConfig cfg;
  cfg.grid.n = {8};
  cfg.grid.theta = {1};
  cfg.grid.r = {2};
  cfg.grid.s = {1};
  cfg.grid.nu = {DensityRule{false, 0.125}};
  cfg.grid.planted_alphabet = {-1.0, 1.0};
  cfg.trials = 4000;
  cfg.master_seed = 1;
  cfg.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto row = run_comparison(cfg).at(0);

  double worst = 0.0;
  for (double p : {0.0, 1e-6, 0.013, 0.2, 0.5, 0.99})
    for (int r : {1, 2, 3, 8, 64})
      worst = std::max(worst, std::abs(success_prob_block_relaxation(p, r, 1, 1.0).exact - success_prob_r_trials(p, r)));
  return {std::abs(row.joint_z) <= 3.0 && worst <= 1e-12,
          fmt("block %.4f vs baseline %.4f (p_l = %.4f), joint z = %.2f; formula identity max error %.1e",
              row.block.value, row.baseline.value, row.p_l, row.joint_z, worst)};
}

SweepConfig corpus_sweep(int jobs) {
  SweepConfig cfg;
  cfg.grid.n = {16, 32};
  cfg.grid.theta = {2, 4};
  cfg.grid.s = {4, 8};
  cfg.grid.r = {2, 4, 8};
  cfg.grid.nu = {DensityRule{true, 0.0}};
  cfg.trials = 21;
  cfg.master_seed = 2024;
  cfg.jobs = jobs;
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

Verdict criterion_10() {
  std::ostringstream a, b;
  const auto one = corpus_sweep(1);
  const auto eight = corpus_sweep(8);
  const auto ra = run_sweep(one);
  write_sweep_csv(a, one, ra);
  write_sweep_csv(b, eight, run_sweep(eight));
  const bool same = strip_last_column(a.str()) == strip_last_column(b.str());
  return {same && ra.invariant_failures() == 0,
          fmt("%zu cells x 21 trials, CSV %s modulo wall_time, %d invariant failures", ra.cells.size(),
              same ? "identical" : "DIFFERENT", ra.invariant_failures())};
}

Verdict criterion_11() {
  SweepConfig cfg;
  cfg.grid.n = {64};
  cfg.grid.theta = {4};
  cfg.grid.r = {8};
  cfg.grid.s = {4, 8, 16};
  cfg.grid.nu = {DensityRule{true, 0.0}};
  cfg.trials = 300;
  cfg.master_seed = 11;
  cfg.oracle = false;
  cfg.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto res = run_sweep(cfg);
  std::vector<double> rate;
  for (const auto& c : res.cells) rate.push_back(static_cast<double>(c.n_certified) / c.trials);
  int inversions = 0, significant = 0;
  for (std::size_t i = 1; i < rate.size(); ++i) {
    if (rate[i] >= rate[i - 1]) continue;
    ++inversions;
    const double se = std::sqrt(rate[i] * (1 - rate[i]) / 300.0 + rate[i - 1] * (1 - rate[i - 1]) / 300.0);
    if (rate[i - 1] - rate[i] > 3.0 * se) ++significant;
  }
  return {inversions <= 1 && significant == 0,
          fmt("certificate rate at s=4,8,16: %.3f, %.3f, %.3f; %d inversions, %d beyond 3 sigma", rate[0], rate[1],
              rate[2], inversions, significant)};
}

}  // namespace

int main() {
  const auto corpus = run_corpus();
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 certificate soundness", [&] { return criterion_1(corpus); }},
      {"2 oracle equivalence", [&] { return criterion_2(corpus); }},
      {"3 convex solver optimality", criterion_3},
      {"4 concentration mean", criterion_4},
      {"5 vectorization identity", criterion_5},
      {"6 block norm bound", criterion_6},
      {"7 limit lemmas", criterion_7},
      {"8 np reductions", criterion_8},
      {"9 comparison consistency", criterion_9},
      {"10 determinism", criterion_10},
      {"11 sparsity trend", criterion_11},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
