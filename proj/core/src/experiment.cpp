#include "blockrelax/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "blockrelax/concentration.hpp"
#include "blockrelax/container.hpp"
#include "blockrelax/linalg.hpp"
#include "blockrelax/parallel.hpp"
#include "blockrelax/selector_oracle.hpp"
#include "blockrelax/theory_bounds.hpp"

namespace blockrelax {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", s);
  return buf;
}

std::vector<int> int_list(const KeyValueConfig& cfg, const std::string& key, const std::vector<int>& fallback) {
  const auto items = cfg.list(key);
  if (items.empty()) return fallback;
  std::vector<int> out;
  for (const auto& item : items) out.push_back(static_cast<int>(parse_int(item)));
  return out;
}

std::vector<double> double_list(const KeyValueConfig& cfg, const std::string& key,
                                const std::vector<double>& fallback) {
  const auto items = cfg.list(key);
  if (items.empty()) return fallback;
  std::vector<double> out;
  for (const auto& item : items) out.push_back(parse_double(item));
  return out;
}

std::string join_doubles(const std::vector<double>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

SolveOptions solver_from_config(const KeyValueConfig& cfg) {
  SolveOptions o;
  o.tol_feas = cfg.get_double("tol_feas", o.tol_feas);
  o.tol_opt = cfg.get_double("tol_opt", o.tol_opt);
  o.max_iter = static_cast<int>(cfg.get_int("max_iter", o.max_iter));
  o.support_threshold = cfg.get_double("support_threshold", o.support_threshold);
  o.polish = cfg.get_bool("polish", o.polish);
  o.rho = cfg.get_double("rho", o.rho);
  o.over_relaxation = cfg.get_double("over_relaxation", o.over_relaxation);
  o.check_every = static_cast<int>(cfg.get_int("check_every", o.check_every));
  return o;
}

/// Shared cell columns: index, seed and the full generator parameterization.
constexpr const char* kCellHeader =
    "cell,cell_seed,m,n,theta,r,s,nu,nu_value,sensing_kind,support_mode,planted_alphabet,"
    "reject_zero_guess_columns,p";

std::string cell_columns(int cell, std::uint64_t seed, const GenConfig& g, const std::string& nu_label,
                         double p) {
  std::ostringstream os;
  os << (cell + 1) << ',' << seed << ',' << g.m << ',' << g.n << ',' << g.theta << ',' << g.r << ',' << g.s << ','
     << nu_label << ',' << format_double(g.guess_density) << ',' << to_string(g.sensing_kind) << ','
     << to_string(g.support_mode) << ',' << join_doubles(g.planted_alphabet, ';') << ','
     << (g.reject_zero_guess_columns ? 1 : 0) << ',' << format_double(p);
  return os.str();
}

std::uint64_t ipow_capped(std::uint64_t base, int exp, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

double standard_error(const Rate& r, int trials) {
  return trials > 0 ? std::sqrt(r.value * (1.0 - r.value) / trials) : 0.0;
}

void write_schema_line(std::ostream& os, const std::string& kind) {
  os << "# schema=" << kCsvSchema << " kind=" << kind << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------

double DensityRule::resolve(int s, int n) const {
  return ratio_s_over_n ? static_cast<double>(s) / static_cast<double>(n) : value;
}

std::string DensityRule::label() const { return ratio_s_over_n ? "s/n" : format_double(value); }

DensityRule DensityRule::parse(const std::string& text) {
  if (text == "s/n") return DensityRule{true, 0.0};
  return DensityRule{false, parse_double(text)};
}

GenConfig gen_config_from(const KeyValueConfig& cfg, const GenConfig& defaults) {
  GenConfig g = defaults;
  g.m = static_cast<int>(cfg.get_int("m", g.m));
  g.n = static_cast<int>(cfg.get_int("n", g.n));
  g.theta = static_cast<int>(cfg.get_int("theta", g.theta));
  g.r = static_cast<int>(cfg.get_int("r", g.r));
  g.s = static_cast<int>(cfg.get_int("s", g.s));
  if (const auto nu = cfg.single("nu")) g.guess_density = DensityRule::parse(*nu).resolve(g.s, g.n);
  if (const auto kind = cfg.single("sensing_kind")) g.sensing_kind = parse_sensing_kind(*kind);
  if (const auto mode = cfg.single("support_mode")) g.support_mode = parse_support_mode(*mode);
  g.planted_alphabet = double_list(cfg, "planted_alphabet", g.planted_alphabet);
  g.continuous_planted = cfg.get_bool("continuous_planted", g.continuous_planted);
  g.reject_zero_guess_columns = cfg.get_bool("reject_zero_guess_columns", g.reject_zero_guess_columns);
  g.master_seed = cfg.get_u64("seed", g.master_seed);
  return g;
}

GridSpec GridSpec::from_config(const KeyValueConfig& cfg, const GridSpec& defaults) {
  GridSpec g = defaults;
  const auto m_items = cfg.list("m");
  if (!m_items.empty()) {
    if (m_items.size() == 1 && m_items.front() == "n") {
      g.m_equals_n = true;
    } else {
      g.m_equals_n = false;
      g.m = int_list(cfg, "m", g.m);
    }
  }
  g.n = int_list(cfg, "n", g.n);
  g.theta = int_list(cfg, "theta", g.theta);
  g.r = int_list(cfg, "r", g.r);
  g.s = int_list(cfg, "s", g.s);
  const auto nu_items = cfg.list("nu");
  if (!nu_items.empty()) {
    g.nu.clear();
    for (const auto& item : nu_items) g.nu.push_back(DensityRule::parse(item));
  }
  const auto sensing = cfg.list("sensing_kind");
  if (!sensing.empty()) {
    g.sensing.clear();
    for (const auto& item : sensing) g.sensing.push_back(parse_sensing_kind(item));
  }
  const auto support = cfg.list("support_mode");
  if (!support.empty()) {
    g.support.clear();
    for (const auto& item : support) g.support.push_back(parse_support_mode(item));
  }
  g.planted_alphabet = double_list(cfg, "planted_alphabet", g.planted_alphabet);
  g.reject_zero_guess_columns = cfg.get_bool("reject_zero_guess_columns", g.reject_zero_guess_columns);
  return g;
}

namespace {

template <typename Fn>
void for_each_cell(const GridSpec& g, Fn&& fn) {
  const std::vector<int> m_axis = g.m_equals_n ? std::vector<int>{0} : g.m;
  for (int n : g.n)
    for (int m : m_axis)
      for (int theta : g.theta)
        for (int r : g.r)
          for (int s : g.s)
            for (const auto& nu : g.nu)
              for (auto sensing : g.sensing)
                for (auto support : g.support) {
                  GenConfig c;
                  c.n = n;
                  c.m = g.m_equals_n ? n : m;
                  c.theta = theta;
                  c.r = r;
                  c.s = s;
                  c.guess_density = nu.resolve(s, n);
                  c.sensing_kind = sensing;
                  c.support_mode = support;
                  c.planted_alphabet = g.planted_alphabet;
                  c.reject_zero_guess_columns = g.reject_zero_guess_columns;
                  fn(c, nu);
                }
}

}  // namespace

std::vector<GenConfig> GridSpec::cells() const {
  std::vector<GenConfig> out;
  for_each_cell(*this, [&](const GenConfig& c, const DensityRule&) { out.push_back(c); });
  return out;
}

std::vector<std::string> GridSpec::density_labels() const {
  std::vector<std::string> out;
  for_each_cell(*this, [&](const GenConfig&, const DensityRule& nu) { out.push_back(nu.label()); });
  return out;
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::uint64_t cell) { return derive_seed(master_seed, "cell", cell); }

std::uint64_t trial_seed(std::uint64_t cell_seed_value, std::uint64_t trial) {
  return derive_seed(cell_seed_value, "trial", trial);
}

Rate wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return Rate{0.0, 0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nt = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / nt;
  const double denom = 1.0 + z * z / nt;
  const double centre = (phat + z * z / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / nt + z * z / (4.0 * nt * nt)) / denom;
  // The interval touches 0 (or 1) exactly at the extremes; avoid rounding residue there.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return Rate{phat, lo, hi};
}

// ---------------------------------------------------------------------------
// sweep

SweepConfig SweepConfig::from_config(const KeyValueConfig& cfg) {
  SweepConfig s;
  s.grid = GridSpec::from_config(cfg, s.grid);
  s.trials = static_cast<int>(cfg.get_int("trials", s.trials));
  s.p = cfg.get_double("p", s.p);
  s.solver = solver_from_config(cfg);
  s.recovery_tol = cfg.get_double("recovery_tol", s.recovery_tol);
  s.master_seed = cfg.get_u64("seed", s.master_seed);
  s.jobs = static_cast<int>(cfg.get_int("jobs", s.jobs));
  s.oracle = cfg.get_bool("oracle", s.oracle);
  s.oracle_max_combos = cfg.get_u64("oracle_max_combos", s.oracle_max_combos);
  s.out = cfg.get_string("out", s.out);
  return s;
}

void SweepConfig::validate() const {
  if (trials < 1) throw InvalidArgument("sweep: trials must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("sweep: p must lie in (0, 1]");
  if (jobs < 1) throw InvalidArgument("sweep: jobs must be >= 1");
  if (!(recovery_tol > 0.0)) throw InvalidArgument("sweep: recovery_tol must be positive");
  solver.validate();
  const auto cells = grid.cells();
  if (cells.empty()) throw InvalidArgument("sweep: empty grid");
  for (const auto& c : cells) c.validate();
}

TrialRecord run_trial(const SweepConfig& cfg, const GenConfig& cell, int cell_index, int trial_index) {
  TrialRecord rec;
  rec.cell = cell_index;
  rec.trial = trial_index;
  rec.seed = trial_seed(cell_seed(cfg.master_seed, static_cast<std::uint64_t>(cell_index)),
                        static_cast<std::uint64_t>(trial_index));
  try {
    GenConfig g = cell;
    g.master_seed = rec.seed;
    const RelaxedInstance inst = build_instance(g);
    const Matrix b = effective_matrix(inst.A, inst.X);
    const Vector w = solver_weights(inst.X, cfg.p);
    const SolveResult res = solve_weighted_bp(b, w, inst.y, cfg.solver);
    rec.status = res.status;
    rec.iterations = res.iterations;
    if (res.status == SolveStatus::Optimal) {
      rec.outcome = recovery_check(inst, res, cfg.recovery_tol);
      const Vector recon = apply_selector(inst.X, Selector(res.z, inst.X.theta(), inst.X.r()));
      rec.reconstruction_error = (recon - inst.x).lpNorm<Eigen::Infinity>();
    }

    const IndexList planted = inst.X.planted_global();
    const CertificateResult cert =
        kkt_certificate(b, w, planted, Vector::Ones(static_cast<Eigen::Index>(planted.size())));
    rec.certified = cert.holds;
    rec.margin = cert.margin;
    rec.soundness_violation = cert.holds && !(res.status == SolveStatus::Optimal &&
                                              rec.outcome == RecoveryOutcome::Exact &&
                                              rec.reconstruction_error <= cfg.recovery_tol);

    if (cfg.oracle && ipow_capped(static_cast<std::uint64_t>(g.r), g.theta, cfg.oracle_max_combos) <=
                          cfg.oracle_max_combos) {
      const OracleResult orc = enumerate_selectors(b, w, inst.y, g.theta, g.r, cfg.solver.tol_feas, 1);
      rec.oracle_run = true;
      rec.oracle_unique = orc.unique();
      if (rec.oracle_unique && res.status == SolveStatus::Optimal) {
        IndexList chosen;
        for (int l = 0; l < g.theta; ++l) chosen.push_back(l * g.r + orc.best_combos.front()[l]);
        rec.oracle_agrees = chosen == res.detected_support;
      }
      rec.oracle_violation = cert.holds && rec.oracle_unique && !rec.oracle_agrees;
    }
  } catch (const std::exception& e) {
    rec.error = true;
    rec.message = e.what();
  }
  return rec;
}

int SweepResult::invariant_failures() const {
  int n = 0;
  for (const auto& c : cells) n += c.n_soundness_violation + c.n_oracle_violation;
  return n;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto cells = cfg.grid.cells();
  const auto labels = cfg.grid.density_labels();
  const auto n_cells = static_cast<std::uint64_t>(cells.size());
  const auto per_cell = static_cast<std::uint64_t>(cfg.trials);

  SweepResult out;
  out.trials.resize(n_cells * per_cell);
  std::vector<double> elapsed(out.trials.size(), 0.0);
  parallel_for(out.trials.size(), cfg.jobs, [&](std::uint64_t i) {
    const auto start = Clock::now();
    const auto c = static_cast<int>(i / per_cell);
    const auto t = static_cast<int>(i % per_cell);
    out.trials[i] = run_trial(cfg, cells[static_cast<std::size_t>(c)], c, t);
    elapsed[i] = seconds_since(start);
  });

  for (std::uint64_t c = 0; c < n_cells; ++c) {
    CellResult cr;
    cr.cell = static_cast<int>(c);
    cr.seed = cell_seed(cfg.master_seed, c);
    cr.params = cells[c];
    cr.nu_label = labels[c];
    cr.trials = cfg.trials;
    for (std::uint64_t t = 0; t < per_cell; ++t) {
      const auto& rec = out.trials[c * per_cell + t];
      cr.wall_time += elapsed[c * per_cell + t];
      if (rec.error || rec.status != SolveStatus::Optimal) ++cr.n_solver_failure;
      if (rec.error) continue;
      if (rec.status == SolveStatus::Optimal) {
        switch (rec.outcome) {
          case RecoveryOutcome::Exact: ++cr.n_exact; break;
          case RecoveryOutcome::SupportMatch: ++cr.n_support_match; break;
          case RecoveryOutcome::Fail: ++cr.n_fail; break;
        }
      }
      cr.n_certified += rec.certified;
      cr.n_oracle_run += rec.oracle_run;
      cr.n_oracle_unique += rec.oracle_unique;
      cr.n_oracle_agree += rec.oracle_agrees;
      cr.n_soundness_violation += rec.soundness_violation;
      cr.n_oracle_violation += rec.oracle_violation;
    }
    cr.exact = wilson_interval(static_cast<std::uint64_t>(cr.n_exact), per_cell);
    cr.certified = wilson_interval(static_cast<std::uint64_t>(cr.n_certified), per_cell);
    out.cells.push_back(std::move(cr));
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const SweepResult& result) {
  write_schema_line(os, "sweep");
  os << kCellHeader
     << ",trials,n_exact,n_support_match,n_fail,n_solver_failure,n_certified,n_oracle_run,n_oracle_unique,"
        "n_oracle_agree,n_soundness_violation,n_oracle_violation,rate_exact,rate_exact_lo,rate_exact_hi,"
        "rate_certified,rate_certified_lo,rate_certified_hi,wall_time\n";
  for (const auto& c : result.cells) {
    os << cell_columns(c.cell, c.seed, c.params, c.nu_label, cfg.p) << ',' << c.trials << ',' << c.n_exact << ','
       << c.n_support_match << ',' << c.n_fail << ',' << c.n_solver_failure << ',' << c.n_certified << ','
       << c.n_oracle_run << ',' << c.n_oracle_unique << ',' << c.n_oracle_agree << ','
       << c.n_soundness_violation << ',' << c.n_oracle_violation << ',' << format_double(c.exact.value) << ','
       << format_double(c.exact.lo) << ',' << format_double(c.exact.hi) << ','
       << format_double(c.certified.value) << ',' << format_double(c.certified.lo) << ','
       << format_double(c.certified.hi) << ',' << format_seconds(c.wall_time) << '\n';
  }
}

Replay replay_trial(const SweepConfig& cfg, int cell_index, int trial_index) {
  cfg.validate();
  const auto cells = cfg.grid.cells();
  if (cell_index < 0 || cell_index >= static_cast<int>(cells.size()))
    throw InvalidArgument("replay: cell out of range");
  if (trial_index < 0 || trial_index >= cfg.trials) throw InvalidArgument("replay: trial out of range");
  Replay r;
  r.record = run_trial(cfg, cells[static_cast<std::size_t>(cell_index)], cell_index, trial_index);
  r.gen = cells[static_cast<std::size_t>(cell_index)];
  r.gen.master_seed = r.record.seed;
  r.instance = build_instance(r.gen);
  return r;
}

void write_trial_csv(std::ostream& os, const SweepConfig& cfg, const Replay& replay) {
  const auto labels = cfg.grid.density_labels();
  const auto& rec = replay.record;
  write_schema_line(os, "trial");
  os << kCellHeader
     << ",trial,trial_seed,error,status,outcome,reconstruction_error,iterations,certified,margin,oracle_run,"
        "oracle_unique,oracle_agrees,soundness_violation,oracle_violation\n";
  os << cell_columns(rec.cell, cell_seed(cfg.master_seed, static_cast<std::uint64_t>(rec.cell)), replay.gen,
                     labels[static_cast<std::size_t>(rec.cell)], cfg.p)
     << ',' << (rec.trial + 1) << ',' << rec.seed << ',' << (rec.error ? 1 : 0) << ',' << to_string(rec.status)
     << ',' << to_string(rec.outcome) << ',' << format_double(rec.reconstruction_error) << ',' << rec.iterations
     << ',' << rec.certified << ',' << format_double(rec.margin) << ',' << rec.oracle_run << ','
     << rec.oracle_unique << ',' << rec.oracle_agrees << ',' << rec.soundness_violation << ','
     << rec.oracle_violation << '\n';
}

// ---------------------------------------------------------------------------
// comparison

ComparisonConfig ComparisonConfig::from_config(const KeyValueConfig& cfg) {
  ComparisonConfig c;
  c.grid.n = {4};
  c.grid.theta = {1};
  c.grid.r = {2};
  c.grid.s = {1};
  c.grid.nu = {DensityRule{false, 0.25}};
  c.grid.planted_alphabet = {-1.0, 1.0};
  c.grid = GridSpec::from_config(cfg, c.grid);
  c.trials = static_cast<int>(cfg.get_int("trials", c.trials));
  c.p = cfg.get_double("p", c.p);
  c.solver = solver_from_config(cfg);
  c.recovery_tol = cfg.get_double("recovery_tol", c.recovery_tol);
  c.master_seed = cfg.get_u64("seed", c.master_seed);
  c.jobs = static_cast<int>(cfg.get_int("jobs", c.jobs));
  c.out = cfg.get_string("out", c.out);
  return c;
}

void ComparisonConfig::validate() const {
  if (trials < 1) throw InvalidArgument("compare: trials must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("compare: p must lie in (0, 1]");
  if (jobs < 1) throw InvalidArgument("compare: jobs must be >= 1");
  solver.validate();
  const auto cells = grid.cells();
  if (cells.empty()) throw InvalidArgument("compare: empty grid");
  for (const auto& c : cells) {
    c.validate();
    if (c.support_mode != SupportMode::Equidistributed)
      throw InvalidArgument("compare: p_l is only computable for equidistributed supports");
  }
}

double guess_match_probability(int n, int s, double nu, const std::vector<double>& alphabet, bool reject_zero) {
  if (alphabet.empty()) throw InvalidArgument("guess_match_probability: empty alphabet");
  if (s < 0 || s > n) throw InvalidArgument("guess_match_probability: need 0 <= s <= n");
  // A ternary entry reproduces a planted value a only when |a| = 1, with probability nu/2.
  double per_entry = 0.0;
  for (double a : alphabet)
    if (std::abs(a) == 1.0) per_entry += 0.5 * nu;
  per_entry /= static_cast<double>(alphabet.size());
  double q = std::pow(1.0 - nu, n - s) * std::pow(per_entry, s);
  if (reject_zero) {
    const double nonzero = 1.0 - std::pow(1.0 - nu, n);
    if (nonzero <= 0.0) return 0.0;
    // The all-zero column never matches a planted block with s >= 1.
    q = s == 0 ? 0.0 : q / nonzero;
  }
  return q;
}

namespace {

struct ComparisonTrial {
  bool block = false;
  bool baseline = false;
  bool planted_certified = false;
  bool planted_exact = false;
};

ComparisonTrial run_comparison_trial(const ComparisonConfig& cfg, GenConfig g, std::uint64_t seed) {
  ComparisonTrial out;
  g.master_seed = seed;
  const Stream root(seed);

  // Unplanted: same samplers as build_instance, but every guess column is random.
  Stream ss = root.substream("support");
  const SupportPattern support = sample_support(g, ss);
  Stream xs = root.substream("x");
  const Vector x = sample_planted_x(support, g, xs).x;
  Stream as = root.substream("A");
  const BlockSensingMatrix a = sample_sensing_matrix(g, as);
  Stream gs = root.substream("unplanted");
  std::vector<Matrix> blocks;
  for (int l = 0; l < g.theta; ++l) {
    Matrix b(g.n, g.r);
    for (int c = 0; c < g.r; ++c) {
      do {
        for (int j = 0; j < g.n; ++j) b(j, c) = sample_guess_entry(gs, g.guess_density);
      } while (g.reject_zero_guess_columns && b.col(c).isZero(0.0));
    }
    blocks.push_back(std::move(b));
  }

  auto matches = [&](int l, int c) {
    return blocks[static_cast<std::size_t>(l)].col(c) == x.segment(static_cast<Eigen::Index>(l) * g.n, g.n);
  };
  for (int c = 0; c < g.r && !out.baseline; ++c) {
    bool all = true;
    for (int l = 0; l < g.theta && all; ++l) all = matches(l, c);
    out.baseline = all;
  }

  const GuessEnsemble ens(blocks, IndexList(static_cast<std::size_t>(g.theta), 0));
  const Vector y = a.apply(x);
  const Matrix bmat = effective_matrix(a, ens);
  const Vector w = solver_weights(ens, cfg.p);
  const SolveResult res = solve_weighted_bp(bmat, w, y, cfg.solver);
  if (res.status == SolveStatus::Optimal && static_cast<int>(res.detected_support.size()) == g.theta) {
    bool ok = true;
    for (int l = 0; l < g.theta && ok; ++l) {
      const int k = res.detected_support[static_cast<std::size_t>(l)];
      ok = k / g.r == l && matches(l, k % g.r) && std::abs(res.z(k) - 1.0) <= cfg.recovery_tol;
    }
    const Vector recon = apply_selector(ens, Selector(res.z, g.theta, g.r));
    out.block = ok && (recon - x).lpNorm<Eigen::Infinity>() <= cfg.recovery_tol;
  }

  // Planted: measures p_select.
  GenConfig pg = g;
  pg.master_seed = derive_seed(seed, "planted");
  const RelaxedInstance inst = build_instance(pg);
  const Matrix pb = effective_matrix(inst.A, inst.X);
  const Vector pw = solver_weights(inst.X, cfg.p);
  const IndexList planted = inst.X.planted_global();
  out.planted_certified =
      kkt_certificate(pb, pw, planted, Vector::Ones(static_cast<Eigen::Index>(planted.size()))).holds;
  const SolveResult pres = solve_weighted_bp(pb, pw, inst.y, cfg.solver);
  out.planted_exact =
      pres.status == SolveStatus::Optimal && recovery_check(inst, pres, cfg.recovery_tol) == RecoveryOutcome::Exact;
  return out;
}

}  // namespace

std::vector<ComparisonRow> run_comparison(const ComparisonConfig& cfg) {
  cfg.validate();
  const auto cells = cfg.grid.cells();
  const auto labels = cfg.grid.density_labels();
  const auto per_cell = static_cast<std::uint64_t>(cfg.trials);
  std::vector<ComparisonTrial> trials(cells.size() * per_cell);
  std::vector<double> elapsed(trials.size(), 0.0);
  parallel_for(trials.size(), cfg.jobs, [&](std::uint64_t i) {
    const auto start = Clock::now();
    const std::uint64_t c = i / per_cell;
    trials[i] = run_comparison_trial(cfg, cells[c], trial_seed(cell_seed(cfg.master_seed, c), i % per_cell));
    elapsed[i] = seconds_since(start);
  });

  std::vector<ComparisonRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    ComparisonRow row;
    row.cell = static_cast<int>(c);
    row.seed = cell_seed(cfg.master_seed, c);
    row.params = cells[c];
    row.nu_label = labels[c];
    row.trials = cfg.trials;
    for (std::uint64_t t = 0; t < per_cell; ++t) {
      const auto& tr = trials[c * per_cell + t];
      row.n_block_success += tr.block;
      row.n_baseline_success += tr.baseline;
      row.n_planted_certified += tr.planted_certified;
      row.n_planted_exact += tr.planted_exact;
      row.wall_time += elapsed[c * per_cell + t];
    }
    const GenConfig& g = row.params;
    row.p_l = guess_match_probability(g.n, g.s, g.guess_density, g.planted_alphabet, g.reject_zero_guess_columns);
    row.block = wilson_interval(static_cast<std::uint64_t>(row.n_block_success), per_cell);
    row.baseline = wilson_interval(static_cast<std::uint64_t>(row.n_baseline_success), per_cell);
    const double se = std::hypot(standard_error(row.block, cfg.trials), standard_error(row.baseline, cfg.trials));
    row.joint_z = se > 0.0 ? (row.block.value - row.baseline.value) / se : 0.0;
    row.p_select = static_cast<double>(row.n_planted_certified) / cfg.trials;
    row.p_select_recovery = static_cast<double>(row.n_planted_exact) / cfg.trials;
    const auto formula = success_prob_block_relaxation(row.p_l, g.r, g.theta, row.p_select);
    row.formula_block_exact = formula.exact;
    row.formula_block_taylor = formula.approximate;
    const double p_full = std::pow(row.p_l, g.theta);
    row.formula_baseline_exact = success_prob_r_trials(p_full, g.r);
    row.formula_baseline_taylor = p_full * g.r;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_comparison_csv(std::ostream& os, const ComparisonConfig& cfg, const std::vector<ComparisonRow>& rows) {
  write_schema_line(os, "compare");
  os << "# baseline formulas assume p = p_l^theta for a full-vector guess\n";
  os << kCellHeader
     << ",trials,p_l,p_full_assumed,rate_block,rate_block_lo,rate_block_hi,rate_baseline,rate_baseline_lo,"
        "rate_baseline_hi,joint_z,p_select,p_select_recovery,formula_block_exact,formula_block_taylor,"
        "formula_baseline_exact,formula_baseline_taylor,ratio_formula,ratio_empirical,wall_time\n";
  for (const auto& r : rows) {
    const double ratio_formula =
        r.formula_baseline_exact > 0.0 ? r.formula_block_exact / r.formula_baseline_exact : 0.0;
    const double ratio_empirical = r.baseline.value > 0.0 ? r.block.value / r.baseline.value : 0.0;
    os << cell_columns(r.cell, r.seed, r.params, r.nu_label, cfg.p) << ',' << r.trials << ','
       << format_double(r.p_l) << ',' << format_double(std::pow(r.p_l, r.params.theta)) << ','
       << format_double(r.block.value) << ',' << format_double(r.block.lo) << ',' << format_double(r.block.hi)
       << ',' << format_double(r.baseline.value) << ',' << format_double(r.baseline.lo) << ','
       << format_double(r.baseline.hi) << ',' << format_double(r.joint_z) << ',' << format_double(r.p_select)
       << ',' << format_double(r.p_select_recovery) << ',' << format_double(r.formula_block_exact) << ','
       << format_double(r.formula_block_taylor) << ',' << format_double(r.formula_baseline_exact) << ','
       << format_double(r.formula_baseline_taylor) << ',' << format_double(ratio_formula) << ','
       << format_double(ratio_empirical) << ',' << format_seconds(r.wall_time) << '\n';
  }
}

// ---------------------------------------------------------------------------
// concentration

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Ok: return "ok";
    case CheckStatus::Flag: return "flag";
    case CheckStatus::Fail: return "fail";
  }
  return "?";
}

ConcentrationConfig ConcentrationConfig::from_config(const KeyValueConfig& cfg) {
  ConcentrationConfig c;
  c.gen.m = 16;
  c.gen.n = 16;
  c.gen.theta = 2;
  c.gen.r = 4;
  c.gen.s = 4;
  c.gen.guess_density = 0.25;
  const auto suites = cfg.list("suite");
  if (!suites.empty() && !(suites.size() == 1 && suites.front() == "all")) c.suites = suites;
  c.gen = gen_config_from(cfg, c.gen);
  c.trials = cfg.get_u64("trials", c.trials);
  c.shapes = static_cast<int>(cfg.get_int("shapes", c.shapes));
  c.epsilons = double_list(cfg, "epsilon", c.epsilons);
  c.deltas = double_list(cfg, "delta", c.deltas);
  if (const auto dirs = cfg.list("u"); !dirs.empty()) c.directions = dirs;
  c.c = cfg.get_double("c", c.c);
  c.K = cfg.get_double("K", c.K);
  c.p = cfg.get_double("p", c.p);
  c.master_seed = cfg.get_u64("seed", c.master_seed);
  c.jobs = static_cast<int>(cfg.get_int("jobs", c.jobs));
  c.out = cfg.get_string("out", c.out);
  return c;
}

void ConcentrationConfig::validate() const {
  static const std::vector<std::string> known{"vectorization", "blocknorm", "sqnorm", "mean", "window", "inner"};
  for (const auto& s : suites)
    if (std::find(known.begin(), known.end(), s) == known.end())
      throw InvalidArgument("concentration: unknown suite '" + s + "'");
  for (const auto& d : directions)
    if (d != "T" && d != "generic") throw InvalidArgument("concentration: u must be T or generic");
  if (trials < 1) throw InvalidArgument("concentration: trials must be >= 1");
  if (shapes < 1) throw InvalidArgument("concentration: shapes must be >= 1");
  if (jobs < 1) throw InvalidArgument("concentration: jobs must be >= 1");
  if (!(c > 0.0) || !(K > 0.0)) throw InvalidArgument("concentration: c and K must be positive");
  gen.validate();
}

namespace {

CheckStatus sigma_status(double z) {
  const double a = std::abs(z);
  if (a > 4.0) return CheckStatus::Fail;
  if (a > 3.0) return CheckStatus::Flag;
  return CheckStatus::Ok;
}

int random_dim(Stream& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

void vectorization_suite(const ConcentrationConfig& cfg, std::vector<ConcentrationRow>& rows) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, "vectorization");
  const Stream root(seed);
  double worst = 0.0;
  for (int i = 0; i < cfg.shapes; ++i) {
    Stream rng = root.substream("shape", static_cast<std::uint64_t>(i));
    const int a = random_dim(rng, 1, 8);
    const int b = random_dim(rng, 1, 8);
    const int c = random_dim(rng, 1, 8);
    const Matrix m = linalg::gaussian_matrix(rng, a, b, 1.0);
    const Matrix r = linalg::gaussian_matrix(rng, b, c, 1.0);
    const Vector w = linalg::gaussian_matrix(rng, c, 1, 1.0).col(0);
    const auto chk = vectorization_check(m, r, w);
    worst = std::max(worst, chk.max_deviation / chk.scale);
  }
  rows.push_back({"vectorization", "shapes=" + std::to_string(cfg.shapes), seed, "max_relative_deviation", worst,
                  1e-12, 0.0, worst <= 1e-12 ? CheckStatus::Ok : CheckStatus::Fail});
}

void blocknorm_suite(const ConcentrationConfig& cfg, std::vector<ConcentrationRow>& rows) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, "blocknorm");
  const Stream root(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.shapes; ++i) {
    Stream rng = root.substream("set", static_cast<std::uint64_t>(i));
    const int rows_count = random_dim(rng, 1, 10);
    const int blocks = random_dim(rng, 1, 5);
    std::vector<Matrix> set;
    for (int l = 0; l < blocks; ++l) set.push_back(linalg::gaussian_matrix(rng, rows_count, random_dim(rng, 1, 6), 1.0));
    worst = std::min(worst, block_norm_bound_check(set).slack);
  }
  rows.push_back({"blocknorm", "sets=" + std::to_string(cfg.shapes), seed, "min_slack", worst, -1e-9, 0.0,
                  worst >= -1e-9 ? CheckStatus::Ok : CheckStatus::Fail});
}

void sqnorm_suite(const ConcentrationConfig& cfg, std::vector<ConcentrationRow>& rows) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, "sqnorm");
  Stream rng(seed);
  const Matrix m = linalg::gaussian_matrix(rng, cfg.gen.m, cfg.gen.n, 1.0 / cfg.gen.m);
  const Vector w = linalg::gaussian_matrix(rng, cfg.gen.r, 1, 1.0).col(0);
  const std::vector<std::pair<std::string, EntryDistribution>> laws{
      {"rademacher", {EntryLaw::Rademacher, 1.0}},
      {"gaussian", {EntryLaw::Gaussian, 1.0}},
      {"ternary", {EntryLaw::Ternary, cfg.gen.guess_density}}};
  const std::uint64_t trials = std::max<std::uint64_t>(cfg.trials, 1000);
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const auto chk = expected_sq_norm_check(m, w, laws[i].second, trials, derive_seed(seed, "law", i));
    rows.push_back({"sqnorm", laws[i].first, seed, "mean_sq_norm", chk.empirical_mean, chk.analytic, chk.z_score,
                    sigma_status(chk.z_score)});
  }
}

EnsembleTemplate concentration_template(const ConcentrationConfig& cfg, std::uint64_t seed) {
  GenConfig g = cfg.gen;
  g.master_seed = seed;
  return EnsembleTemplate::from_instance(build_instance(g), g);
}

void mean_suite(const ConcentrationConfig& cfg, std::vector<ConcentrationRow>& rows) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, "mean");
  const EnsembleTemplate tpl = concentration_template(cfg, seed);
  const int big_r = tpl.r * tpl.A.theta();

  Vector u_t = Vector::Zero(big_r);
  for (int l = 0; l < tpl.A.theta(); ++l) u_t(l * tpl.r + tpl.planted_columns[static_cast<std::size_t>(l)]) = 1.0;
  Stream ur(derive_seed(seed, "u"));
  Vector u_generic(big_r);
  for (int k = 0; k < big_r; ++k) u_generic(k) = ur.normal();

  std::vector<std::pair<std::string, Vector>> cases;
  for (const auto& d : cfg.directions) cases.emplace_back(d == "T" ? "u_on_T" : "u_generic", d == "T" ? u_t : u_generic);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto run = empirical_concentration_tail(tpl, cases[i].second, cfg.epsilons, cfg.trials,
                                                  derive_seed(seed, cases[i].first), cfg.c, cfg.K, cfg.jobs);
    rows.push_back({"mean", cases[i].first, seed, "mean_sq_norm", run.sample_mean, run.expected, run.z_score,
                    sigma_status(run.z_score)});
    for (const auto& tail : run.tails) {
      rows.push_back({"mean", cases[i].first, seed, "tail_frequency@" + format_double(tail.epsilon),
                      tail.frequency, tail.paper_bound, 0.0,
                      tail.bound_falsified ? CheckStatus::Flag : CheckStatus::Ok});
    }
  }
}

void window_suite(const ConcentrationConfig& cfg, std::vector<ConcentrationRow>& rows) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, "window");
  const EnsembleTemplate tpl = concentration_template(cfg, seed);
  const auto checks = singular_window_check(tpl, cfg.deltas, cfg.trials, derive_seed(seed, "run"), cfg.c, cfg.K,
                                            cfg.jobs);
  for (const auto& w : checks) {
    const double se = std::sqrt(std::max(w.frequency * (1.0 - w.frequency), 1e-300) / static_cast<double>(w.trials));
    const bool below = w.frequency < w.paper_floor - 3.0 * se;
    rows.push_back({"window", "delta=" + format_double(w.delta), seed, "inside_frequency", w.frequency,
                    w.paper_floor, 0.0, below ? CheckStatus::Flag : CheckStatus::Ok});
  }
}

void inner_suite(const ConcentrationConfig& cfg, std::vector<ConcentrationRow>& rows) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, "inner");
  Stream rng(seed);
  const int d = cfg.gen.n;
  Vector v(d);
  for (int j = 0; j < d; ++j) v(j) = rng.normal() / std::sqrt(static_cast<double>(d));
  const EntryDistribution law{EntryLaw::Ternary, cfg.gen.guess_density};
  const auto tail =
      inner_product_tail_check(law, v, cfg.p, std::max<std::uint64_t>(cfg.trials, 1000), derive_seed(seed, "run"));
  rows.push_back({"inner", "d=" + std::to_string(d), seed, "tail_frequency", tail.frequency, tail.hoeffding_bound,
                  0.0, tail.exceeds_bound ? CheckStatus::Flag : CheckStatus::Ok});
}

}  // namespace

std::vector<ConcentrationRow> run_concentration(const ConcentrationConfig& cfg) {
  cfg.validate();
  std::vector<ConcentrationRow> rows;
  for (const auto& suite : cfg.suites) {
    if (suite == "vectorization") vectorization_suite(cfg, rows);
    else if (suite == "blocknorm") blocknorm_suite(cfg, rows);
    else if (suite == "sqnorm") sqnorm_suite(cfg, rows);
    else if (suite == "mean") mean_suite(cfg, rows);
    else if (suite == "window") window_suite(cfg, rows);
    else if (suite == "inner") inner_suite(cfg, rows);
  }
  return rows;
}

void write_concentration_csv(std::ostream& os, const ConcentrationConfig& cfg,
                             const std::vector<ConcentrationRow>& rows) {
  write_schema_line(os, "concentration");
  const GenConfig& g = cfg.gen;
  os << "suite,case,seed,m,n,theta,r,s,nu,sensing_kind,planted_alphabet,trials,c,K,quantity,value,reference,"
        "z_score,status\n";
  for (const auto& r : rows) {
    os << r.suite << ',' << r.case_label << ',' << r.seed << ',' << g.m << ',' << g.n << ',' << g.theta << ','
       << g.r << ',' << g.s << ',' << format_double(g.guess_density) << ',' << to_string(g.sensing_kind) << ','
       << join_doubles(g.planted_alphabet, ';') << ',' << cfg.trials << ',' << format_double(cfg.c) << ','
       << format_double(cfg.K) << ',' << r.quantity << ',' << format_double(r.value) << ','
       << format_double(r.reference) << ',' << format_double(r.z_score) << ',' << to_string(r.status) << '\n';
  }
}

int count_failures(const std::vector<ConcentrationRow>& rows) {
  return static_cast<int>(
      std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.status == CheckStatus::Fail; }));
}

}  // namespace blockrelax
