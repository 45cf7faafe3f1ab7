#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "blockrelax/config.hpp"
#include "blockrelax/container.hpp"
#include "blockrelax/experiment.hpp"
#include "blockrelax/np_reductions.hpp"
#include "blockrelax/selector_oracle.hpp"
#include "blockrelax/types.hpp"
#include "blockrelax/wl1_solver.hpp"

namespace br = blockrelax;

namespace {

// Exit codes: 0 clean, 1 invariant-class failure, 2 bad input or usage.
constexpr int kInvariantFailure = 1;
constexpr int kInputError = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  std::optional<int> trials;
};

int default_jobs() {
  if (const char* env = std::getenv("BLOCKRELAX_JOBS")) {
    try {
      const auto v = br::parse_int(env);
      if (v >= 1) return static_cast<int>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid BLOCKRELAX_JOBS='" << env << "'\n";
  }
  return 1;
}

void add_common(CLI::App* app, Common& c, bool with_trials) {
  app->add_option("--config", c.config, "key=value configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--out", c.out, "output path (default: stdout)");
  app->add_option("--jobs", c.jobs, "worker threads (default: $BLOCKRELAX_JOBS or 1)")->check(CLI::PositiveNumber);
  if (with_trials) app->add_option("--trials", c.trials, "trials per cell")->check(CLI::PositiveNumber);
}

br::KeyValueConfig load_config(const Common& c) {
  br::KeyValueConfig cfg = c.config.empty() ? br::KeyValueConfig{} : br::KeyValueConfig::load(c.config);
  if (c.seed) cfg.set("seed", std::to_string(*c.seed));
  if (c.trials) cfg.set("trials", std::to_string(*c.trials));
  cfg.set("jobs", std::to_string(c.jobs));
  return cfg;
}

/// Runs `write` against --out or stdout.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path);
  if (!os) throw br::FormatError("cannot write '" + path + "'");
  write(os);
  if (!os) throw br::FormatError("write failed for '" + path + "'");
}

std::string format_combo(const br::IndexList& combo) {
  std::string s;
  for (std::size_t i = 0; i < combo.size(); ++i) s += (i ? "," : "") + std::to_string(combo[i] + 1);
  return s;
}

int cmd_gen(const Common& c) {
  const auto cfg = load_config(c);
  const br::GenConfig g = br::gen_config_from(cfg, br::GenConfig{});
  for (const auto& w : g.validate()) std::cerr << "warning: " << w << '\n';
  const auto inst = br::build_instance(g);
  emit(c.out, [&](std::ostream& os) { br::to_container(inst, g).write(os); });
  return 0;
}

int cmd_solve(const Common& c, const std::string& path, double p) {
  const auto [inst, g] = br::instance_from_container(br::InstanceContainer::load(path));
  const br::Matrix b = br::effective_matrix(inst.A, inst.X);
  const br::Vector w = br::solver_weights(inst.X, p);
  const auto res = br::solve_weighted_bp(b, w, inst.y);
  const auto planted = inst.X.planted_global();
  const auto cert = br::kkt_certificate(b, w, planted, br::Vector::Ones(static_cast<Eigen::Index>(planted.size())));
  const auto outcome = res.status == br::SolveStatus::Optimal ? br::recovery_check(inst, res, 1e-6)
                                                               : br::RecoveryOutcome::Fail;
  const bool violation = cert.holds && outcome != br::RecoveryOutcome::Exact;
  emit(c.out, [&](std::ostream& os) {
    os << "status: " << br::to_string(res.status) << '\n'
       << "objective: " << br::format_double(res.objective) << '\n'
       << "feas_residual: " << br::format_double(res.feas_residual) << '\n'
       << "duality_gap: " << br::format_double(res.duality_gap) << '\n'
       << "iterations: " << res.iterations << '\n'
       << "detected_support: " << br::format_index_list(res.detected_support) << '\n'
       << "planted_T: " << br::format_index_list(planted) << '\n'
       << "recovery: " << br::to_string(outcome) << '\n'
       << "certificate: " << (cert.holds ? "holds" : "fails") << '\n'
       << "certificate_margin: " << br::format_double(cert.margin) << '\n'
       << "z: " << br::format_double_list(std::vector<double>(res.z.data(), res.z.data() + res.z.size())) << '\n';
  });
  return violation ? kInvariantFailure : 0;
}

int cmd_oracle(const Common& c, const std::string& path, double p) {
  const auto [inst, g] = br::instance_from_container(br::InstanceContainer::load(path));
  const auto res = br::enumerate_selectors(inst, p, 1e-8, c.jobs);
  emit(c.out, [&](std::ostream& os) {
    os << "evaluated: " << res.evaluated_count << '\n'
       << "feasible: " << res.feasible_count << '\n'
       << "best_objective: " << br::format_double(res.best_objective) << '\n'
       << "unique: " << (res.unique() ? "yes" : "no") << '\n';
    for (const auto& combo : res.best_combos) os << "best_combo: " << format_combo(combo) << '\n';
  });
  return 0;
}

int cmd_sweep(const Common& c) {
  const auto cfg = br::SweepConfig::from_config(load_config(c));
  const auto result = br::run_sweep(cfg);
  for (const auto& t : result.trials)
    if (t.error) std::cerr << "cell " << t.cell + 1 << " trial " << t.trial + 1 << ": " << t.message << '\n';
  emit(c.out.empty() ? cfg.out : c.out, [&](std::ostream& os) { br::write_sweep_csv(os, cfg, result); });
  const int failures = result.invariant_failures();
  if (failures > 0) std::cerr << "invariant failures: " << failures << '\n';
  return failures > 0 ? kInvariantFailure : 0;
}

int cmd_replay(const Common& c, const std::string& spec) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos) throw br::InvalidArgument("--replay expects CELL,TRIAL");
  const int cell = static_cast<int>(br::parse_int(spec.substr(0, comma)));
  const int trial = static_cast<int>(br::parse_int(spec.substr(comma + 1)));
  const auto cfg = br::SweepConfig::from_config(load_config(c));
  const auto r = br::replay_trial(cfg, cell - 1, trial - 1);
  br::write_trial_csv(std::cout, cfg, r);
  if (!c.out.empty()) br::to_container(r.instance, r.gen).save(c.out);
  if (r.record.error) std::cerr << "trial error: " << r.record.message << '\n';
  return r.record.soundness_violation || r.record.oracle_violation ? kInvariantFailure : 0;
}

int cmd_compare(const Common& c) {
  const auto cfg = br::ComparisonConfig::from_config(load_config(c));
  const auto rows = br::run_comparison(cfg);
  emit(c.out.empty() ? cfg.out : c.out, [&](std::ostream& os) { br::write_comparison_csv(os, cfg, rows); });
  return 0;
}

int cmd_concentration(const Common& c) {
  const auto cfg = br::ConcentrationConfig::from_config(load_config(c));
  const auto rows = br::run_concentration(cfg);
  emit(c.out.empty() ? cfg.out : c.out, [&](std::ostream& os) { br::write_concentration_csv(os, cfg, rows); });
  const int failures = br::count_failures(rows);
  if (failures > 0) std::cerr << "hard failures: " << failures << '\n';
  return failures > 0 ? kInvariantFailure : 0;
}

int cmd_reduce_x3c(const Common& c, const std::string& path) {
  const auto file = br::KeyValueConfig::load(path);
  br::X3CInstance inst;
  inst.m = static_cast<int>(file.get_int("m", 0));
  inst.n = static_cast<int>(file.get_int("n", 2));
  for (const auto& t : file.values("triple")) {
    const auto idx = br::parse_index_list(t);
    if (idx.size() != 3) throw br::FormatError("triple must list 3 elements: '" + t + "'");
    inst.triples.push_back({idx[0] + 1, idx[1] + 1, idx[2] + 1});
  }
  const std::uint64_t seed = c.seed.value_or(file.get_u64("seed", 0));
  const auto decision = br::decide_x3c_via_l0(inst, seed);
  const auto red = br::x3c_to_l0(inst, seed);
  emit(c.out, [&](std::ostream& os) { br::reduction_container(red, "x3c", decision).write(os); });
  return 0;
}

int cmd_reduce_partition(const Common& c, const std::string& path, std::optional<double> p_flag) {
  const auto file = br::KeyValueConfig::load(path);
  br::PartitionInstance inst;
  for (const auto& v : file.list("a")) inst.a.push_back(br::parse_double(v));
  const double p = p_flag.value_or(file.get_double("p", 0.5));
  const auto decision = br::decide_partition_via_lp(inst, p);
  const auto red = br::partition_to_lp(inst, p);
  emit(c.out, [&](std::ostream& os) { br::reduction_container(red, "partition", decision).write(os); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blockrelax: block-relaxed guess selection for sparse recovery"};
  app.require_subcommand(1);

  Common common;
  common.jobs = default_jobs();
  std::string instance_path;
  std::string replay_spec;
  double p = 0.5;
  std::optional<double> p_opt;

  auto* gen = app.add_subcommand("gen", "generate one planted instance container");
  add_common(gen, common, false);

  auto* solve = app.add_subcommand("solve", "solve an instance and report recovery and certificate");
  add_common(solve, common, false);
  solve->add_option("instance", instance_path, "instance container")->required()->check(CLI::ExistingFile);
  solve->add_option("--p", p, "l_p exponent of the weights")->check(CLI::Range(0.0, 1.0));

  auto* oracle = app.add_subcommand("oracle", "enumerate all discrete selectors of an instance");
  add_common(oracle, common, false);
  oracle->add_option("instance", instance_path, "instance container")->required()->check(CLI::ExistingFile);
  oracle->add_option("--p", p, "l_p exponent of the weights")->check(CLI::Range(0.0, 1.0));

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over a parameter grid (CSV)");
  add_common(sweep, common, true);

  auto* compare = app.add_subcommand("compare", "r-trials baseline against block relaxation (CSV)");
  add_common(compare, common, true);

  auto* conc = app.add_subcommand("concentration", "concentration and identity checks (CSV)");
  add_common(conc, common, true);

  auto* x3c = app.add_subcommand("reduce-x3c", "X3C instance file to an l0 recovery container");
  add_common(x3c, common, false);
  x3c->add_option("instance", instance_path, "file with m=, n=, triple=a,b,c lines")->required()->check(
      CLI::ExistingFile);

  auto* part = app.add_subcommand("reduce-partition", "partition instance file to an l_p recovery container");
  add_common(part, common, false);
  part->add_option("instance", instance_path, "file with a=a1,a2,... and optional p=")->required()->check(
      CLI::ExistingFile);
  part->add_option("--p", p_opt, "l_p exponent in (0, 1)");

  auto* replay = app.add_subcommand("replay", "rerun one (cell, trial) of a sweep");
  add_common(replay, common, true);
  replay->add_option("--replay", replay_spec, "CELL,TRIAL (1-based, as in the sweep CSV)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kInputError;
  }

  try {
    if (*gen) return cmd_gen(common);
    if (*solve) return cmd_solve(common, instance_path, p);
    if (*oracle) return cmd_oracle(common, instance_path, p);
    if (*sweep) return cmd_sweep(common);
    if (*compare) return cmd_compare(common);
    if (*conc) return cmd_concentration(common);
    if (*x3c) return cmd_reduce_x3c(common, instance_path);
    if (*part) return cmd_reduce_partition(common, instance_path, p_opt);
    if (*replay) return cmd_replay(common, replay_spec);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::logic_error& e) {
    // An asserted construction window or other internal invariant broke.
    std::cerr << "invariant failure: " << e.what() << '\n';
    return kInvariantFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
