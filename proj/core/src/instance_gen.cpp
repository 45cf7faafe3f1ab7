#include "blockrelax/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blockrelax/linalg.hpp"

namespace blockrelax {

std::string_view to_string(SensingKind kind) {
  switch (kind) {
    case SensingKind::OrthonormalBlocks: return "orthonormal-blocks";
    case SensingKind::RepeatedUnitary: return "repeated-unitary";
    case SensingKind::Gaussian: return "gaussian";
  }
  return "?";
}

std::string_view to_string(SupportMode mode) {
  return mode == SupportMode::Equidistributed ? "equidistributed" : "uniform";
}

SensingKind parse_sensing_kind(std::string_view text) {
  if (text == "orthonormal-blocks") return SensingKind::OrthonormalBlocks;
  if (text == "repeated-unitary") return SensingKind::RepeatedUnitary;
  if (text == "gaussian") return SensingKind::Gaussian;
  throw InvalidArgument("unknown sensing_kind '" + std::string(text) + "'");
}

SupportMode parse_support_mode(std::string_view text) {
  if (text == "equidistributed") return SupportMode::Equidistributed;
  if (text == "uniform") return SupportMode::Uniform;
  throw InvalidArgument("unknown support_mode '" + std::string(text) + "'");
}

std::vector<std::string> GenConfig::validate() const {
  if (m < 1 || n < 1 || theta < 1 || r < 1) throw InvalidArgument("GenConfig: m, n, theta, r must be positive");
  if (s < 0 || s > n) throw InvalidArgument("GenConfig: need 0 <= s <= n");
  if (!(guess_density > 0.0) || guess_density > 1.0) throw InvalidArgument("GenConfig: guess_density must lie in (0, 1]");
  if (sensing_kind != SensingKind::Gaussian && m < n)
    throw InvalidArgument("GenConfig: orthonormal sensing blocks require m >= n");
  if (!continuous_planted) {
    if (planted_alphabet.empty()) throw InvalidArgument("GenConfig: empty planted alphabet");
    for (double a : planted_alphabet) {
      if (a == 0.0 || std::abs(a) > 1.0) throw InvalidArgument("GenConfig: alphabet must lie in [-1,1] \\ {0}");
      if (std::find(planted_alphabet.begin(), planted_alphabet.end(), -a) == planted_alphabet.end())
        throw InvalidArgument("GenConfig: alphabet must be symmetric about 0");
    }
  }
  std::vector<std::string> warnings;
  if (guess_density * n < 1.0) {
    std::ostringstream os;
    os << "guess_density * n = " << guess_density * n << " < 1; most guess columns will be empty";
    warnings.push_back(os.str());
  }
  return warnings;
}

double planted_second_moment(const GenConfig& cfg) {
  if (cfg.continuous_planted) return 1.0 / 3.0;
  if (cfg.planted_alphabet.empty()) throw InvalidArgument("planted alphabet is empty");
  double s = 0.0;
  for (double a : cfg.planted_alphabet) s += a * a;
  return s / static_cast<double>(cfg.planted_alphabet.size());
}

SupportPattern sample_support(const GenConfig& cfg, Stream& rng) {
  if (cfg.s > cfg.n) throw InvalidArgument("sample_support: s > n");
  IndexList global;
  global.reserve(static_cast<std::size_t>(cfg.s) * cfg.theta);
  if (cfg.support_mode == SupportMode::Equidistributed) {
    for (int l = 0; l < cfg.theta; ++l) {
      for (int j : sample_without_replacement(rng, cfg.n, cfg.s)) global.push_back(l * cfg.n + j);
    }
  } else {
    global = sample_without_replacement(rng, cfg.n * cfg.theta, cfg.s * cfg.theta);
  }
  return SupportPattern(std::move(global), cfg.n, cfg.theta);
}

PlantedVector sample_planted_x(const SupportPattern& support, const GenConfig& cfg, Stream& rng) {
  if (!cfg.continuous_planted && cfg.planted_alphabet.empty())
    throw InvalidArgument("sample_planted_x: empty alphabet");
  PlantedVector out;
  out.x = Vector::Zero(static_cast<Eigen::Index>(support.n()) * support.theta());
  const auto alpha_size = static_cast<std::uint64_t>(cfg.planted_alphabet.size());
  for (int j : support.global()) {
    if (cfg.continuous_planted) {
      double v = 0.0;
      while (v == 0.0) v = 2.0 * rng.uniform() - 1.0;
      out.x(j) = v;
    } else {
      out.x(j) = cfg.planted_alphabet[rng.below(alpha_size)];
    }
  }
  out.p_x = planted_second_moment(cfg);
  return out;
}

double sample_guess_entry(Stream& rng, double density) {
  if (rng.uniform() >= density) return 0.0;
  return rng.rademacher();
}

GuessEnsemble sample_guess_ensemble(const Vector& x, const SupportPattern& support, const GenConfig& cfg,
                                    Stream& rng) {
  const int n = support.n();
  const int theta = support.theta();
  if (x.size() != static_cast<Eigen::Index>(n) * theta)
    throw InvalidArgument("sample_guess_ensemble: x inconsistent with support");
  std::vector<Matrix> blocks;
  IndexList planted;
  blocks.reserve(static_cast<std::size_t>(theta));
  for (int l = 0; l < theta; ++l) {
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.r)));
    Matrix b(n, cfg.r);
    for (int c = 0; c < cfg.r; ++c) {
      if (c == k) {
        b.col(c) = x.segment(static_cast<Eigen::Index>(l) * n, n);
        continue;
      }
      do {
        for (int j = 0; j < n; ++j) b(j, c) = sample_guess_entry(rng, cfg.guess_density);
      } while (cfg.reject_zero_guess_columns && b.col(c).isZero(0.0));
    }
    blocks.push_back(std::move(b));
    planted.push_back(k);
  }
  return GuessEnsemble(std::move(blocks), std::move(planted));
}

BlockSensingMatrix sample_sensing_matrix(const GenConfig& cfg, Stream& rng) {
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(cfg.theta));
  switch (cfg.sensing_kind) {
    case SensingKind::OrthonormalBlocks:
      if (cfg.m < cfg.n) throw InvalidArgument("sample_sensing_matrix: m < n");
      for (int l = 0; l < cfg.theta; ++l) blocks.push_back(linalg::random_orthonormal(rng, cfg.m, cfg.n));
      break;
    case SensingKind::RepeatedUnitary: {
      if (cfg.m < cfg.n) throw InvalidArgument("sample_sensing_matrix: m < n");
      const Matrix u = linalg::random_orthonormal(rng, cfg.m, cfg.n);
      blocks.assign(static_cast<std::size_t>(cfg.theta), u);
      break;
    }
    case SensingKind::Gaussian:
      for (int l = 0; l < cfg.theta; ++l)
        blocks.push_back(linalg::gaussian_matrix(rng, cfg.m, cfg.n, 1.0 / cfg.m));
      break;
  }
  return BlockSensingMatrix(std::move(blocks));
}

RelaxedInstance build_instance(const GenConfig& cfg) {
  cfg.validate();
  const Stream root(cfg.master_seed);

  // In uniform mode a block may receive no support; its planted column would
  // then be zero. Redraw on the next support sub-stream until every block is hit.
  SupportPattern support;
  for (std::uint64_t attempt = 0;; ++attempt) {
    Stream s = root.substream("support", attempt);
    support = sample_support(cfg, s);
    bool all_hit = true;
    for (int l = 0; l < cfg.theta && cfg.s > 0; ++l) all_hit = all_hit && support.block_size(l) > 0;
    if (cfg.support_mode == SupportMode::Equidistributed || all_hit || attempt >= 1000) break;
  }

  Stream xs = root.substream("x");
  PlantedVector planted = sample_planted_x(support, cfg, xs);
  Stream gs = root.substream("X");
  GuessEnsemble guesses = sample_guess_ensemble(planted.x, support, cfg, gs);
  Stream as = root.substream("A");
  BlockSensingMatrix a = sample_sensing_matrix(cfg, as);

  RelaxedInstance inst;
  inst.y = a.apply(planted.x);
  inst.A = std::move(a);
  inst.X = std::move(guesses);
  inst.x = std::move(planted.x);
  inst.support = std::move(support);
  inst.dist = DistParams{planted.p_x, cfg.guess_density, cfg.guess_density};
  inst.master_seed = cfg.master_seed;
  return inst;
}

}  // namespace blockrelax
