#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "blockrelax/model.hpp"
#include "blockrelax/rng.hpp"

namespace blockrelax {

enum class SensingKind { OrthonormalBlocks, RepeatedUnitary, Gaussian };
enum class SupportMode { Equidistributed, Uniform };

std::string_view to_string(SensingKind kind);
std::string_view to_string(SupportMode mode);
SensingKind parse_sensing_kind(std::string_view text);
SupportMode parse_support_mode(std::string_view text);

/// Parameters of the planted-instance generator.
///
/// Non-planted guess entries follow the ternary law: 0 with probability
/// 1 - guess_density, otherwise +1 or -1 with equal probability. This gives
/// E[X] = 0 and E|X| = E[X^2] = guess_density while staying inside [-1, 1].
struct GenConfig {
  int m = 16;
  int n = 16;
  int theta = 2;
  int r = 4;
  int s = 4;  ///< per-block sparsity target; |S| = s * theta
  SensingKind sensing_kind = SensingKind::OrthonormalBlocks;
  std::vector<double> planted_alphabet{-1.0, -0.5, 0.5, 1.0};
  double guess_density = 0.25;
  SupportMode support_mode = SupportMode::Equidistributed;
  std::uint64_t master_seed = 0;
  /// Draw planted entries uniformly from [-1, 1] instead of the alphabet.
  /// Such planted blocks are never reproduced by a random guess; intended
  /// for concentration experiments only.
  bool continuous_planted = false;
  /// Redraw non-planted guess columns that come out all zero.
  bool reject_zero_guess_columns = true;

  /// Throws InvalidArgument on hard violations; returns soft warnings.
  std::vector<std::string> validate() const;
};

/// Planted vector together with the exact second moment of its entry law.
struct PlantedVector {
  Vector x;
  double p_x = 0.0;
};

/// Exact E[a^2] for a uniform draw from the planted law of `cfg`.
double planted_second_moment(const GenConfig& cfg);

/// One entry of the ternary guess law with P(nonzero) = density.
double sample_guess_entry(Stream& rng, double density);

SupportPattern sample_support(const GenConfig& cfg, Stream& rng);
PlantedVector sample_planted_x(const SupportPattern& support, const GenConfig& cfg, Stream& rng);
GuessEnsemble sample_guess_ensemble(const Vector& x, const SupportPattern& support, const GenConfig& cfg,
                                    Stream& rng);
BlockSensingMatrix sample_sensing_matrix(const GenConfig& cfg, Stream& rng);

/// Composes the samplers on independent sub-streams ("support", "x", "X",
/// "A") of cfg.master_seed and sets y = Ax. Pure function of cfg.
RelaxedInstance build_instance(const GenConfig& cfg);

}  // namespace blockrelax
