#pragma once

#include <cstdint>
#include <limits>
#include <vector>
#include <string_view>

namespace blockrelax {

/// Counter-based random stream. The output for draw i is a bijective mix of
/// (key + i * golden), so a stream is fully described by its key and position.
/// Sub-streams are derived by hashing (key, label, index) and never share
/// mutable state, which makes parallel Monte Carlo reproducible regardless of
/// scheduling.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) : key_(key) {}

  /// Derives an independent child stream for `label` and `index`.
  [[nodiscard]] Stream substream(std::string_view label, std::uint64_t index = 0) const;

  [[nodiscard]] std::uint64_t key() const { return key_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound). Unbiased (rejection on the top range).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// +1 or -1 with equal probability.
  double rademacher() { return (next() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer: a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

/// Stable 64-bit hash of a label (FNV-1a followed by mix64).
std::uint64_t hash_label(std::string_view label);

/// hash(master_seed, label, index), the derivation used for all sub-streams.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label, std::uint64_t index = 0);

/// Fisher-Yates partial shuffle: returns `k` distinct values from [0, n), sorted.
std::vector<int> sample_without_replacement(Stream& rng, int n, int k);

}  // namespace blockrelax
