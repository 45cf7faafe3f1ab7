#include "blockrelax/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace blockrelax {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label, std::uint64_t index) {
  std::uint64_t h = mix64(master_seed + kGolden);
  h = mix64(h ^ hash_label(label));
  h = mix64(h + kGolden * (index + 1));
  return h;
}

Stream Stream::substream(std::string_view label, std::uint64_t index) const {
  return Stream(derive_seed(key_, label, index));
}

std::uint64_t Stream::next() {
  ++counter_;
  return mix64(key_ + kGolden * counter_);
}

double Stream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Stream::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = max() - (max() % bound + 1) % bound;
  for (;;) {
    const std::uint64_t v = next();
    if (v <= limit) return v % bound;
  }
}

double Stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::vector<int> sample_without_replacement(Stream& rng, int n, int k) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace blockrelax
