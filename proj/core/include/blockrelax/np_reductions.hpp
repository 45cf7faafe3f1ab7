#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "blockrelax/container.hpp"
#include "blockrelax/model.hpp"

namespace blockrelax {

/// Exact cover by 3-sets: ground set {1..m}, theta triples (1-based elements).
struct X3CInstance {
  int m = 0;
  std::vector<std::array<int, 3>> triples;
  int n = 2;  ///< block width of the reduced sensing matrix; needs 2 <= n < m - 2

  void validate() const;
};

/// Partition problem over positive numbers a_1..a_m.
struct PartitionInstance {
  std::vector<double> a;

  void validate() const;
};

struct Reduction {
  BlockSensingMatrix A;
  Vector y;
  double target = 0.0;  ///< m/3 for X3C, m for partition
  double last_row_scale = 1.0;  ///< factor applied to the last row (partition only)
};

/// Blocks A^l = [a^l 0; 0 U^l] with a^l the indicator of triple l and U^l a
/// seeded random orthogonal (n-1)x(n-1) matrix; y = (1..1, 0..0).
/// The block norm windows are asserted after construction.
Reduction x3c_to_l0(const X3CInstance& inst, std::uint64_t seed);

/// A = [I I; a^T -a^T] with the last row divided by max(1, sqrt(2)||a||),
/// split into two blocks of width m; y = (1..1, 0).
Reduction partition_to_lp(const PartitionInstance& inst, double p);

/// The five-point alphabet of the discrete partition reduction.
const std::vector<double>& partition_grid();

struct Decision {
  bool yes = false;
  double oracle_value = 0.0;  ///< min l0 or min l_p^p; +inf when infeasible
};

Decision decide_x3c_via_l0(const X3CInstance& inst, std::uint64_t seed = 0);
Decision decide_partition_via_lp(const PartitionInstance& inst, double p);

/// Direct brute force over the 2^theta sub-collections.
bool x3c_brute_force(const X3CInstance& inst);
/// Direct brute force over the 2^m subsets.
bool partition_brute_force(const PartitionInstance& inst);

InstanceContainer reduction_container(const Reduction& red, const std::string& kind, const Decision& verified);

}  // namespace blockrelax
