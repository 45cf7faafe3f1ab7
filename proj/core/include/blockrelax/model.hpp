#pragma once

#include <cstdint>
#include <vector>

#include "blockrelax/types.hpp"

namespace blockrelax {

/// Sensing matrix A = (A^1 ... A^theta) stored as theta dense m x n blocks.
class BlockSensingMatrix {
 public:
  BlockSensingMatrix() = default;
  explicit BlockSensingMatrix(std::vector<Matrix> blocks);

  [[nodiscard]] int theta() const { return static_cast<int>(blocks_.size()); }
  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] int n() const { return n_; }
  /// Total column count N = n * theta.
  [[nodiscard]] int cols() const { return n_ * theta(); }

  [[nodiscard]] const Matrix& block(int l) const { return blocks_.at(static_cast<std::size_t>(l)); }
  [[nodiscard]] const std::vector<Matrix>& blocks() const { return blocks_; }

  /// The concatenated m x N matrix.
  [[nodiscard]] Matrix full() const;
  /// A * x for x in R^N, computed blockwise.
  [[nodiscard]] Vector apply(const Vector& x) const;

  friend bool operator==(const BlockSensingMatrix&, const BlockSensingMatrix&);

 private:
  std::vector<Matrix> blocks_;
  int m_ = 0;
  int n_ = 0;
};

/// Support S of the planted vector together with its per-block slices S^l.
class SupportPattern {
 public:
  SupportPattern() = default;
  /// `global` holds zero-based indices into {0..n*theta-1}; duplicates rejected.
  SupportPattern(IndexList global, int n, int theta);

  [[nodiscard]] const IndexList& global() const { return global_; }
  /// Local (within-block, zero-based) indices of S^l.
  [[nodiscard]] const IndexList& block(int l) const { return per_block_.at(static_cast<std::size_t>(l)); }
  [[nodiscard]] int block_size(int l) const { return static_cast<int>(block(l).size()); }
  [[nodiscard]] int size() const { return static_cast<int>(global_.size()); }
  [[nodiscard]] int theta() const { return static_cast<int>(per_block_.size()); }
  [[nodiscard]] int n() const { return n_; }
  /// Maximal block sparsity s-bar = max_l |S^l|.
  [[nodiscard]] int s_bar() const { return s_bar_; }
  [[nodiscard]] bool contains(int global_index) const;

  friend bool operator==(const SupportPattern&, const SupportPattern&) = default;

 private:
  IndexList global_;
  std::vector<IndexList> per_block_;
  int n_ = 0;
  int s_bar_ = 0;
};

/// Block-diagonal guess matrix X = diag(X^1, ..., X^theta) with X^l in
/// [-1,1]^{n x r}. Column planted_columns[l] of X^l holds the planted block x^l.
class GuessEnsemble {
 public:
  GuessEnsemble() = default;
  GuessEnsemble(std::vector<Matrix> blocks, IndexList planted_columns);

  [[nodiscard]] int theta() const { return static_cast<int>(blocks_.size()); }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int r() const { return r_; }
  /// Total number of guess columns R = r * theta.
  [[nodiscard]] int total_columns() const { return r_ * theta(); }

  [[nodiscard]] const Matrix& block(int l) const { return blocks_.at(static_cast<std::size_t>(l)); }
  [[nodiscard]] const std::vector<Matrix>& blocks() const { return blocks_; }
  /// k^l per block, zero-based within the block.
  [[nodiscard]] const IndexList& planted_columns() const { return planted_; }
  /// T as zero-based global column indices l*r + k^l.
  [[nodiscard]] IndexList planted_global() const;
  /// Column k (global, zero-based) restricted to its block's rows.
  [[nodiscard]] Vector column(int k) const;

  friend bool operator==(const GuessEnsemble&, const GuessEnsemble&);

 private:
  std::vector<Matrix> blocks_;
  IndexList planted_;
  int n_ = 0;
  int r_ = 0;
};

/// Selector z in R^{r*theta}, viewed as theta sub-vectors z^l in R^r.
class Selector {
 public:
  Selector() = default;
  Selector(Vector z, int theta, int r);

  /// The discrete selector with z^l = e_{k^l}.
  static Selector discrete(const IndexList& choice, int r);

  [[nodiscard]] const Vector& values() const { return z_; }
  [[nodiscard]] int theta() const { return theta_; }
  [[nodiscard]] int r() const { return r_; }
  [[nodiscard]] Vector block(int l) const { return z_.segment(static_cast<Eigen::Index>(l) * r_, r_); }
  /// True if every z^l is a standard basis vector.
  [[nodiscard]] bool is_discrete() const;

 private:
  Vector z_;
  int theta_ = 0;
  int r_ = 0;
};

/// Moments of the planted and guess entry laws.
struct DistParams {
  double p_x = 0.0;  ///< E[x_j^2] on the support
  double p_X = 0.0;  ///< E[X_jk^2] off the planted columns
  double nu = 0.0;   ///< E[|X_jk|] off the planted columns
};

/// One planted experiment. Construction validates every cross-field invariant.
struct RelaxedInstance {
  BlockSensingMatrix A;
  GuessEnsemble X;
  Vector x;
  SupportPattern support;
  Vector y;
  DistParams dist;
  std::uint64_t master_seed = 0;

  /// Throws InvalidArgument if an invariant is violated.
  void validate() const;
};

/// Sum of |v_i|^p for 0 < p <= 1 (the p-th power of the l_p quasi-norm).
double lp_norm(const Eigen::Ref<const Vector>& v, double p);

/// AX = (A^1 X^1 ... A^theta X^theta), an m x R matrix.
Matrix effective_matrix(const BlockSensingMatrix& a, const GuessEnsemble& x);

/// Weights w_k = ||X_{.,k}||_p^p of the weighted l1 objective.
/// Throws if a nonzero column receives a numerically zero weight.
Vector solver_weights(const GuessEnsemble& x, double p);

/// The reconstruction Xz, block l equal to X^l z^l.
Vector apply_selector(const GuessEnsemble& x, const Selector& z);

}  // namespace blockrelax
