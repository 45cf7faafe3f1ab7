#pragma once

#include "blockrelax/rng.hpp"
#include "blockrelax/types.hpp"

namespace blockrelax::linalg {

/// Relative cutoff below which singular values count as zero.
inline constexpr double kRankCutoff = 1e-10;

/// Spectral norm by power iteration on CᵀC (or CCᵀ, whichever is smaller).
/// Iterates until the Rayleigh quotient changes by less than `rel_tol`.
double spectral_norm(const Matrix& c, double rel_tol = 1e-12, int max_iter = 20000);

/// Moore-Penrose pseudo-inverse via SVD, zeroing singular values below
/// kRankCutoff * sigma_max.
Matrix pseudo_inverse(const Matrix& a);

/// Numerical rank with the same cutoff as pseudo_inverse.
int numerical_rank(const Matrix& a);

/// Columns of `a` at `cols`, in the given order.
Matrix select_columns(const Matrix& a, const IndexList& cols);

/// Minimum-norm least-squares solution of a x = b.
Vector least_squares(const Matrix& a, const Vector& b);

/// Orthonormal factor Q (rows x cols) of a Gaussian rows x cols draw.
/// Requires rows >= cols.
Matrix random_orthonormal(Stream& rng, int rows, int cols);

/// Dense matrix with i.i.d. N(0, variance) entries, filled column-major.
Matrix gaussian_matrix(Stream& rng, int rows, int cols, double variance = 1.0);

}  // namespace blockrelax::linalg
