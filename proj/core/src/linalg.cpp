#include "blockrelax/linalg.hpp"

#include <cmath>

namespace blockrelax::linalg {

double spectral_norm(const Matrix& c, double rel_tol, int max_iter) {
  if (c.size() == 0) return 0.0;
  const bool use_rows = c.rows() < c.cols();
  const Matrix gram = use_rows ? Matrix(c * c.transpose()) : Matrix(c.transpose() * c);
  const Eigen::Index dim = gram.rows();

  // Deterministic, non-degenerate start vector.
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = 1.0 + 0.618033988749895 * static_cast<double>(i % 7);
  v.normalize();

  double lambda = v.dot(gram * v);
  for (int it = 0; it < max_iter; ++it) {
    Vector w = gram * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    const double next = v.dot(gram * v);
    if (std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

Matrix pseudo_inverse(const Matrix& a) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = kRankCutoff * (sv.size() > 0 ? sv(0) : 0.0);
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  const double cutoff = kRankCutoff * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

Matrix select_columns(const Matrix& a, const IndexList& cols) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
  return out;
}

Vector least_squares(const Matrix& a, const Vector& b) {
  if (a.cols() == 0) return Vector(0);
  return pseudo_inverse(a) * b;
}

Matrix random_orthonormal(Stream& rng, int rows, int cols) {
  if (rows < cols) throw InvalidArgument("random_orthonormal: rows < cols");
  const Matrix g = gaussian_matrix(rng, rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Sign-normalize against R's diagonal so Q is Haar distributed.
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix gaussian_matrix(Stream& rng, int rows, int cols, double variance) {
  const double sd = std::sqrt(variance);
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = sd * rng.normal();
  return g;
}

}  // namespace blockrelax::linalg
