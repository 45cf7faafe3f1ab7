#include "blockrelax/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blockrelax {

BlockSensingMatrix::BlockSensingMatrix(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidArgument("BlockSensingMatrix: need at least one block");
  m_ = static_cast<int>(blocks_.front().rows());
  n_ = static_cast<int>(blocks_.front().cols());
  for (const auto& b : blocks_) {
    if (b.rows() != m_ || b.cols() != n_)
      throw InvalidArgument("BlockSensingMatrix: blocks must share identical (m, n)");
  }
}

Matrix BlockSensingMatrix::full() const {
  Matrix a(m_, cols());
  for (int l = 0; l < theta(); ++l) a.middleCols(static_cast<Eigen::Index>(l) * n_, n_) = blocks_[l];
  return a;
}

Vector BlockSensingMatrix::apply(const Vector& x) const {
  if (x.size() != cols()) throw InvalidArgument("BlockSensingMatrix::apply: length mismatch");
  Vector y = Vector::Zero(m_);
  for (int l = 0; l < theta(); ++l) y += blocks_[l] * x.segment(static_cast<Eigen::Index>(l) * n_, n_);
  return y;
}

bool operator==(const BlockSensingMatrix& a, const BlockSensingMatrix& b) {
  if (a.theta() != b.theta() || a.m() != b.m() || a.n() != b.n()) return false;
  for (int l = 0; l < a.theta(); ++l)
    if (a.blocks_[l] != b.blocks_[l]) return false;
  return true;
}

SupportPattern::SupportPattern(IndexList global, int n, int theta)
    : global_(std::move(global)), per_block_(static_cast<std::size_t>(theta)), n_(n) {
  if (n < 1 || theta < 1) throw InvalidArgument("SupportPattern: n and theta must be positive");
  std::sort(global_.begin(), global_.end());
  if (std::adjacent_find(global_.begin(), global_.end()) != global_.end())
    throw InvalidArgument("SupportPattern: duplicate index");
  for (int j : global_) {
    if (j < 0 || j >= n * theta) throw InvalidArgument("SupportPattern: index out of range");
    per_block_[static_cast<std::size_t>(j / n)].push_back(j % n);
  }
  for (const auto& b : per_block_) s_bar_ = std::max(s_bar_, static_cast<int>(b.size()));
}

bool SupportPattern::contains(int global_index) const {
  return std::binary_search(global_.begin(), global_.end(), global_index);
}

GuessEnsemble::GuessEnsemble(std::vector<Matrix> blocks, IndexList planted_columns)
    : blocks_(std::move(blocks)), planted_(std::move(planted_columns)) {
  if (blocks_.empty()) throw InvalidArgument("GuessEnsemble: need at least one block");
  n_ = static_cast<int>(blocks_.front().rows());
  r_ = static_cast<int>(blocks_.front().cols());
  if (r_ < 1) throw InvalidArgument("GuessEnsemble: r must be positive");
  if (planted_.size() != blocks_.size())
    throw InvalidArgument("GuessEnsemble: one planted column per block required");
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    const auto& b = blocks_[l];
    if (b.rows() != n_ || b.cols() != r_) throw InvalidArgument("GuessEnsemble: blocks must share (n, r)");
    if (planted_[l] < 0 || planted_[l] >= r_) throw InvalidArgument("GuessEnsemble: planted column out of range");
    if (b.size() > 0 && b.cwiseAbs().maxCoeff() > 1.0)
      throw InvalidArgument("GuessEnsemble: entries must lie in [-1, 1]");
  }
}

IndexList GuessEnsemble::planted_global() const {
  IndexList t(planted_.size());
  for (std::size_t l = 0; l < planted_.size(); ++l) t[l] = static_cast<int>(l) * r_ + planted_[l];
  return t;
}

Vector GuessEnsemble::column(int k) const {
  if (k < 0 || k >= total_columns()) throw InvalidArgument("GuessEnsemble::column: index out of range");
  return blocks_[static_cast<std::size_t>(k / r_)].col(k % r_);
}

bool operator==(const GuessEnsemble& a, const GuessEnsemble& b) {
  if (a.planted_ != b.planted_ || a.blocks_.size() != b.blocks_.size()) return false;
  for (std::size_t l = 0; l < a.blocks_.size(); ++l)
    if (a.blocks_[l].rows() != b.blocks_[l].rows() || a.blocks_[l].cols() != b.blocks_[l].cols() ||
        a.blocks_[l] != b.blocks_[l])
      return false;
  return true;
}

Selector::Selector(Vector z, int theta, int r) : z_(std::move(z)), theta_(theta), r_(r) {
  if (theta < 1 || r < 1 || z_.size() != static_cast<Eigen::Index>(theta) * r)
    throw InvalidArgument("Selector: length must equal r * theta");
}

Selector Selector::discrete(const IndexList& choice, int r) {
  const int theta = static_cast<int>(choice.size());
  Vector z = Vector::Zero(static_cast<Eigen::Index>(theta) * r);
  for (int l = 0; l < theta; ++l) {
    if (choice[l] < 0 || choice[l] >= r) throw InvalidArgument("Selector::discrete: choice out of range");
    z(l * r + choice[l]) = 1.0;
  }
  return Selector(std::move(z), theta, r);
}

bool Selector::is_discrete() const {
  for (int l = 0; l < theta_; ++l) {
    int ones = 0;
    for (int k = 0; k < r_; ++k) {
      const double v = z_(l * r_ + k);
      if (v == 1.0) ++ones;
      else if (v != 0.0) return false;
    }
    if (ones != 1) return false;
  }
  return true;
}

void RelaxedInstance::validate() const {
  const int theta = A.theta();
  if (X.theta() != theta || support.theta() != theta) throw InvalidArgument("instance: theta mismatch");
  if (X.n() != A.n() || support.n() != A.n()) throw InvalidArgument("instance: block width mismatch");
  if (x.size() != A.cols()) throw InvalidArgument("instance: x has wrong length");
  if (y.size() != A.m()) throw InvalidArgument("instance: y has wrong length");
  if (x.size() > 0 && x.cwiseAbs().maxCoeff() > 1.0) throw InvalidArgument("instance: x outside [-1, 1]");
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) != 0.0 && !support.contains(static_cast<int>(j)))
      throw InvalidArgument("instance: x nonzero off the support");
  }
  const int n = A.n();
  for (int l = 0; l < theta; ++l) {
    if (X.block(l).col(X.planted_columns()[l]) != x.segment(static_cast<Eigen::Index>(l) * n, n))
      throw InvalidArgument("instance: planted column differs from x^l");
  }
  const double res = (A.apply(x) - y).norm();
  if (res > 1e-10 * (1.0 + y.norm())) {
    std::ostringstream os;
    os << "instance: ||Ax - y|| = " << res << " exceeds tolerance";
    throw InvalidArgument(os.str());
  }
}

double lp_norm(const Eigen::Ref<const Vector>& v, double p) {
  if (!(p > 0.0) || p > 1.0) throw InvalidArgument("lp_norm: p must lie in (0, 1]");
  double s = 0.0;
  if (p == 1.0) return v.cwiseAbs().sum();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a != 0.0) s += std::pow(a, p);
  }
  return s;
}

Matrix effective_matrix(const BlockSensingMatrix& a, const GuessEnsemble& x) {
  if (a.theta() != x.theta() || a.n() != x.n())
    throw InvalidArgument("effective_matrix: A and X are not block compatible");
  const int r = x.r();
  Matrix b(a.m(), x.total_columns());
  for (int l = 0; l < a.theta(); ++l) b.middleCols(static_cast<Eigen::Index>(l) * r, r) = a.block(l) * x.block(l);
  return b;
}

Vector solver_weights(const GuessEnsemble& x, double p) {
  Vector w(x.total_columns());
  for (int k = 0; k < x.total_columns(); ++k) {
    const Vector col = x.column(k);
    w(k) = lp_norm(col, p);
    if (w(k) < 1e-12 && col.norm() > 1e-12) {
      std::ostringstream os;
      os << "solver_weights: column " << (k + 1) << " is nonzero but has weight " << w(k);
      throw InvalidArgument(os.str());
    }
  }
  return w;
}

Vector apply_selector(const GuessEnsemble& x, const Selector& z) {
  if (z.theta() != x.theta() || z.r() != x.r()) throw InvalidArgument("apply_selector: dimension mismatch");
  const int n = x.n();
  const int r = x.r();
  Vector out(static_cast<Eigen::Index>(n) * x.theta());
  for (int l = 0; l < x.theta(); ++l) {
    const auto zl = z.values().segment(static_cast<Eigen::Index>(l) * r, r);
    Eigen::Index one = -1;
    bool basis = true;
    for (Eigen::Index k = 0; k < r && basis; ++k) {
      if (zl(k) == 1.0 && one < 0) one = k;
      else if (zl(k) != 0.0) basis = false;
    }
    if (basis && one >= 0) {
      out.segment(static_cast<Eigen::Index>(l) * n, n) = x.block(l).col(one);
    } else {
      out.segment(static_cast<Eigen::Index>(l) * n, n) = x.block(l) * zl;
    }
  }
  return out;
}

}  // namespace blockrelax
