#include "qdamp/superoperator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <set>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdamp/errors.hpp"

namespace qdamp {

namespace {

int first_col(int k) { return k < 0 ? -k : 0; }

void require_dense_ok(int dim) {
  if (dim > SuperOperator::kDenseLimit) {
    throw DomainError("dense superoperator requested at dim " + std::to_string(dim) + " > " +
                      std::to_string(SuperOperator::kDenseLimit));
  }
}

void require_same(const SuperOperator& a, const SuperOperator& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("superoperator dimensions differ");
}

Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

Matrix unvec(const Vector& v, int dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

std::set<int> bands(const Matrix& m) {
  std::set<int> out;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out.insert(i - j);
  return out;
}

template <class F>
SuperOperator map_blocks(const SuperOperator& s, F&& f) {
  if (s.is_sectored()) {
    SuperOperator out = SuperOperator::zero(s.dim());
    for (int k = 1 - s.dim(); k < s.dim(); ++k) out.sector(k) = f(s.sector(k));
    return out;
  }
  return SuperOperator::dense(s.dim(), f(s.to_dense()));
}

Matrix phi_block(const Matrix& y, int p) {
  const int n = static_cast<int>(y.rows());
  if (y.isZero(0.0)) {
    double fact = 1.0;
    for (int j = 2; j <= p; ++j) fact *= j;
    return Matrix::Identity(n, n) / fact;
  }
  if (p == 0) return y.exp();
  Matrix big = Matrix::Zero((p + 1) * n, (p + 1) * n);
  big.topLeftCorner(n, n) = y;
  for (int j = 0; j < p; ++j) big.block(j * n, (j + 1) * n, n, n).setIdentity();
  const Matrix e = big.exp();
  return e.block(0, p * n, n, n);
}

}  // namespace

SuperOperator SuperOperator::zero(int dim) {
  if (dim < 2) throw DomainError("superoperator dimension must be at least 2");
  SuperOperator s;
  s.dim_ = dim;
  s.sectored_ = true;
  s.sectors_.reserve(2 * dim - 1);
  for (int k = 1 - dim; k < dim; ++k) {
    const int n = sector_length(dim, k);
    s.sectors_.push_back(Matrix::Zero(n, n));
  }
  return s;
}

SuperOperator SuperOperator::identity(int dim) {
  SuperOperator s = zero(dim);
  for (auto& m : s.sectors_) m.setIdentity();
  return s;
}

SuperOperator SuperOperator::dense(int dim, Matrix m) {
  require_dense_ok(dim);
  if (m.rows() != dim * dim || m.cols() != dim * dim) {
    throw DimensionMismatch("dense superoperator must be dim^2 x dim^2");
  }
  SuperOperator s;
  s.dim_ = dim;
  s.sectored_ = false;
  s.dense_ = std::move(m);
  return s;
}

const Matrix& SuperOperator::sector(int k) const {
  if (!sectored_) throw DomainError("sector access on a dense superoperator");
  return sectors_.at(k + dim_ - 1);
}

Matrix& SuperOperator::sector(int k) {
  if (!sectored_) throw DomainError("sector access on a dense superoperator");
  return sectors_.at(k + dim_ - 1);
}

Matrix SuperOperator::to_dense() const {
  if (!sectored_) return dense_;
  require_dense_ok(dim_);
  const int d = dim_;
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int k = 1 - d; k < d; ++k) {
    const Matrix& b = sector(k);
    const int j0 = first_col(k);
    for (int sp = 0; sp < b.cols(); ++sp) {
      const int in = (j0 + sp + k) + (j0 + sp) * d;
      for (int s = 0; s < b.rows(); ++s) m((j0 + s + k) + (j0 + s) * d, in) = b(s, sp);
    }
  }
  return m;
}

Vector sector_of(const FockOperator& x, int k) {
  const int n = SuperOperator::sector_length(x.dim(), k);
  const int j0 = first_col(k);
  Vector v(n);
  for (int s = 0; s < n; ++s) v(s) = x(j0 + s + k, j0 + s);
  return v;
}

void set_sector(FockOperator& x, int k, const Vector& v) {
  const int j0 = first_col(k);
  for (int s = 0; s < v.size(); ++s) x(j0 + s + k, j0 + s) = v(s);
}

FockOperator SuperOperator::apply(const FockOperator& x) const {
  if (x.dim() != dim_) throw DimensionMismatch("apply: operator and superoperator dims differ");
  if (!sectored_) return FockOperator(unvec(dense_ * vec(x.matrix()), dim_));
  FockOperator out = FockOperator::zero(dim_);
  for (int k = 1 - dim_; k < dim_; ++k) {
    const Vector v = sector_of(x, k);
    if (v.isZero(0.0)) continue;
    set_sector(out, k, sector(k) * v);
  }
  return out;
}

FockOperator SuperOperator::apply_left(const FockOperator& x) const {
  if (x.dim() != dim_) throw DimensionMismatch("apply_left: operator and superoperator dims differ");
  if (!sectored_) {
    const Matrix xt = x.matrix().transpose();
    return FockOperator(unvec(dense_.transpose() * vec(xt), dim_).transpose());
  }
  FockOperator out = FockOperator::zero(dim_);
  for (int k = 1 - dim_; k < dim_; ++k) {
    const Vector v = sector_of(x, -k);
    if (v.isZero(0.0)) continue;
    set_sector(out, -k, sector(k).transpose() * v);
  }
  return out;
}

double SuperOperator::max_abs() const {
  if (!sectored_) return dense_.cwiseAbs().maxCoeff();
  double m = 0.0;
  for (const auto& b : sectors_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

SuperOperator& SuperOperator::operator+=(const SuperOperator& o) {
  require_same(*this, o);
  if (sectored_ && o.sectored_) {
    for (size_t i = 0; i < sectors_.size(); ++i) sectors_[i] += o.sectors_[i];
  } else {
    *this = dense(dim_, to_dense() + o.to_dense());
  }
  return *this;
}

SuperOperator& SuperOperator::operator-=(const SuperOperator& o) {
  require_same(*this, o);
  if (sectored_ && o.sectored_) {
    for (size_t i = 0; i < sectors_.size(); ++i) sectors_[i] -= o.sectors_[i];
  } else {
    *this = dense(dim_, to_dense() - o.to_dense());
  }
  return *this;
}

SuperOperator& SuperOperator::operator*=(cplx s) {
  if (sectored_) {
    for (auto& b : sectors_) b *= s;
  } else {
    dense_ *= s;
  }
  return *this;
}

SuperOperator operator*(const SuperOperator& s, const SuperOperator& t) {
  require_same(s, t);
  if (s.sectored_ && t.sectored_) {
    SuperOperator out = SuperOperator::zero(s.dim_);
    for (size_t i = 0; i < s.sectors_.size(); ++i) out.sectors_[i] = s.sectors_[i] * t.sectors_[i];
    return out;
  }
  return SuperOperator::dense(s.dim_, s.to_dense() * t.to_dense());
}

SuperOperator superop_sandwich(const FockOperator& l, const FockOperator& r) {
  if (l.dim() != r.dim()) throw DimensionMismatch("superop_sandwich: L and R dims differ");
  const int d = l.dim();
  const auto bl = bands(l.matrix());
  const auto br = bands(r.matrix());
  if (bl.empty() || br.empty()) return SuperOperator::zero(d);
  if (bl.size() == 1 && br.size() == 1 && *bl.begin() + *br.begin() == 0) {
    // (L X R)(i,j) = L(i,i-b) X(i-b,j-b) R(j-b,j)
    const int b = *bl.begin();
    SuperOperator s = SuperOperator::zero(d);
    for (int k = 1 - d; k < d; ++k) {
      Matrix& m = s.sector(k);
      const int j0 = first_col(k);
      for (int idx = 0; idx < m.rows(); ++idx) {
        const int i = j0 + idx + k, j = j0 + idx;
        const int ip = i - b, jp = j - b;
        if (ip < 0 || ip >= d || jp < 0 || jp >= d) continue;
        m(idx, idx - b) = l(i, ip) * r(jp, j);
      }
    }
    return s;
  }
  require_dense_ok(d);
  return SuperOperator::dense(d, Eigen::kroneckerProduct(r.matrix().transpose(), l.matrix()).eval());
}

SuperOperator exp_super(const SuperOperator& s, double t) {
  if (!std::isfinite(t)) throw DomainError("exp_super: non-finite time");
  return map_blocks(s, [t](const Matrix& m) -> Matrix {
    if (m.isZero(0.0)) return Matrix::Identity(m.rows(), m.cols());
    return (m * t).exp();
  });
}

SuperOperator exp_super_eigen(const SuperOperator& s, double t) {
  if (!std::isfinite(t)) throw DomainError("exp_super_eigen: non-finite time");
  return map_blocks(s, [t](const Matrix& m) -> Matrix {
    if (m.isZero(0.0)) return Matrix::Identity(m.rows(), m.cols());
    Eigen::ComplexEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw ConvergenceError("exp_super_eigen: eigensolver failed");
    const Matrix& v = es.eigenvectors();
    Eigen::PartialPivLU<Matrix> lu(v);
    const Matrix v_inv = lu.inverse();
    const Matrix recon = v * es.eigenvalues().asDiagonal() * v_inv;
    if ((recon - m).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
      throw ConvergenceError("exp_super_eigen: numerically defective superoperator");
    }
    const Vector e = (es.eigenvalues() * t).array().exp();
    return v * e.asDiagonal() * v_inv;
  });
}

FockOperator propagate(const SuperOperator& s, const FockOperator& x, double t) {
  if (!std::isfinite(t)) throw DomainError("propagate: non-finite time");
  if (x.dim() != s.dim()) throw DimensionMismatch("propagate: dims differ");
  const int d = s.dim();
  if (!s.is_sectored()) {
    return FockOperator(unvec((s.to_dense() * t).exp() * vec(x.matrix()), d));
  }
  FockOperator out = FockOperator::zero(d);
  for (int k = 1 - d; k < d; ++k) {
    const Vector v = sector_of(x, k);
    if (v.isZero(0.0)) continue;
    const Matrix& m = s.sector(k);
    set_sector(out, k, m.isZero(0.0) ? v : Vector((m * t).exp() * v));
  }
  return out;
}

SuperOperator phi_super(const SuperOperator& s, double t, int p) {
  if (p < 0) throw DomainError("phi_super: order must be >= 0");
  if (!std::isfinite(t)) throw DomainError("phi_super: non-finite time");
  return map_blocks(s, [t, p](const Matrix& m) { return phi_block(m * t, p); });
}

Matrix phi_matrix(const Matrix& m, int p) {
  if (p < 0) throw DomainError("phi_matrix: order must be >= 0");
  if (m.rows() != m.cols()) throw DimensionMismatch("phi_matrix: matrix must be square");
  return phi_block(m, p);
}

std::optional<BirthDeathSpectrum> birth_death_spectrum(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols() || n == 0) return std::nullopt;
  BirthDeathSpectrum out;
  out.shift = m(0, 0).imag();
  Eigen::MatrixXd im = m.imag();
  im.diagonal().array() -= out.shift;
  if (im.cwiseAbs().maxCoeff() != 0.0) return std::nullopt;
  const Eigen::MatrixXd re = m.real();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(i - j) > 1 && re(i, j) != 0.0) return std::nullopt;
  Eigen::VectorXd diag = re.diagonal(), off(n - 1);
  out.scale.resize(n);
  out.scale(0) = 1.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double up = re(i, i + 1), down = re(i + 1, i);
    if (!(up * down > 0.0)) return std::nullopt;
    off(i) = std::copysign(std::sqrt(up * down), up);
    out.scale(i + 1) = out.scale(i) * std::sqrt(down / up);
  }
  if (!out.scale.allFinite() || out.scale.minCoeff() == 0.0) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off);
  if (es.info() != Eigen::Success) return std::nullopt;
  out.lambda = es.eigenvalues();
  out.q = es.eigenvectors();
  return out;
}

Vector evolve(const BirthDeathSpectrum& bd, const Vector& v, double t) {
  const Eigen::VectorXd e = (bd.lambda * t).array().exp().matrix();
  auto real_evolve = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return (bd.q * e.cwiseProduct(bd.q.transpose() * x.cwiseQuotient(bd.scale))).cwiseProduct(bd.scale);
  };
  Vector out = real_evolve(v.real()).cast<cplx>();
  if (!v.imag().isZero(0.0)) out += cplx(0.0, 1.0) * real_evolve(v.imag()).cast<cplx>();
  if (bd.shift != 0.0) out *= std::exp(cplx(0.0, bd.shift * t));
  return out;
}

Matrix trace_block(const SuperOperator& s) { return s.is_sectored() ? s.sector(0) : s.to_dense(); }

Vector trace_coords(const SuperOperator& s, const FockOperator& x) {
  if (x.dim() != s.dim()) throw DimensionMismatch("trace_coords: dims differ");
  return s.is_sectored() ? sector_of(x, 0) : vec(x.matrix());
}

Eigen::RowVectorXcd trace_row(const SuperOperator& s) {
  if (s.is_sectored()) return Eigen::RowVectorXcd::Ones(s.dim());
  return vec(Matrix::Identity(s.dim(), s.dim())).transpose();
}

SuperOperator inverse(const SuperOperator& s) {
  return map_blocks(s, [](const Matrix& m) -> Matrix {
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible()) throw ConvergenceError("inverse: singular superoperator block");
    return lu.inverse();
  });
}

std::vector<cplx> eigenvalues(const SuperOperator& s) {
  std::vector<cplx> out;
  auto collect = [&out](const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  };
  if (s.is_sectored()) {
    for (int k = 1 - s.dim(); k < s.dim(); ++k) collect(s.sector(k));
  } else {
    collect(s.to_dense());
  }
  return out;
}

double trace_defect(const SuperOperator& s, const std::vector<FockOperator>& xs) {
  double worst = 0.0;
  for (const auto& x : xs) worst = std::max(worst, std::abs(s.apply(x).trace()) / x.max_abs());
  return worst;
}

}  // namespace qdamp
