#include "qdamp/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdamp/errors.hpp"

namespace qdamp {

namespace {

void require_dim(int dim) {
  if (dim < 2) throw DomainError("Fock dimension must be at least 2, got " + std::to_string(dim));
}

void require_same_dim(const FockOperator& a, const FockOperator& b, const char* where) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(where) + ": dimension " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

FockOperator::FockOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionMismatch("FockOperator: matrix must be square");
  require_dim(static_cast<int>(m_.rows()));
}

FockOperator FockOperator::zero(int dim) {
  require_dim(dim);
  return FockOperator(Matrix::Zero(dim, dim));
}

FockOperator FockOperator::identity(int dim) {
  require_dim(dim);
  return FockOperator(Matrix::Identity(dim, dim));
}

double FockOperator::hermiticity_defect() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

double FockOperator::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

bool FockOperator::is_diagonal(double tol) const {
  for (int j = 0; j < dim(); ++j)
    for (int i = 0; i < dim(); ++i)
      if (i != j && std::abs(m_(i, j)) > tol) return false;
  return true;
}

FockOperator& FockOperator::operator+=(const FockOperator& o) {
  require_same_dim(*this, o, "operator+");
  m_ += o.m_;
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
  require_same_dim(*this, o, "operator-");
  m_ -= o.m_;
  return *this;
}

FockOperator& FockOperator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same_dim(a, b, "operator*");
  return FockOperator(a.m_ * b.m_);
}

DensityMatrix::DensityMatrix(FockOperator op) : op_(std::move(op)) {
  const cplx tr = op_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw DomainError("DensityMatrix: trace " + std::to_string(tr.real()) + "+" +
                      std::to_string(tr.imag()) + "i is not 1");
  }
  if (op_.hermiticity_defect() > kHermitianTol) throw DomainError("DensityMatrix: not Hermitian");
}

DensityMatrix DensityMatrix::normalized(FockOperator op) {
  const cplx tr = op.trace();
  if (std::abs(tr) == 0.0) throw DomainError("DensityMatrix: zero trace");
  op *= 1.0 / tr;
  // remove round-off anti-Hermitian part
  Matrix h = 0.5 * (op.matrix() + op.matrix().adjoint());
  return DensityMatrix(FockOperator(std::move(h)));
}

DensityMatrix DensityMatrix::fock_state(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) throw DomainError("fock_state: level outside truncated space");
  Matrix m = Matrix::Zero(dim, dim);
  m(n, n) = 1.0;
  return DensityMatrix(FockOperator(std::move(m)));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double norm2 = psi.squaredNorm();
  if (norm2 == 0.0) throw DomainError("pure: zero vector");
  return DensityMatrix(FockOperator(psi * psi.adjoint() / norm2));
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(op_.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

FockOperator annihilation(int dim) {
  require_dim(dim);
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return FockOperator(std::move(m));
}

FockOperator creation(int dim) { return annihilation(dim).adjoint(); }

FockOperator number(int dim) {
  require_dim(dim);
  return FockOperator::diagonal(dim, [](int n) { return cplx(n); });
}

FockOperator parity(int dim) {
  require_dim(dim);
  return FockOperator::diagonal(dim, [](int n) { return cplx(n % 2 == 0 ? 1.0 : -1.0); });
}

int thermal_required_dim(double nu, double tol) {
  if (nu < 0.0 || !std::isfinite(nu)) throw DomainError("thermal occupation must be >= 0");
  if (nu == 0.0) return 2;
  const double q = nu / (nu + 1.0);
  return std::max(2, static_cast<int>(std::ceil(std::log(tol) / std::log(q))) + 1);
}

DensityMatrix thermal_state(double nu, int dim) {
  require_dim(dim);
  const int need = thermal_required_dim(nu);
  if (dim < need) throw TruncationError("thermal_state: tail mass exceeds 1e-12", need);
  const double q = nu / (nu + 1.0);
  double weight = 1.0 / (nu + 1.0);
  Matrix m = Matrix::Zero(dim, dim);
  double total = 0.0;
  for (int n = 0; n < dim; ++n) {
    m(n, n) = weight;
    total += weight;
    weight *= q;
  }
  m /= total;
  return DensityMatrix(FockOperator(std::move(m)));
}

DensityMatrix coherent_state(cplx alpha, int dim) {
  require_dim(dim);
  Vector psi(dim);
  psi(0) = 1.0;
  for (int n = 1; n < dim; ++n) psi(n) = psi(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  const double tail = std::norm(psi(dim - 1)) / psi.squaredNorm();
  if (tail > 1e-24) {
    throw TruncationError("coherent_state: amplitude leaks past the truncation", 2 * dim);
  }
  return DensityMatrix::pure(psi);
}

cplx trace(const FockOperator& x) { return x.trace(); }

cplx trace_product(const FockOperator& x, const FockOperator& y) {
  require_same_dim(x, y, "trace_product");
  return (x.matrix().transpose().cwiseProduct(y.matrix())).sum();
}

cplx expectation(const FockOperator& x, const FockOperator& rho) { return trace_product(x, rho); }

cplx expectation(const FockOperator& x, const DensityMatrix& rho) { return trace_product(x, rho.op()); }

FockOperator displacement(const PhasePoint& p, int dim) {
  const Matrix a = annihilation(dim).matrix();
  const Matrix gen = p.z * a.adjoint() - p.z_conj * a;
  return FockOperator(gen.exp());
}

cplx wigner_point(const FockOperator& f, const PhasePoint& p) {
  const int dim = f.dim();
  const double r = std::max(std::abs(p.z), std::abs(p.z_conj));
  if (r * r + 3.0 * r >= dim / 4.0) {
    throw DomainError("wigner_point: phase-space point too far out for dim " + std::to_string(dim));
  }
  const Matrix d = displacement(p, dim).matrix();
  const Matrix d_inv = displacement(PhasePoint{-p.z, -p.z_conj}, dim).matrix();
  const Matrix seed = 2.0 * parity(dim).matrix();
  const Matrix kernel = d * seed * d_inv;
  return (f.matrix().transpose().cwiseProduct(kernel)).sum();
}

cplx wigner_point_abel(const FockOperator& f, const PhasePoint& p) {
  const int dim = f.dim();
  const double r = std::max(std::abs(p.z), std::abs(p.z_conj));
  if (r * r + 3.0 * r >= dim / 4.0) {
    throw DomainError("wigner_point_abel: phase-space point too far out for dim " + std::to_string(dim));
  }
  const Matrix d = displacement(p, dim).matrix();
  const Matrix d_inv = displacement(PhasePoint{-p.z, -p.z_conj}, dim).matrix();
  const Vector g = (d_inv * f.matrix() * d).diagonal();

  // u = 1 - x; smallest u keeps the damped tail below 1e-16
  constexpr int kPoints = 12;
  const double u_min = std::max(0.08, 1.0 - std::pow(1e-16, 1.0 / dim));
  if (u_min > 0.3) throw DomainError("wigner_point_abel: dim too small for the damped seed");
  std::vector<double> u(kPoints);
  std::vector<cplx> v(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    u[i] = u_min + 0.5 * i / (kPoints - 1);
    const double x = 1.0 - u[i];
    cplx sum = 0.0;
    double w = 2.0;
    for (int m = 0; m < dim; ++m) {
      sum += w * g(m);
      w *= -x;
    }
    v[i] = sum;
  }
  // Neville extrapolation to u = 0
  for (int m = 1; m < kPoints; ++m)
    for (int i = 0; i + m < kPoints; ++i)
      v[i] = (-u[i + m] * v[i] + u[i] * v[i + 1]) / (u[i] - u[i + m]);
  return v[0];
}

}  // namespace qdamp
