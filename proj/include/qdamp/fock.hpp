#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qdamp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense operator on the Fock space truncated to levels 0..dim-1.
class FockOperator {
 public:
  FockOperator() = default;
  explicit FockOperator(Matrix m);

  static FockOperator zero(int dim);
  static FockOperator identity(int dim);
  /// Diagonal operator with entries f(0), ..., f(dim-1).
  template <class F>
  static FockOperator diagonal(int dim, F&& f) {
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) m(n, n) = f(n);
    return FockOperator(std::move(m));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }
  cplx operator()(int row, int col) const { return m_(row, col); }
  cplx& operator()(int row, int col) { return m_(row, col); }

  FockOperator adjoint() const { return FockOperator(m_.adjoint()); }
  cplx trace() const { return m_.trace(); }
  /// max |X - X^dagger| over entries
  double hermiticity_defect() const;
  double max_abs() const;
  bool is_diagonal(double tol = 0.0) const;

  FockOperator& operator+=(const FockOperator& o);
  FockOperator& operator-=(const FockOperator& o);
  FockOperator& operator*=(cplx s);

  friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
  friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
  friend FockOperator operator*(FockOperator a, cplx s) { return a *= s; }
  friend FockOperator operator*(cplx s, FockOperator a) { return a *= s; }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);

 private:
  Matrix m_;
};

/// Unit-trace Hermitian FockOperator (statistical operator).
class DensityMatrix {
 public:
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kPositivityTol = 1e-8;

  /// Throws DomainError unless trace and Hermiticity hold within tolerance.
  explicit DensityMatrix(FockOperator op);
  /// Divides by the trace first.
  static DensityMatrix normalized(FockOperator op);
  /// Projector onto the number state |n>.
  static DensityMatrix fock_state(int n, int dim);
  static DensityMatrix pure(const Vector& psi);

  int dim() const { return op_.dim(); }
  const FockOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  double min_eigenvalue() const;
  bool is_positive(double tol = kPositivityTol) const { return min_eigenvalue() >= -tol; }

 private:
  FockOperator op_;
};

FockOperator annihilation(int dim);
FockOperator creation(int dim);
FockOperator number(int dim);
FockOperator parity(int dim);

/// Smallest dim at which the thermal tail (nu/(nu+1))^dim drops below tol.
int thermal_required_dim(double nu, double tol = 1e-12);
DensityMatrix thermal_state(double nu, int dim);
/// Coherent state |alpha><alpha| normalized on the truncated space.
DensityMatrix coherent_state(cplx alpha, int dim);

cplx trace(const FockOperator& x);
cplx expectation(const FockOperator& x, const DensityMatrix& rho);
cplx expectation(const FockOperator& x, const FockOperator& rho);
/// Tr{X Y} without forming the product.
cplx trace_product(const FockOperator& x, const FockOperator& y);

/// Phase-space point; z_conj is independent of z in general.
struct PhasePoint {
  cplx z;
  cplx z_conj;
  static PhasePoint physical(cplx z) { return {z, std::conj(z)}; }
};

/// exp(z a^dagger - z_conj a) by matrix exponential.
FockOperator displacement(const PhasePoint& p, int dim);
/// Tr{F D(z) 2(-1)^{a^dagger a} D(z)^dagger} with D(z)^dagger = exp(z_conj a - z a^dagger).
cplx wigner_point(const FockOperator& f, const PhasePoint& p);
/// Wigner value of an observable with polynomially growing matrix elements (e.g. a^dagger a).
/// The parity seed is damped to 2(-x)^{a^dagger a}, evaluated for x < 1 and extrapolated to x = 1.
/// f.dim() should be a few hundred levels.
cplx wigner_point_abel(const FockOperator& f, const PhasePoint& p);

}  // namespace qdamp
