#pragma once

#include <optional>
#include <vector>

#include "qdamp/fock.hpp"

namespace qdamp {

/// Linear map on FockOperators.
///
/// Maps that keep the matrix offset k = row - col fixed (every phase-covariant
/// generator, kick and click operator here) are stored as one block per offset.
/// Sector k holds the entries X(j0+s+k, j0+s), j0 = max(0,-k), s = 0..dim-|k|-1.
/// Other maps use a dense (dim^2 x dim^2) matrix on column-stacked vec(X),
/// so that L X R is (R^T kron L) vec(X). Dense storage is limited to kDenseLimit.
class SuperOperator {
 public:
  static constexpr int kDenseLimit = 40;

  SuperOperator() = default;

  static SuperOperator zero(int dim);
  static SuperOperator identity(int dim);
  /// Wraps a column-stacked dense matrix; dim <= kDenseLimit.
  static SuperOperator dense(int dim, Matrix m);

  int dim() const { return dim_; }
  bool is_sectored() const { return sectored_; }
  static int sector_length(int dim, int k) { return dim - (k < 0 ? -k : k); }

  const Matrix& sector(int k) const;
  Matrix& sector(int k);
  /// Dense column-stacked matrix; converts sectored storage.
  Matrix to_dense() const;
  SuperOperator as_dense() const { return dense(dim_, to_dense()); }

  /// S(X)
  FockOperator apply(const FockOperator& x) const;
  /// X S, defined by Tr{(X S) rho} = Tr{X S(rho)}
  FockOperator apply_left(const FockOperator& x) const;

  double max_abs() const;

  SuperOperator& operator+=(const SuperOperator& o);
  SuperOperator& operator-=(const SuperOperator& o);
  SuperOperator& operator*=(cplx s);
  friend SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
  friend SuperOperator operator-(SuperOperator a, const SuperOperator& b) { return a -= b; }
  friend SuperOperator operator*(SuperOperator a, cplx s) { return a *= s; }
  friend SuperOperator operator*(cplx s, SuperOperator a) { return a *= s; }
  /// Composition (S T)(X) = S(T(X)).
  friend SuperOperator operator*(const SuperOperator& s, const SuperOperator& t);

 private:
  int dim_ = 0;
  bool sectored_ = true;
  std::vector<Matrix> sectors_;  // index k + dim - 1
  Matrix dense_;
};

/// Sector vector of X at offset k.
Vector sector_of(const FockOperator& x, int k);
void set_sector(FockOperator& x, int k, const Vector& v);

/// X -> L X R
SuperOperator superop_sandwich(const FockOperator& l, const FockOperator& r);
/// X -> L X
inline SuperOperator superop_left(const FockOperator& l) {
  return superop_sandwich(l, FockOperator::identity(l.dim()));
}
/// X -> X R
inline SuperOperator superop_right(const FockOperator& r) {
  return superop_sandwich(FockOperator::identity(r.dim()), r);
}

/// e^{S t} by scaling and squaring with a Pade approximant.
SuperOperator exp_super(const SuperOperator& s, double t);
/// e^{S t} by eigendecomposition; throws ConvergenceError when S is numerically defective.
SuperOperator exp_super_eigen(const SuperOperator& s, double t);
/// e^{S t} X, exponentiating only the sectors X occupies.
FockOperator propagate(const SuperOperator& s, const FockOperator& x, double t);

/// phi_p(S t) with phi_0 = exp, phi_p(z) = sum_j z^j/(j+p)!, via an augmented block exponential.
SuperOperator phi_super(const SuperOperator& s, double t, int p);
SuperOperator inverse(const SuperOperator& s);

/// phi_p(M) of a square matrix.
Matrix phi_matrix(const Matrix& m, int p);

/// Traces depend only on the diagonal sector, which no other sector feeds.
/// These give the matrix of S on that subspace (the whole dense matrix for dense S),
/// the coordinates of X in it, and the row r with r . coords(X) = Tr{X}.
Matrix trace_block(const SuperOperator& s);
Vector trace_coords(const SuperOperator& s, const FockOperator& x);
Eigen::RowVectorXcd trace_row(const SuperOperator& s);

/// M = i shift + D Q diag(lambda) Q^T D^{-1} for M = i shift + (real tridiagonal whose off-diagonal
/// pairs have positive products), with D = diag(scale) and Q orthogonal.
struct BirthDeathSpectrum {
  double shift = 0.0;
  Eigen::VectorXd scale;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd q;
};
/// Empty unless m has that form.
std::optional<BirthDeathSpectrum> birth_death_spectrum(const Matrix& m);
/// e^{M t} v from the spectrum of M.
Vector evolve(const BirthDeathSpectrum& bd, const Vector& v, double t);

/// All eigenvalues (unordered).
std::vector<cplx> eigenvalues(const SuperOperator& s);
/// max |Tr{S(X)}| / max|X| over the given X.
double trace_defect(const SuperOperator& s, const std::vector<FockOperator>& xs);

}  // namespace qdamp
