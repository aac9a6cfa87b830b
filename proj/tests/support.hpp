#pragma once

#include <random>

#include "qdamp/fock.hpp"

namespace qdamp::testing {

inline Matrix random_matrix(int dim, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = cplx(g(gen), g(gen));
  return m;
}

/// Random density matrix supported on levels 0..support-1.
inline DensityMatrix random_density(int dim, int support, std::mt19937_64& gen) {
  Matrix g = random_matrix(dim, gen);
  g.bottomRows(dim - support).setZero();
  return DensityMatrix::normalized(FockOperator(g * g.adjoint()));
}

inline double diff(const FockOperator& a, const FockOperator& b) { return (a - b).max_abs(); }

inline double mean_number(const FockOperator& rho) {
  double s = 0.0;
  for (int n = 1; n < rho.dim(); ++n) s += n * rho(n, n).real();
  return s;
}

inline double factorial_moment2(const FockOperator& rho) {
  double s = 0.0;
  for (int n = 2; n < rho.dim(); ++n) s += n * (n - 1.0) * rho(n, n).real();
  return s;
}

}  // namespace qdamp::testing
