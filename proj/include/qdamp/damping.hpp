#pragma once

#include <vector>

#include "qdamp/fock.hpp"
#include "qdamp/liouvillian.hpp"

namespace qdamp {

/// Right eigenvector rho_n^(k), its dual left eigenvector and the eigenvalue.
struct DampingBasisElement {
  int n = 0;
  int k = 0;
  FockOperator right;
  FockOperator left;
  cplx eigenvalue;
};

/// Smallest dim with C(dim, degree) (nu/(nu+1))^dim < tol; degree + 1 when nu = 0.
int damping_required_dim(int degree, double nu, double tol);

/// Entries of rho_n^(k) along its offset k, indexed by the lower Fock level m.
Vector right_band(int n, int k, double nu, int dim);
/// Entries of the left eigenvector along its offset -k, indexed by the lower Fock level m.
Vector left_band(int n, int k, double nu, int dim);

/// rho_n^(k); requires dim >= damping_required_dim(n + |k|, nu, 1e-12).
FockOperator right_eigenvector(int n, int k, double nu, int dim);
/// Left eigenvector dual to rho_n^(k); same dim requirement.
FockOperator left_eigenvector(int n, int k, double nu, int dim);
DampingBasisElement basis_element(int n, int k, const OscillatorParams& p, int dim);

/// G[(m,k),(n,k')] = Tr{left_m^(k) right_n^(k')}; index (k + k_max)(n_max + 1) + n.
/// Requires dim >= damping_required_dim(2 n_max + k_max, nu, 1e-10).
Matrix duality_gram(int n_max, int k_max, double nu, int dim);

/// Coefficients alpha_n^(k) = Tr{left_n^(k) X}; coeffs[k + k_max][n].
struct Expansion {
  double nu = 0.0;
  int k_max = 0;
  std::vector<std::vector<cplx>> coeffs;

  cplx at(int n, int k) const;
  int n_count(int k) const { return static_cast<int>(coeffs.at(k + k_max).size()); }
};

Expansion expand(const FockOperator& x, double nu, int n_max, int k_max);
/// Grows n per offset until tol_run consecutive terms |alpha_n| max|rho_n| fall below tol.
Expansion expand_adaptive(const FockOperator& x, double nu, double tol = 1e-10);
FockOperator reconstruct(const Expansion& e, int dim);
/// Evolves every coefficient with its eigenvalue and rebuilds.
FockOperator evolve_expansion(const Expansion& e, const OscillatorParams& p, double t, int dim);
/// sum alpha_n^(k) exp(lambda_n^(k) t) rho_n^(k)
FockOperator evolve_spectral(const FockOperator& x, double nu, double omega, double A, double t, int n_max,
                             int k_max);

/// Normally ordered Gaussian :(1/kappa) exp(-(a^+ - alpha_conj)(a - alpha)/kappa):
struct GaussianAnsatz {
  double kappa = 1.0;
  cplx alpha;
  cplx alpha_conj;
};

/// b_n^(k); at kappa = nu + 1 uses the limit alpha^p alpha_conj^q (alpha alpha_conj/(nu+1))^n/(n+|k|)!.
cplx gaussian_coefficient(int n, int k, const GaussianAnsatz& g, double nu);
/// sum_{n,k} b_n^(k) rho_n^(k), truncated once terms fall below 1e-12.
FockOperator gaussian_state(const GaussianAnsatz& g, double nu, int dim);
/// Parameters after time t under the damped oscillator.
GaussianAnsatz gaussian_flow(const GaussianAnsatz& g, const OscillatorParams& p, double t);
/// Recovers (kappa, alpha, alpha_conj) from Tr{a rho}, Tr{a^+ rho}, Tr{a^+ a rho}.
GaussianAnsatz fit_gaussian(const FockOperator& rho);

}  // namespace qdamp
