#include "qdamp/damping.hpp"

#include <cmath>
#include <string>

#include "qdamp/errors.hpp"
#include "qdamp/specialfns.hpp"
#include "qdamp/superoperator.hpp"

namespace qdamp {

namespace {

using real = long double;

void check_indices(int n, int k, double nu, int dim) {
  if (n < 0) throw DomainError("damping basis: n must be >= 0");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("damping basis: nu must be >= 0");
  if (dim < 2) throw DomainError("damping basis: dim must be >= 2");
  if (std::abs(k) >= dim) throw DomainError("damping basis: |k| must be below dim");
}

real binom(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  real b = 1.0L;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return b;
}

// sqrt((m+k)!/m!)
real ladder_factor(int m, int k) {
  real f = 1.0L;
  for (int j = 1; j <= k; ++j) f *= std::sqrt(static_cast<real>(m + j));
  return f;
}

// diagonal of :L_n^(a)(x/(nu+1)) exp(-x/(nu+1)): at x = m, times (-1)^n/(nu+1)^(a+1)
real right_diag(int n, int a, real q, int m) {
  const int top = n + a;
  real sum = 0.0L;
  if (q == 0.0L) {
    if (m <= n) sum = ((m % 2) ? -1.0L : 1.0L) * binom(top, n - m);
  } else {
    // terms (-1)^j C(n+a, n-j) C(m,j) (1-q)^j q^(m-j)
    real c = binom(top, n);
    real w = std::pow(q, static_cast<real>(m));
    const real ratio = (1.0L - q) / q;
    const int jmax = std::min(n, m);
    for (int j = 0; j <= jmax; ++j) {
      if (j > 0) {
        c = c * (n - j + 1) / (a + j);
        w = w * (m - j + 1) / j * ratio;
      }
      sum += (j % 2 ? -c : c) * w;
    }
  }
  const real pref = ((n % 2) ? -1.0L : 1.0L) * std::pow(1.0L - q, static_cast<real>(a + 1));
  return pref * sum;
}

// (-nu/(1+nu))^n times the diagonal of :L_n^(a)(x/nu): at x = m
real left_diag(int n, int a, real q, int m) {
  const int top = n + a;
  if (q == 0.0L) return binom(m, n);
  // (-1)^n sum_j (-1)^j C(n+a, n-j) C(m,j) (1-q)^j q^(n-j)
  real c = binom(top, n);
  real w = std::pow(q, static_cast<real>(n));
  const real ratio = (1.0L - q) / q;
  real sum = 0.0L;
  const int jmax = std::min(n, m);
  for (int j = 0; j <= jmax; ++j) {
    if (j > 0) {
      c = c * (n - j + 1) / (a + j);
      w = w * (m - j + 1) / j * ratio;
    }
    sum += (j % 2 ? -c : c) * w;
  }
  return ((n % 2) ? -1.0L : 1.0L) * sum;
}

FockOperator band_to_operator(const Vector& band, int offset, int dim) {
  FockOperator x = FockOperator::zero(dim);
  set_sector(x, offset, band);
  return x;
}

void require_adequate(int degree, double nu, int dim, double tol, const char* what) {
  const int need = damping_required_dim(degree, nu, tol);
  if (dim < need) throw TruncationError(std::string(what) + ": truncation too small", need);
}

real factorial_ratio(int n, int a) {  // n!/(n+a)!
  real r = 1.0L;
  for (int j = 1; j <= a; ++j) r /= (n + j);
  return r;
}

}  // namespace

int damping_required_dim(int degree, double nu, double tol) {
  if (degree < 0) throw DomainError("damping_required_dim: negative degree");
  if (nu == 0.0) return std::max(2, degree + 1);
  const double q = nu / (nu + 1.0);
  const double lq = std::log(q);
  const double ltol = std::log(tol);
  auto log_tail = [&](int d) {
    return std::lgamma(d + 1.0) - std::lgamma(degree + 1.0) - std::lgamma(d - degree + 1.0) + d * lq;
  };
  // C(d, degree) q^d rises up to d ~ degree/(1-q) and decays after it
  const int peak = std::max(degree + 1, static_cast<int>(std::ceil(degree / (1.0 - q))));
  if (log_tail(peak) < ltol) return std::max(2, degree + 1);
  for (int d = peak;; ++d) {
    if (log_tail(d) < ltol) return d;
    if (d > 1000000) throw DomainError("damping_required_dim: no adequate dimension");
  }
}

Vector right_band(int n, int k, double nu, int dim) {
  check_indices(n, k, nu, dim);
  const int a = std::abs(k);
  const real q = static_cast<real>(nu) / (static_cast<real>(nu) + 1.0L);
  Vector v(dim - a);
  for (int m = 0; m < dim - a; ++m) {
    v(m) = static_cast<double>(right_diag(n, a, q, m) * ladder_factor(m, a));
  }
  return v;
}

Vector left_band(int n, int k, double nu, int dim) {
  check_indices(n, k, nu, dim);
  const int a = std::abs(k);
  const real q = static_cast<real>(nu) / (static_cast<real>(nu) + 1.0L);
  const real pref = factorial_ratio(n, a);
  Vector v(dim - a);
  for (int m = 0; m < dim - a; ++m) {
    v(m) = static_cast<double>(pref * left_diag(n, a, q, m) * ladder_factor(m, a));
  }
  return v;
}

FockOperator right_eigenvector(int n, int k, double nu, int dim) {
  check_indices(n, k, nu, dim);
  require_adequate(n + std::abs(k), nu, dim, 1e-12, "right_eigenvector");
  return band_to_operator(right_band(n, k, nu, dim), k, dim);
}

FockOperator left_eigenvector(int n, int k, double nu, int dim) {
  check_indices(n, k, nu, dim);
  require_adequate(n + std::abs(k), nu, dim, 1e-12, "left_eigenvector");
  return band_to_operator(left_band(n, k, nu, dim), -k, dim);
}

DampingBasisElement basis_element(int n, int k, const OscillatorParams& p, int dim) {
  p.validate();
  return DampingBasisElement{n, k, right_eigenvector(n, k, p.nu, dim), left_eigenvector(n, k, p.nu, dim),
                             eigenvalue(n, k, p)};
}

Matrix duality_gram(int n_max, int k_max, double nu, int dim) {
  if (n_max < 0 || k_max < 0) throw DomainError("duality_gram: negative index range");
  if (k_max >= dim) throw DomainError("duality_gram: k_max must be below dim");
  require_adequate(2 * n_max + k_max, nu, dim, 1e-10, "duality_gram");
  const int per_k = n_max + 1;
  const int size = (2 * k_max + 1) * per_k;
  Matrix g = Matrix::Zero(size, size);
  for (int k = -k_max; k <= k_max; ++k) {
    std::vector<Vector> lefts, rights;
    for (int n = 0; n <= n_max; ++n) {
      lefts.push_back(left_band(n, k, nu, dim));
      rights.push_back(right_band(n, k, nu, dim));
    }
    // different offsets never overlap in the trace, so only k = k' blocks are filled
    for (int m = 0; m <= n_max; ++m)
      for (int n = 0; n <= n_max; ++n)
        g((k + k_max) * per_k + m, (k + k_max) * per_k + n) = lefts[m].cwiseProduct(rights[n]).sum();
  }
  return g;
}

cplx Expansion::at(int n, int k) const {
  if (std::abs(k) > k_max) return 0.0;
  const auto& row = coeffs.at(k + k_max);
  return n < static_cast<int>(row.size()) ? row[n] : cplx(0.0);
}

Expansion expand(const FockOperator& x, double nu, int n_max, int k_max) {
  const int dim = x.dim();
  if (n_max < 0 || k_max < 0) throw DomainError("expand: negative index range");
  k_max = std::min(k_max, dim - 1);
  Expansion e{nu, k_max, {}};
  for (int k = -k_max; k <= k_max; ++k) {
    // Tr{left X} pairs the left band (offset -k) with the entries of X at offset k
    const Vector xs = sector_of(x, k);
    std::vector<cplx> row;
    for (int n = 0; n <= n_max; ++n) row.push_back(left_band(n, k, nu, dim).cwiseProduct(xs).sum());
    e.coeffs.push_back(std::move(row));
  }
  return e;
}

Expansion expand_adaptive(const FockOperator& x, double nu, double tol) {
  constexpr int kRun = 4;
  const int dim = x.dim();
  int k_max = 0;
  for (int k = 1; k < dim; ++k)
    if (!sector_of(x, k).isZero(0.0) || !sector_of(x, -k).isZero(0.0)) k_max = k;
  Expansion e{nu, k_max, {}};
  for (int k = -k_max; k <= k_max; ++k) {
    const Vector xs = sector_of(x, k);
    std::vector<cplx> row;
    if (xs.isZero(0.0)) {
      e.coeffs.push_back(row);
      continue;
    }
    const int cap = nu == 0.0 ? dim - 1 - std::abs(k) : std::max(200, 3 * dim);
    int small = 0;
    bool converged = false;
    for (int n = 0; n <= cap; ++n) {
      const cplx c = left_band(n, k, nu, dim).cwiseProduct(xs).sum();
      row.push_back(c);
      const double size = std::abs(c) * right_band(n, k, nu, dim).cwiseAbs().maxCoeff();
      small = size < tol ? small + 1 : 0;
      if (small >= kRun) {
        converged = true;
        break;
      }
    }
    if (!converged && nu != 0.0) {
      throw ConvergenceError("expand_adaptive: no convergence at offset " + std::to_string(k));
    }
    e.coeffs.push_back(std::move(row));
  }
  return e;
}

FockOperator evolve_expansion(const Expansion& e, const OscillatorParams& p, double t, int dim) {
  FockOperator out = FockOperator::zero(dim);
  for (int k = -e.k_max; k <= e.k_max; ++k) {
    if (std::abs(k) >= dim) continue;
    Vector band = Vector::Zero(dim - std::abs(k));
    for (int n = 0; n < e.n_count(k); ++n) {
      const cplx c = e.at(n, k);
      if (c == 0.0) continue;
      const cplx f = t == 0.0 ? cplx(1.0) : std::exp(eigenvalue(n, k, p) * t);
      band += (c * f) * right_band(n, k, e.nu, dim);
    }
    set_sector(out, k, band);
  }
  return out;
}

FockOperator reconstruct(const Expansion& e, int dim) {
  return evolve_expansion(e, OscillatorParams{0.0, 1.0, e.nu}, 0.0, dim);
}

FockOperator evolve_spectral(const FockOperator& x, double nu, double omega, double A, double t, int n_max,
                             int k_max) {
  const OscillatorParams p{omega, A, nu};
  p.validate();
  if (!std::isfinite(t)) throw DomainError("evolve_spectral: non-finite time");
  return evolve_expansion(expand(x, nu, n_max, k_max), p, t, x.dim());
}

cplx gaussian_coefficient(int n, int k, const GaussianAnsatz& g, double nu) {
  if (n < 0) throw DomainError("gaussian_coefficient: n must be >= 0");
  if (!(g.kappa > 0.0)) throw DomainError("gaussian_coefficient: kappa must be positive");
  const int a = std::abs(k);
  const int p = (a + k) / 2, q = (a - k) / 2;
  const cplx prod = g.alpha * g.alpha_conj;
  const cplx mono = std::pow(g.alpha, p) * std::pow(g.alpha_conj, q);
  const double gap = nu + 1.0 - g.kappa;
  double inv_fact = 1.0;  // 1/(n+a)!
  for (int j = 2; j <= n + a; ++j) inv_fact /= j;
  if (std::abs(gap) < 1e-9 * (nu + 1.0)) {
    return mono * std::pow(prod / (nu + 1.0), n) * inv_fact;
  }
  // L_n^(a)(x) with complex x by the explicit sum
  const cplx x = prod / gap;
  std::vector<double> coef(n + 1);  // C(n+a, n-m)/m!
  coef[0] = static_cast<double>(binom(n + a, n));
  for (int m = 1; m <= n; ++m) coef[m] = coef[m - 1] * (n - m + 1) / (double(m + a) * m);
  cplx lag = 0.0;
  for (int m = n; m >= 0; --m) lag = lag * (-x) + coef[m];
  double nfact_ratio = 1.0;  // n!/(n+a)!
  for (int j = 1; j <= a; ++j) nfact_ratio /= (n + j);
  return nfact_ratio * std::pow(g.kappa / (nu + 1.0) - 1.0, n) * mono * lag;
}

FockOperator gaussian_state(const GaussianAnsatz& g, double nu, int dim) {
  if (!(g.kappa > 0.0)) throw DomainError("gaussian_state: kappa must be positive");
  constexpr double kTol = 1e-12;
  constexpr int kRun = 4;
  constexpr int kCap = 600;
  FockOperator out = FockOperator::zero(dim);
  int quiet_k = 0;
  for (int a = 0; a < dim && quiet_k < 2; ++a) {
    double k_size = 0.0;
    for (int k : {a, -a}) {
      if (a == 0 && k < 0) continue;
      Vector band = Vector::Zero(dim - a);
      int small = 0;
      bool converged = false;
      for (int n = 0; n <= kCap; ++n) {
        const cplx b = gaussian_coefficient(n, k, g, nu);
        if (!std::isfinite(std::abs(b))) throw ConvergenceError("gaussian_state: coefficient overflow");
        double size = 0.0;
        if (b != 0.0) {
          const Vector r = right_band(n, k, nu, dim);
          size = std::abs(b) * r.cwiseAbs().maxCoeff();
          band += b * r;
        }
        k_size = std::max(k_size, size);
        small = size < kTol ? small + 1 : 0;
        if (small >= kRun) {
          converged = true;
          break;
        }
      }
      if (!converged) throw ConvergenceError("gaussian_state: series does not converge");
      set_sector(out, k, band);
    }
    quiet_k = k_size < kTol ? quiet_k + 1 : 0;
  }
  return out;
}

GaussianAnsatz gaussian_flow(const GaussianAnsatz& g, const OscillatorParams& p, double t) {
  p.validate();
  const double decay = std::exp(-p.A * t);
  GaussianAnsatz out;
  out.kappa = p.nu + 1.0 - (p.nu + 1.0 - g.kappa) * decay;
  out.alpha = g.alpha * std::exp(cplx(-0.5 * p.A * t, -p.omega * t));
  out.alpha_conj = g.alpha_conj * std::exp(cplx(-0.5 * p.A * t, p.omega * t));
  return out;
}

GaussianAnsatz fit_gaussian(const FockOperator& rho) {
  const int dim = rho.dim();
  const cplx tr = rho.trace();
  const cplx al = trace_product(annihilation(dim), rho) / tr;
  const cplx alc = trace_product(creation(dim), rho) / tr;
  const cplx nbar = trace_product(number(dim), rho) / tr;
  return GaussianAnsatz{(nbar - al * alc).real() + 1.0, al, alc};
}

}  // namespace qdamp
