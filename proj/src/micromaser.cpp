#include "qdamp/micromaser.hpp"

#include <cmath>

#include "qdamp/damping.hpp"
#include "qdamp/errors.hpp"

namespace qdamp {

namespace {

// Diagonal f(aa^+) with the truncated spectrum 1, 2, ..., dim-1, 0.
template <class F>
FockOperator anti_number_function(int dim, F&& f) {
  return FockOperator::diagonal(dim, [&](int n) { return cplx(f(n + 1 < dim ? n + 1.0 : 0.0)); });
}

void require_dim(int dim, const char* who) {
  if (dim < 2) throw DomainError(std::string(who) + ": dim must be >= 2");
}

void require_same(int a, int b, const char* who) {
  if (a != b) throw DimensionMismatch(std::string(who) + ": dims differ");
}

FockOperator hermitian_part(const FockOperator& x) { return 0.5 * (x + x.adjoint()); }

double mean_number(const FockOperator& rho) {
  double s = 0.0;
  for (int n = 1; n < rho.dim(); ++n) s += n * rho(n, n).real();
  return s;
}

Vector dense_null_vector(Matrix m, int dim) {
  const Eigen::Index n = m.rows();
  m.row(0).setZero();
  for (int j = 0; j < dim; ++j) m(0, static_cast<Eigen::Index>(j) * dim + j) = 1.0;
  Vector rhs = Vector::Zero(n);
  rhs(0) = 1.0;
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) throw ConvergenceError("steady_state: degenerate fixed point");
  return lu.solve(rhs);
}

}  // namespace

SuperOperator KickPair::net() const { return A + B - SuperOperator::identity(A.dim()); }

void DetectionConfig::validate() const {
  if (!(eta_down >= 0.0 && eta_down <= 1.0)) throw DomainError("DetectionConfig: eta_down outside [0,1]");
  if (!(eta_up >= 0.0 && eta_up <= 1.0)) throw DomainError("DetectionConfig: eta_up outside [0,1]");
  if (!(rate > 0.0 && std::isfinite(rate))) throw DomainError("DetectionConfig: rate must be positive");
}

KickPair jc_kick(double phi, int dim) {
  require_dim(dim, "jc_kick");
  if (!std::isfinite(phi)) throw DomainError("jc_kick: non-finite phi");
  const FockOperator s = anti_number_function(dim, [phi](double x) {
    return x > 0.0 ? std::sin(phi * std::sqrt(x)) / std::sqrt(x) : phi;
  });
  const FockOperator c = anti_number_function(dim, [phi](double x) { return std::cos(phi * std::sqrt(x)); });
  const FockOperator a = annihilation(dim), ad = creation(dim);
  return {superop_sandwich(ad * s, s * a), superop_sandwich(c, c)};
}

KickPair parity_kick(int dim) {
  require_dim(dim, "parity_kick");
  const FockOperator even = FockOperator::diagonal(dim, [](int n) { return n % 2 == 0 ? 1.0 : 0.0; });
  const FockOperator odd = FockOperator::diagonal(dim, [](int n) { return n % 2 == 0 ? 0.0 : 1.0; });
  return {superop_sandwich(even, even), superop_sandwich(odd, odd)};
}

KickPair trivial_kick(double q, int dim) {
  require_dim(dim, "trivial_kick");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("trivial_kick: q outside [0,1]");
  const SuperOperator one = SuperOperator::identity(dim);
  return {one * cplx(q), one * cplx(1.0 - q)};
}

SuperOperator one_photon_kick(double p, int dim) {
  require_dim(dim, "one_photon_kick");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("one_photon_kick: p outside [0,1]");
  const FockOperator g = anti_number_function(dim, [](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; });
  const FockOperator top = FockOperator::diagonal(dim, [dim](int n) { return n == dim - 1 ? 1.0 : 0.0; });
  const FockOperator a = annihilation(dim), ad = creation(dim);
  return cplx(p) * (superop_sandwich(ad * g, g * a) + superop_sandwich(top, top) - SuperOperator::identity(dim));
}

SuperOperator scully_lamb(const OscillatorParams& p, const KickPair& kick, double rate, int dim) {
  p.validate();
  if (!(rate > 0.0 && std::isfinite(rate))) throw DomainError("scully_lamb: rate must be positive");
  require_same(kick.A.dim(), dim, "scully_lamb");
  return build_liouvillian(p, dim) + cplx(rate) * kick.net();
}

SuperOperator click_operator(const KickPair& kick, const DetectionConfig& cfg) {
  cfg.validate();
  return cplx(cfg.eta_down) * kick.A + cplx(cfg.eta_up) * kick.B;
}

SuperOperator conditional_liouvillian(const SuperOperator& L0, const DetectionConfig& cfg, const KickPair& kick) {
  require_same(L0.dim(), kick.A.dim(), "conditional_liouvillian");
  return L0 - cplx(cfg.rate) * click_operator(kick, cfg);
}

NormalizedState propagate_normalized(const SuperOperator& Leta, const DensityMatrix& rho0, double t) {
  if (!(t >= 0.0)) throw DomainError("propagate_normalized: t must be >= 0");
  if (t == 0.0) return {rho0, 1.0};
  const FockOperator x = propagate(Leta, rho0.op(), t);
  const double tr = x.trace().real();
  if (!(tr > 1e-300)) throw UnderflowError("propagate_normalized: no-click probability underflow");
  return {DensityMatrix(hermitian_part(x) * cplx(1.0 / tr)), tr};
}

DensityMatrix reduce_state(const DensityMatrix& rho, Branch branch, const KickPair& kick) {
  require_same(rho.dim(), kick.A.dim(), "reduce_state");
  const FockOperator y = kick.branch(branch).apply(rho.op());
  const double tr = y.trace().real();
  if (!(tr > 1e-14)) throw ImpossibleOutcome("reduce_state: branch has zero probability");
  return DensityMatrix(hermitian_part(y) * cplx(1.0 / tr));
}

DensityMatrix steady_state(const SuperOperator& s) {
  const int d = s.dim();
  if (!s.is_sectored()) {
    const Vector v = dense_null_vector(s.to_dense(), d);
    const Matrix m = Eigen::Map<const Matrix>(v.data(), d, d);
    return DensityMatrix::normalized(hermitian_part(FockOperator(m)));
  }
  Matrix m = s.sector(0);
  m.row(0).setOnes();
  Vector rhs = Vector::Zero(d);
  rhs(0) = 1.0;
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) throw ConvergenceError("steady_state: degenerate fixed point");
  const Vector v = lu.solve(rhs);
  FockOperator rho = FockOperator::zero(d);
  for (int n = 0; n < d; ++n) rho(n, n) = v(n).real();
  return DensityMatrix::normalized(rho);
}

KickedSeries periodic_kick_evolve(const SuperOperator& L, const SuperOperator& K, double T, const DensityMatrix& rho0,
                                  int periods, int samples_per_period) {
  if (!(T > 0.0)) throw DomainError("periodic_kick_evolve: T must be positive");
  if (periods < 0 || samples_per_period < 1) throw DomainError("periodic_kick_evolve: bad sampling");
  require_same(L.dim(), K.dim(), "periodic_kick_evolve");
  require_same(L.dim(), rho0.dim(), "periodic_kick_evolve");
  const double dt = T / samples_per_period;
  const SuperOperator step = exp_super(L, dt);
  KickedSeries out;
  FockOperator rho = rho0.op();
  for (int j = 0; j < periods; ++j) {
    out.pre_kick.push_back(rho);
    rho += K.apply(rho);
    for (int s = 0; s < samples_per_period; ++s) {
      out.t.push_back(j * T + s * dt);
      out.mean_number.push_back(mean_number(rho));
      rho = step.apply(rho);
    }
  }
  out.pre_kick.push_back(rho);
  out.t.push_back(periods * T);
  out.mean_number.push_back(mean_number(rho));
  return out;
}

DensityMatrix cyclic_steady_state(const SuperOperator& L, const SuperOperator& K, double T) {
  if (!(T > 0.0)) throw DomainError("cyclic_steady_state: T must be positive");
  require_same(L.dim(), K.dim(), "cyclic_steady_state");
  const SuperOperator one = SuperOperator::identity(L.dim());
  return steady_state(exp_super(L, T) * (one + K) - one);
}

FockOperator period_average(const SuperOperator& L, const SuperOperator& K, double T, const FockOperator& pre_kick) {
  if (!(T > 0.0)) throw DomainError("period_average: T must be positive");
  const FockOperator post = pre_kick + K.apply(pre_kick);
  return phi_super(L, T, 1).apply(post);
}

SuperOperator time_averaged_rhs(const SuperOperator& L, const SuperOperator& K, double T) {
  if (!(T > 0.0)) throw DomainError("time_averaged_rhs: T must be positive");
  require_same(L.dim(), K.dim(), "time_averaged_rhs");
  return L + K * inverse(phi_super(L, -T, 1)) * cplx(1.0 / T);
}

KickMatrix kick_matrix(const SuperOperator& K, double nu, int n_max, int k_max) {
  if (n_max < 0 || k_max < 0) throw DomainError("kick_matrix: negative index range");
  const int d = K.dim();
  const int need = damping_required_dim(2 * n_max + k_max, nu, 1e-10);
  if (d < need) throw TruncationError("kick_matrix: Fock space too small", need);
  KickMatrix km{n_max, k_max, Matrix::Zero((2 * k_max + 1) * (n_max + 1), (2 * k_max + 1) * (n_max + 1))};
  std::vector<FockOperator> left(km.entries.rows());
  for (int k = -k_max; k <= k_max; ++k)
    for (int n = 0; n <= n_max; ++n) left[km.index(n, k)] = left_eigenvector(n, k, nu, d);
  for (int k2 = -k_max; k2 <= k_max; ++k2) {
    for (int n2 = 0; n2 <= n_max; ++n2) {
      const FockOperator kr = K.apply(right_eigenvector(n2, k2, nu, d));
      const int col = km.index(n2, k2);
      for (int row = 0; row < km.entries.rows(); ++row) km.entries(row, col) = trace_product(left[row], kr);
    }
  }
  return km;
}

Matrix mode_generator(const KickMatrix& km, const OscillatorParams& p, double T) {
  if (!(T > 0.0)) throw DomainError("mode_generator: T must be positive");
  const Eigen::Index size = km.entries.rows();
  Vector lambda(size), g(size);
  for (int k = -km.k_max; k <= km.k_max; ++k) {
    for (int n = 0; n <= km.n_max; ++n) {
      const int i = km.index(n, k);
      lambda(i) = eigenvalue(n, k, p);
      const cplx z = lambda(i) * T;
      g(i) = std::abs(z) < 1e-6 ? (1.0 + z / 2.0 + z * z / 12.0) / T : lambda(i) / (1.0 - std::exp(-z));
    }
  }
  Matrix out = km.entries * g.asDiagonal();
  out.diagonal() += lambda;
  return out;
}

}  // namespace qdamp
