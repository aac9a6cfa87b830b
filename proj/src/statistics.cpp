#include "qdamp/statistics.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdamp/errors.hpp"

namespace qdamp {

namespace {

using RowVector = Eigen::RowVectorXcd;

constexpr double kMinBranchProb = 1e-14;

// Restriction of L0, A, B to the trace-relevant subspace, with the steady state of L0.
struct Reduced {
  Matrix L0, A, B;
  RowVector tr;
  Vector ss;

  Reduced(const SuperOperator& l0, const KickPair& kick, const FockOperator* rho_ss = nullptr) {
    if (kick.A.dim() != l0.dim() || kick.B.dim() != l0.dim()) throw DimensionMismatch("statistics: dims differ");
    const bool sectored = l0.is_sectored() && kick.A.is_sectored() && kick.B.is_sectored();
    const int d = l0.dim();
    const FockOperator rho = rho_ss ? *rho_ss : steady_state(l0).op();
    if (sectored) {
      L0 = trace_block(l0);
      A = trace_block(kick.A);
      B = trace_block(kick.B);
      tr = trace_row(l0);
      ss = trace_coords(l0, rho);
    } else {
      const SuperOperator shape = SuperOperator::identity(d).as_dense();
      L0 = l0.to_dense();
      A = kick.A.to_dense();
      B = kick.B.to_dense();
      tr = trace_row(shape);
      ss = trace_coords(shape, rho);
    }
  }

  const Matrix& branch(Branch b) const { return b == Branch::down ? A : B; }
  Matrix click(const DetectionConfig& cfg) const { return cfg.eta_down * A + cfg.eta_up * B; }
  double trace(const Vector& v) const { return (tr * v)(0).real(); }
};

Vector evolve(const Matrix& m, double t, const Vector& v) { return (m * t).exp() * v; }

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

void require_times(const std::vector<double>& grid, const char* who) {
  for (double t : grid)
    if (!(t >= 0.0 && std::isfinite(t))) throw DomainError(std::string(who) + ": times must be finite and >= 0");
}

double branch_probability(const Reduced& r, Branch b, const char* who) {
  const double p = r.trace(r.branch(b) * r.ss);
  if (!(p > kMinBranchProb)) throw DomainError(std::string(who) + ": conditioning branch has zero probability");
  return p;
}

// First block column of a block-lower-triangular Toeplitz matrix.
using Toeplitz = std::vector<Matrix>;

Toeplitz toeplitz_product(const Toeplitz& a, const Toeplitz& b) {
  Toeplitz c(a.size(), Matrix::Zero(a[0].rows(), a[0].cols()));
  for (std::size_t m = 0; m < a.size(); ++m)
    for (std::size_t j = 0; j <= m; ++j) c[m].noalias() += a[m - j] * b[j];
  return c;
}

// exp of the generator with diagonal block d and subdiagonal block s.
Toeplitz toeplitz_exp(const Matrix& d, const Matrix& s, int blocks) {
  const double norm = norm1(d) + norm1(s);
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const Matrix ds = d * scale, ss = s * scale;
  const Eigen::Index n = d.rows();
  Toeplitz sum(blocks, Matrix::Zero(n, n)), term(blocks, Matrix::Zero(n, n));
  sum[0].setIdentity();
  term[0].setIdentity();
  for (int k = 1; k < 40; ++k) {
    Toeplitz next(blocks, Matrix::Zero(n, n));
    for (int m = 0; m < blocks; ++m) {
      next[m].noalias() = term[m] * ds;
      if (m > 0) next[m].noalias() += term[m - 1] * ss;
      next[m] /= static_cast<double>(k);
    }
    term.swap(next);
    double size = 0.0;
    for (int m = 0; m < blocks; ++m) {
      sum[m] += term[m];
      size = std::max(size, term[m].cwiseAbs().maxCoeff());
    }
    if (size < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) sum = toeplitz_product(sum, sum);
  return sum;
}

}  // namespace

Branch first_branch(ClickPair p) {
  return (p == ClickPair::down_down || p == ClickPair::down_up) ? Branch::down : Branch::up;
}

Branch second_branch(ClickPair p) {
  return (p == ClickPair::down_down || p == ClickPair::up_down) ? Branch::down : Branch::up;
}

std::pair<double, double> apriori_click_probs(const KickPair& kick, const DensityMatrix& rho_ss,
                                              const DetectionConfig& cfg) {
  cfg.validate();
  return {cfg.eta_down * kick.A.apply(rho_ss.op()).trace().real(),
          cfg.eta_up * kick.B.apply(rho_ss.op()).trace().real()};
}

CorrelationCurve correlation(ClickPair pair, const SuperOperator& L0, const KickPair& kick,
                             const DensityMatrix& rho_ss, const std::vector<double>& t_grid) {
  require_times(t_grid, "correlation");
  const Reduced r(L0, kick, &rho_ss.op());
  const Matrix& x = r.branch(first_branch(pair));
  const Matrix& y = r.branch(second_branch(pair));
  const double px = branch_probability(r, first_branch(pair), "correlation");
  const double py = branch_probability(r, second_branch(pair), "correlation");
  const RowVector yrow = r.tr * y;
  const Vector xs = x * r.ss;
  CorrelationCurve out;
  out.pair = pair;
  out.t = t_grid;
  for (double t : t_grid) out.values.push_back((yrow * evolve(r.L0, t, xs))(0).real() / (px * py));
  return out;
}

WaitingTime::WaitingTime(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg, Branch from,
                         Branch watched) {
  cfg.validate();
  const Reduced r(L0, kick);
  const double py = branch_probability(r, from, "waiting time");
  const double rate = cfg.rate * cfg.eta(watched);
  leta_ = r.L0 - rate * r.branch(watched);
  rho0_ = r.branch(from) * r.ss / py;
  trace_row_ = r.tr;
  click_row_ = rate * (r.tr * r.branch(watched));

  const auto bd = birth_death_spectrum(leta_);
  if (!bd || bd->shift != 0.0) return;
  const Matrix q = bd->q.cast<cplx>();
  const Eigen::RowVectorXcd scale = bd->scale.transpose().cast<cplx>();
  spectral_ = true;
  lambda_ = bd->lambda.cast<cplx>();
  weights_ = q.transpose() * rho0_.cwiseQuotient(scale.transpose());
  trace_modes_ = trace_row_.cwiseProduct(scale) * q;
  click_modes_ = click_row_.cwiseProduct(scale) * q;
}

double WaitingTime::no_click(double t) const {
  if (!(t >= 0.0 && std::isfinite(t))) throw DomainError("waiting time: t must be finite and >= 0");
  if (spectral_) return (trace_modes_ * (lambda_ * t).array().exp().matrix().cwiseProduct(weights_))(0).real();
  return (trace_row_ * evolve(leta_, t, rho0_))(0).real();
}

double WaitingTime::density(double t) const {
  if (!(t >= 0.0 && std::isfinite(t))) throw DomainError("waiting time: t must be finite and >= 0");
  if (spectral_) return (click_modes_ * (lambda_ * t).array().exp().matrix().cwiseProduct(weights_))(0).real();
  return (click_row_ * evolve(leta_, t, rho0_))(0).real();
}

Curve no_click_probability(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                           Branch from, Branch watched, const std::vector<double>& t_grid) {
  require_times(t_grid, "no_click_probability");
  const WaitingTime w(L0, kick, cfg, from, watched);
  Curve out{t_grid, {}};
  for (double t : t_grid) out.values.push_back(w.no_click(t));
  return out;
}

Curve waiting_time_density(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                           Branch from, Branch watched, const std::vector<double>& t_grid) {
  cfg.validate();
  require_times(t_grid, "waiting_time_density");
  if (!(cfg.eta(watched) > 0.0)) throw DomainError("waiting_time_density: watched detector has zero efficiency");
  const WaitingTime w(L0, kick, cfg, from, watched);
  Curve out{t_grid, {}};
  for (double t : t_grid) out.values.push_back(w.density(t));
  return out;
}

CountingDistribution counting_distribution(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                                           double t, int n_max) {
  cfg.validate();
  if (n_max < 1) throw DomainError("counting_distribution: n_max must be >= 1");
  if (!(t >= 0.0 && std::isfinite(t))) throw DomainError("counting_distribution: t must be finite and >= 0");
  const Reduced r(L0, kick);
  const Matrix rc = cfg.rate * r.click(cfg);
  const Toeplitz w = toeplitz_exp((r.L0 - rc) * t, rc * t, n_max + 1);
  CountingDistribution out;
  out.t = t;
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    out.probs.push_back(r.trace(w[n] * r.ss));
    total += out.probs.back();
  }
  out.truncation_mass = 1.0 - total;
  if (out.truncation_mass > 1e-6) throw ConvergenceError("counting_distribution: n_max too small for this t");
  return out;
}

double counting_generating_function(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                                    double t, double x) {
  cfg.validate();
  const Reduced r(L0, kick);
  return r.trace(evolve(r.L0 - (1.0 - x) * cfg.rate * r.click(cfg), t, r.ss));
}

double mean_count(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg, double t) {
  cfg.validate();
  const Reduced r(L0, kick);
  return cfg.rate * t * r.trace(r.click(cfg) * r.ss);
}

double second_factorial_moment(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg, double t) {
  cfg.validate();
  if (!(t > 0.0 && std::isfinite(t))) throw DomainError("second_factorial_moment: t must be positive");
  const Reduced r(L0, kick);
  const Matrix c = r.click(cfg);
  const Matrix e = 2.0 * phi_matrix(r.L0 * t, 2);
  const double rt = cfg.rate * t;
  return rt * rt * r.trace(c * (e * (c * r.ss)));
}

Curve fano_mandel(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                  const std::vector<double>& t_grid) {
  Curve out{t_grid, {}};
  for (double t : t_grid) {
    const double mean = mean_count(L0, kick, cfg, t);
    if (!(mean > 0.0)) throw DomainError("fano_mandel: zero mean count");
    out.values.push_back(second_factorial_moment(L0, kick, cfg, t) / mean - mean);
  }
  return out;
}

SuperOperator perturbation_slice(const SuperOperator& F, const SuperOperator& dF, int quad_points) {
  if (quad_points < 8) throw DomainError("perturbation_slice: need at least 8 quadrature points");
  if (F.dim() != dF.dim()) throw DimensionMismatch("perturbation_slice: dims differ");
  std::vector<double> nodes, weights;
  for (double x : boost::math::legendre_p_zeros<double>(quad_points)) {
    const double dp = boost::math::legendre_p_prime(quad_points, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes.push_back(x);
    weights.push_back(w);
    if (x != 0.0) {
      nodes.push_back(-x);
      weights.push_back(w);
    }
  }
  SuperOperator out = SuperOperator::zero(F.dim());
  if (!(F.is_sectored() && dF.is_sectored())) out = out.as_dense();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double tau = 0.5 * (nodes[i] + 1.0);
    out += cplx(0.5 * weights[i]) * (exp_super(F, tau) * dF * exp_super(F, 1.0 - tau));
  }
  return out;
}

}  // namespace qdamp
