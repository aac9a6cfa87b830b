#include "qdamp/liouvillian.hpp"

#include <cmath>
#include <string>

#include "qdamp/errors.hpp"

namespace qdamp {

void OscillatorParams::validate() const {
  if (!std::isfinite(omega)) throw DomainError("omega must be finite");
  if (!(A > 0.0) || !std::isfinite(A)) throw DomainError("A must be positive and finite");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("nu must be >= 0 and finite");
}

FockOperator anti_number(int dim) {
  const FockOperator a = annihilation(dim);
  return a * a.adjoint();
}

SuperOperator build_liouvillian(const OscillatorParams& p, int dim) {
  p.validate();
  // (L rho)(i,j) = -i k w rho(i,j) - (A/2)(nu+1)[(i+j) rho(i,j) - 2 sqrt((i+1)(j+1)) rho(i+1,j+1)]
  //               - (A/2) nu [(N_i+N_j) rho(i,j) - 2 sqrt(ij) rho(i-1,j-1)],  N = diag(a a^+)
  SuperOperator l = SuperOperator::zero(dim);
  const double up = 0.5 * p.A * (p.nu + 1.0);
  const double dn = 0.5 * p.A * p.nu;
  auto nn = [dim](int i) { return i + 1 < dim ? double(i + 1) : 0.0; };
  for (int k = 1 - dim; k < dim; ++k) {
    Matrix& m = l.sector(k);
    const int j0 = k < 0 ? -k : 0;
    const int len = static_cast<int>(m.rows());
    for (int s = 0; s < len; ++s) {
      const int i = j0 + s + k, j = j0 + s;
      m(s, s) = cplx(-up * (i + j) - dn * (nn(i) + nn(j)), -k * p.omega);
      if (s + 1 < len) m(s, s + 1) = 2.0 * up * std::sqrt(double(i + 1) * (j + 1));
      if (s > 0) m(s, s - 1) = 2.0 * dn * std::sqrt(double(i) * j);
    }
  }
  return l;
}

namespace {

// shared entrywise form; `down` multiplies the a X a^+ neighbour, `up` the a^+ X a neighbour
FockOperator damped_action(const FockOperator& x, const OscillatorParams& p, double sign, double w_down,
                           double w_up) {
  p.validate();
  const int dim = x.dim();
  const double up = 0.5 * p.A * (p.nu + 1.0);
  const double dn = 0.5 * p.A * p.nu;
  auto nn = [dim](int i) { return i + 1 < dim ? double(i + 1) : 0.0; };
  Matrix out(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) {
      cplx v = cplx(-up * (i + j) - dn * (nn(i) + nn(j)), sign * p.omega * (j - i)) * x(i, j);
      if (i + 1 < dim && j + 1 < dim) v += 2.0 * w_down * std::sqrt(double(i + 1) * (j + 1)) * x(i + 1, j + 1);
      if (i > 0 && j > 0) v += 2.0 * w_up * std::sqrt(double(i) * j) * x(i - 1, j - 1);
      out(i, j) = v;
    }
  return FockOperator(std::move(out));
}

}  // namespace

FockOperator liouvillian_action(const FockOperator& rho, const OscillatorParams& p) {
  return damped_action(rho, p, 1.0, 0.5 * p.A * (p.nu + 1.0), 0.5 * p.A * p.nu);
}

FockOperator left_action(const FockOperator& x, const OscillatorParams& p) {
  return damped_action(x, p, -1.0, 0.5 * p.A * p.nu, 0.5 * p.A * (p.nu + 1.0));
}

cplx eigenvalue(int n, int k, const OscillatorParams& p) {
  if (n < 0) throw DomainError("eigenvalue: n must be >= 0");
  return cplx(-(n + 0.5 * std::abs(k)) * p.A, -k * p.omega);
}

SuperOperator build_lindblad(const LindbladSpec& spec) {
  const int dim = spec.H.dim();
  if (spec.H.hermiticity_defect() > 1e-10) throw DomainError("build_lindblad: H is not Hermitian");
  const cplx i(0.0, 1.0);
  SuperOperator l = i * (superop_right(spec.H) - superop_left(spec.H));
  for (const auto& v : spec.jump_ops) {
    if (v.dim() != dim) throw DimensionMismatch("build_lindblad: jump operator dim differs from H");
    const FockOperator vvd = v * v.adjoint();
    l += 2.0 * superop_sandwich(v.adjoint(), v) - superop_left(vvd) - superop_right(vvd);
  }
  return l;
}

double non_lindblad_demo(const FockOperator& v, const Vector& psi0, double dt) {
  if (!std::isfinite(dt) || dt < 0.0) throw DomainError("non_lindblad_demo: dt must be >= 0");
  if (psi0.size() != v.dim()) throw DimensionMismatch("non_lindblad_demo: state and V dims differ");
  const Vector p0 = psi0.normalized();
  const Vector p1 = v.adjoint().matrix() * p0;
  const Vector p2 = v.matrix() * p1;
  if (p1.norm() == 0.0) throw DomainError("non_lindblad_demo: V^+ psi0 vanishes");
  const double scale = p1.norm() * std::max(1.0, p2.norm());
  if (std::abs(p1.dot(p0)) > 1e-12 * p1.norm() || std::abs(p1.dot(p2)) > 1e-12 * scale) {
    throw DomainError("non_lindblad_demo: psi1 must be orthogonal to psi0 and psi2");
  }
  const FockOperator vvd = v * v.adjoint();
  const SuperOperator gen =
      superop_left(vvd) - 2.0 * superop_sandwich(v.adjoint(), v) + superop_right(vvd);
  const FockOperator rho = propagate(gen, FockOperator(p0 * p0.adjoint()), dt);
  return (p1.dot(rho.matrix() * p1)).real() / p1.squaredNorm();
}

double detailed_balance_residual(const FockOperator& f, const OscillatorParams& p) {
  p.validate();
  if (!f.is_diagonal()) throw DomainError("detailed_balance_residual: input must be diagonal");
  const double nu = p.nu;
  auto fv = [&f](int m) { return m < 0 ? cplx(0.0) : f(m, m); };
  double worst = 0.0;
  for (int m = 0; m + 1 < f.dim(); ++m) {
    const cplx lhs = double(m + 1) * ((nu + 1.0) * fv(m + 1) - nu * fv(m));
    const cplx rhs = double(m) * ((nu + 1.0) * fv(m) - nu * fv(m - 1));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double interior_max_abs(const FockOperator& x, int limit) {
  limit = std::min(limit, x.dim());
  if (limit <= 0) throw DomainError("interior_max_abs: empty interior block");
  return x.matrix().topLeftCorner(limit, limit).cwiseAbs().maxCoeff();
}

}  // namespace qdamp
