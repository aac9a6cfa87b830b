#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qdamp/errors.hpp"
#include "qdamp/liouvillian.hpp"

using namespace qdamp;

namespace {

Matrix random_matrix(int dim, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = cplx(g(gen), g(gen));
  return m;
}

FockOperator random_state(int dim, int support, std::mt19937_64& gen) {
  Matrix g = random_matrix(dim, gen);
  g.bottomRows(dim - support).setZero();
  return DensityMatrix::normalized(FockOperator(g * g.adjoint())).op();
}

}  // namespace

TEST_CASE("direct construction matches bracket sandwiches") {
  for (double nu : {0.0, 1.5}) {
    const int d = 9;
    const OscillatorParams p{1.3, 0.8, nu};
    const FockOperator a = annihilation(d), ad = creation(d), n = number(d), nn = anti_number(d);
    const cplx i(0.0, 1.0);
    const SuperOperator ref = (i * p.omega) * (superop_right(n) - superop_left(n)) -
                              (0.5 * p.A * (nu + 1.0)) * (superop_left(n) - 2.0 * superop_sandwich(a, ad) + superop_right(n)) -
                              (0.5 * p.A * nu) * (superop_left(nn) - 2.0 * superop_sandwich(ad, a) + superop_right(nn));
    CHECK((build_liouvillian(p, d) - ref).max_abs() < 1e-13);
    std::mt19937_64 gen(8);
    const FockOperator x(random_matrix(d, gen));
    CHECK((liouvillian_action(x, p) - ref.apply(x)).max_abs() < 1e-12);
  }
  CHECK(std::abs(anti_number(4)(3, 3)) == 0.0);
  CHECK(std::abs(anti_number(4)(2, 2) - 3.0) < 1e-15);
}

TEST_CASE("thermal state is stationary") {
  for (double nu : {0.0, 0.5, 2.0}) {
    const int d = thermal_required_dim(nu) + 5;
    const SuperOperator l = build_liouvillian(OscillatorParams{1.1, 1.0, nu}, d);
    CHECK(l.apply(thermal_state(nu, d).op()).max_abs() < 1e-10);
  }
}

TEST_CASE("trace annihilation and number dynamics") {
  const int d = 20;
  const OscillatorParams p{0.9, 1.3, 0.8};
  const SuperOperator l = build_liouvillian(p, d);
  std::mt19937_64 gen(1);
  std::vector<FockOperator> xs;
  for (int i = 0; i < 10; ++i) xs.emplace_back(random_matrix(d, gen));
  CHECK(trace_defect(l, xs) < 1e-10);

  const FockOperator rho = random_state(d, d - 4, gen);
  const double n0 = trace_product(number(d), rho).real();
  const cplx dn = trace_product(number(d), l.apply(rho));
  CHECK(std::abs(dn - (-p.A * (n0 - p.nu))) < 1e-9);
}

TEST_CASE("left action") {
  const int d = 12;
  const OscillatorParams p{0.7, 1.0, 1.5};
  CHECK(left_action(FockOperator::identity(d), p).max_abs() < 1e-13);

  const FockOperator n = number(d);
  const FockOperator expected = (-p.A) * (n - p.nu * FockOperator::identity(d));
  // exact except at the top level, where the ceiling stops upward flow
  CHECK(interior_max_abs(left_action(n, p) - expected, d - 1) < 1e-12);

  const SuperOperator l = build_liouvillian(p, d);
  std::mt19937_64 gen(2);
  {
    // bracket form of the left action written out with matrix products
    const Matrix x = random_matrix(d, gen);
    const Matrix a = annihilation(d).matrix(), ad = a.adjoint(), nm = number(d).matrix(), nn = anti_number(d).matrix();
    const Matrix ref = cplx(0.0, p.omega) * (nm * x - x * nm) -
                       0.5 * p.A * (p.nu + 1.0) * (x * nm - 2.0 * ad * x * a + nm * x) -
                       0.5 * p.A * p.nu * (x * nn - 2.0 * a * x * ad + nn * x);
    CHECK((left_action(FockOperator(x), p).matrix() - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
  for (int i = 0; i < 20; ++i) {
    const FockOperator x(random_matrix(d, gen));
    const FockOperator rho(random_matrix(d, gen));
    CHECK(std::abs(trace_product(left_action(x, p), rho) - trace_product(x, l.apply(rho))) < 1e-11 * 100);
    CHECK((left_action(x, p) - l.apply_left(x)).max_abs() < 1e-12);
  }
}

TEST_CASE("eigenvalue ladder") {
  const OscillatorParams p{3.0, 2.0, 0.0};
  CHECK(eigenvalue(0, 0, p) == cplx(0.0));
  CHECK(eigenvalue(1, 0, p) == cplx(-2.0));
  CHECK(eigenvalue(0, 1, p) == cplx(-1.0, -3.0));
  CHECK(eigenvalue(2, -3, p) == cplx(-7.0, 9.0));
  CHECK_THROWS_AS(eigenvalue(-1, 0, p), DomainError);
}

TEST_CASE("small-dim spectrum has no growing modes") {
  const OscillatorParams p{1.0, 1.0, 0.5};
  for (cplx ev : eigenvalues(build_liouvillian(p, 10))) CHECK(ev.real() <= 1e-10);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_liouvillian(OscillatorParams{1.0, 0.0, 0.0}, 5), DomainError);
  CHECK_THROWS_AS(build_liouvillian(OscillatorParams{1.0, 1.0, -0.1}, 5), DomainError);
}

TEST_CASE("lindblad form reproduces the damped oscillator") {
  const int d = 16;
  const OscillatorParams p{1.4, 0.9, 2.0};
  LindbladSpec spec{p.omega * number(d),
                    {std::sqrt(0.5 * p.A * (p.nu + 1.0)) * creation(d), std::sqrt(0.5 * p.A * p.nu) * annihilation(d)}};
  CHECK((build_lindblad(spec) - build_liouvillian(p, d)).max_abs() < 1e-12);

  // the opposite pairing of weights does not
  LindbladSpec swapped{p.omega * number(d),
                       {std::sqrt(0.5 * p.A * (p.nu + 1.0)) * annihilation(d), std::sqrt(0.5 * p.A * p.nu) * creation(d)}};
  CHECK((build_lindblad(swapped) - build_liouvillian(p, d)).max_abs() > 0.1);

  CHECK(build_lindblad(LindbladSpec{FockOperator::zero(d), {}}).max_abs() == 0.0);
}

TEST_CASE("lindblad generator is trace-annihilating") {
  const int d = 6;
  std::mt19937_64 gen(4);
  const FockOperator h(random_matrix(d, gen));
  const SuperOperator l = build_lindblad(
      LindbladSpec{h + h.adjoint(), {FockOperator(random_matrix(d, gen)), FockOperator(random_matrix(d, gen))}});
  std::vector<FockOperator> xs;
  for (int i = 0; i < 5; ++i) xs.emplace_back(random_matrix(d, gen));
  CHECK(trace_defect(l, xs) < 1e-10);
  CHECK_THROWS_AS(build_lindblad(LindbladSpec{FockOperator(random_matrix(d, gen)), {}}), DomainError);
}

TEST_CASE("non-Lindblad equation violates positivity") {
  const int d = 6;
  Vector psi0 = Vector::Zero(d);
  psi0(1) = 1.0;
  const FockOperator v = creation(d);
  CHECK(non_lindblad_demo(v, psi0, 0.0) == 0.0);
  const double p4 = non_lindblad_demo(v, psi0, 1e-4);
  CHECK(std::abs(p4 + 2e-4) < 1e-7);
  const double p5 = non_lindblad_demo(v, psi0, 1e-5);
  CHECK(std::abs((p4 - p5) / (1e-4 - 1e-5) + 2.0) < 1e-3);

  Vector bad = Vector::Zero(d);
  bad(0) = 1.0;
  bad(1) = 1.0;
  CHECK_THROWS_AS(non_lindblad_demo(v, bad, 1e-3), DomainError);
}

TEST_CASE("detailed balance recurrence") {
  const OscillatorParams p{0.0, 1.0, 1.0};
  const int d = thermal_required_dim(1.0);
  CHECK(detailed_balance_residual(thermal_state(1.0, d).op(), p) < 1e-12);
  CHECK(detailed_balance_residual(FockOperator::identity(10) * (1.0 / 10), p) > 0.01);

  const double lam = 0.3;
  const int dd = 12;
  const FockOperator f = FockOperator::diagonal(dd, [lam](int n) { return lam * std::pow(1 - lam, n); });
  double worst = 0.0;
  for (int m = 0; m + 1 < dd; ++m) {
    const double fm = lam * std::pow(1 - lam, m), fp = lam * std::pow(1 - lam, m + 1);
    const double fmm = m > 0 ? lam * std::pow(1 - lam, m - 1) : 0.0;
    worst = std::max(worst, std::abs((m + 1) * (2 * fp - fm) - m * (2 * fm - fmm)));
  }
  CHECK(detailed_balance_residual(f, p) == doctest::Approx(worst).epsilon(1e-12));
  CHECK_THROWS_AS(detailed_balance_residual(annihilation(4), p), DomainError);
}
