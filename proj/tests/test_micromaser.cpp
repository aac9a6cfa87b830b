#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qdamp/damping.hpp"
#include "qdamp/errors.hpp"
#include "qdamp/micromaser.hpp"
#include "support.hpp"

using namespace qdamp;
using namespace qdamp::testing;

TEST_CASE("jc kick at zero coupling") {
  const KickPair k = jc_kick(0.0, 12);
  CHECK(k.A.max_abs() == 0.0);
  CHECK((k.B - SuperOperator::identity(12)).max_abs() == 0.0);
}

TEST_CASE("jc kick at weak coupling") {
  const int d = 20;
  std::mt19937_64 gen(3);
  const FockOperator rho = random_density(d, 8, gen).op();
  const FockOperator a = annihilation(d), ad = creation(d), nn = anti_number(d);
  const FockOperator weak = nn * rho - 2.0 * (ad * rho * a) + rho * nn;
  for (double phi : {1e-2, 1e-3}) {
    const FockOperator got = jc_kick(phi, d).net().apply(rho);
    const FockOperator ref = (-0.5 * phi * phi) * weak;
    CHECK(diff(got, ref) / ref.max_abs() < 10.0 * phi * phi);
  }
}

TEST_CASE("kick pairs conserve probability and positivity") {
  const int d = 16;
  std::mt19937_64 gen(11);
  const std::vector<KickPair> kicks = {jc_kick(0.7, d), jc_kick(2.3, d), parity_kick(d), trivial_kick(0.3, d)};
  for (const KickPair& k : kicks) {
    for (int i = 0; i < 20; ++i) {
      const DensityMatrix rho = random_density(d, d, gen);
      CHECK(std::abs((k.A.apply(rho.op()) + k.B.apply(rho.op())).trace() - 1.0) < 1e-10);
      for (const SuperOperator* s : {&k.A, &k.B}) {
        const FockOperator y = s->apply(rho.op());
        const double tr = y.trace().real();
        if (tr > 1e-12) CHECK(DensityMatrix::normalized(y).min_eigenvalue() >= -1e-9);
      }
    }
  }
}

TEST_CASE("parity kick algebra and a priori probabilities") {
  const int d = 16;
  const KickPair k = parity_kick(d);
  CHECK((k.A * k.A - k.A).max_abs() < 1e-15);
  CHECK((k.B * k.B - k.B).max_abs() < 1e-15);
  CHECK((k.A * k.B).max_abs() < 1e-15);

  const double nu = 2.0;
  const int dt = thermal_required_dim(nu, 1e-14);
  const KickPair kt = parity_kick(dt);
  const DensityMatrix ss = thermal_state(nu, dt);
  CHECK(kt.A.apply(ss.op()).trace().real() == doctest::Approx(3.0 / 5.0).epsilon(1e-12));
  CHECK(kt.B.apply(ss.op()).trace().real() == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("scully-lamb generator") {
  const int d = 14;
  const OscillatorParams p{0.9, 1.0, 0.7};
  const SuperOperator par = scully_lamb(p, parity_kick(d), 4.0, d) - build_liouvillian(p, d);
  for (int k = 1 - d; k < d; ++k) {
    const Matrix expect = (k % 2 == 0 ? 0.0 : -4.0) * Matrix::Identity(d - std::abs(k), d - std::abs(k));
    CHECK((par.sector(k) - expect).cwiseAbs().maxCoeff() < 1e-14);
  }

  const SuperOperator L0 = scully_lamb(p, jc_kick(1.1, d), 3.0, d);
  std::mt19937_64 gen(5);
  std::vector<FockOperator> xs;
  for (int i = 0; i < 10; ++i) xs.push_back(FockOperator(random_matrix(d, gen)));
  CHECK(trace_defect(L0, xs) < 1e-12);

  CHECK_THROWS_AS(scully_lamb(p, parity_kick(d), 0.0, d), DomainError);
  CHECK_THROWS_AS(scully_lamb(p, parity_kick(d + 1), 1.0, d), DimensionMismatch);
}

TEST_CASE("maser steady state matches the product formula") {
  const int d = 60;
  for (double nu : {0.0, 0.5}) {
    const double phi = 1.3, r = 6.0;
    const OscillatorParams p{0.0, 1.0, nu};
    const DensityMatrix ss = steady_state(scully_lamb(p, jc_kick(phi, d), r, d));
    std::vector<double> w(d);
    w[0] = 1.0;
    double norm = 1.0;
    for (int n = 1; n < d; ++n) {
      const double s = std::sin(phi * std::sqrt(n)) / std::sqrt(n);
      w[n] = w[n - 1] * (nu / (nu + 1.0) + r / (nu + 1.0) * s * s);
      norm += w[n];
    }
    double err = 0.0;
    for (int n = 0; n < d; ++n) err = std::max(err, std::abs(ss.op()(n, n).real() - w[n] / norm));
    CHECK(err < 1e-12);
    CHECK(ss.op().is_diagonal());
  }
}

TEST_CASE("conditional liouvillian") {
  const int d = 12;
  const OscillatorParams p{0.5, 1.0, 2.0};
  const KickPair k = jc_kick(0.8, d);
  const double r = 5.0;
  const SuperOperator L0 = scully_lamb(p, k, r, d);
  CHECK((conditional_liouvillian(L0, {0.0, 0.0, r}, k) - L0).max_abs() == 0.0);

  const double eta = 0.35;
  const SuperOperator ref = build_liouvillian(p, d) + cplx((1.0 - eta) * r) * k.net();
  const SuperOperator Leq = conditional_liouvillian(L0, {eta, eta, r}, k);
  CHECK((Leq - ref + cplx(eta * r) * SuperOperator::identity(d)).max_abs() < 1e-13);
  const DensityMatrix rho0 = DensityMatrix::fock_state(3, d);
  CHECK(diff(propagate_normalized(Leq, rho0, 0.8).rho.op(), propagate_normalized(ref, rho0, 0.8).rho.op()) < 1e-12);

  const KickPair par = parity_kick(d);
  const SuperOperator Leta = conditional_liouvillian(scully_lamb(p, par, 10.0, d), {0.1, 0.0, 10.0}, par);
  double top = -1e300;
  for (cplx z : eigenvalues(Leta)) top = std::max(top, z.real());
  CHECK(top < 0.0);

  CHECK_THROWS_AS(conditional_liouvillian(L0, {1.2, 0.0, r}, k), DomainError);
  CHECK_THROWS_AS(conditional_liouvillian(L0, {0.1, 0.0, -1.0}, k), DomainError);
}

TEST_CASE("normalized conditional propagation") {
  const double nu = 2.0, r = 10.0;
  const int d = thermal_required_dim(nu, 1e-12);
  const OscillatorParams p{0.0, 1.0, nu};
  const KickPair k = parity_kick(d);
  const SuperOperator L0 = scully_lamb(p, k, r, d);
  std::mt19937_64 gen(2);
  const DensityMatrix rho0 = random_density(d, 10, gen);

  const NormalizedState at0 = propagate_normalized(L0, rho0, 0.0);
  CHECK(at0.no_click_prob == 1.0);
  CHECK(diff(at0.rho.op(), rho0.op()) == 0.0);
  CHECK(std::abs(propagate_normalized(L0, rho0, 1.7).no_click_prob - 1.0) < 1e-12);

  const SuperOperator Leta = conditional_liouvillian(L0, {0.1, 0.0, r}, k);
  const DensityMatrix ss = thermal_state(nu, d);
  double prev = 1.0;
  for (int i = 1; i <= 30; ++i) {
    const NormalizedState s = propagate_normalized(Leta, ss, 0.1 * i);
    CHECK(s.no_click_prob < prev);
    CHECK(s.rho.min_eigenvalue() > -1e-10);
    prev = s.no_click_prob;
  }
  CHECK(propagate_normalized(Leta, ss, 100.0).no_click_prob < 1e-10);

  const KickPair t = trivial_kick(1.0, 6);
  const SuperOperator fast = conditional_liouvillian(scully_lamb({0.0, 1.0, 0.0}, t, 1000.0, 6), {1.0, 1.0, 1000.0}, t);
  CHECK_THROWS_AS(propagate_normalized(fast, DensityMatrix::fock_state(0, 6), 1.0), UnderflowError);
}

TEST_CASE("state reduction") {
  const double nu = 2.0;
  const int d = thermal_required_dim(nu, 1e-14);
  const KickPair k = parity_kick(d);
  const DensityMatrix ss = thermal_state(nu, d);
  const DensityMatrix even = reduce_state(ss, Branch::down, k);
  CHECK(std::abs(expectation(parity(d), even) - 1.0) < 1e-12);
  CHECK_THROWS_AS(reduce_state(even, Branch::up, k), ImpossibleOutcome);

  const int dj = 10;
  const DensityMatrix vac = DensityMatrix::fock_state(0, dj);
  CHECK(jc_kick(1.0, dj).A.apply(vac.op()).trace().real() == doctest::Approx(std::pow(std::sin(1.0), 2)));
  const DensityMatrix one = reduce_state(vac, Branch::down, jc_kick(1.0, dj));
  CHECK(std::abs(one.op()(1, 1) - 1.0) < 1e-14);
  CHECK_THROWS_AS(reduce_state(vac, Branch::down, jc_kick(M_PI, dj)), ImpossibleOutcome);
}

TEST_CASE("periodically kicked oscillator") {
  const int d = 40;
  const double pk = 0.7, T = 0.4;
  const OscillatorParams p{0.0, 1.0, 0.0};
  const SuperOperator L = build_liouvillian(p, d);
  const SuperOperator K = one_photon_kick(pk, d);

  SUBCASE("one-photon kick adds a photon") {
    const FockOperator rho = DensityMatrix::fock_state(3, d).op();
    const FockOperator after = rho + K.apply(rho);
    CHECK(std::abs(after(4, 4) - pk) < 1e-14);
    CHECK(std::abs(after(3, 3) - (1.0 - pk)) < 1e-14);
    const FockOperator top = DensityMatrix::fock_state(d - 1, d).op();
    CHECK((K.apply(top)).max_abs() < 1e-15);
  }

  SUBCASE("no kick decays to the vacuum") {
    const KickedSeries s = periodic_kick_evolve(L, SuperOperator::zero(d), T, DensityMatrix::fock_state(4, d), 60, 4);
    for (std::size_t i = 0; i < s.t.size(); i += 17) CHECK(std::abs(s.mean_number[i] - 4.0 * std::exp(-s.t[i])) < 1e-10);
    CHECK(diff(cyclic_steady_state(L, SuperOperator::zero(d), T).op(), DensityMatrix::fock_state(0, d).op()) < 1e-12);
  }

  SUBCASE("cyclic steady state") {
    const DensityMatrix css = cyclic_steady_state(L, K, T);
    const KickedSeries s = periodic_kick_evolve(L, K, T, DensityMatrix::fock_state(0, d), 150, 8);
    CHECK(diff(s.pre_kick.back(), css.op()) < 1e-8);
    CHECK(diff(s.pre_kick.back(), s.pre_kick[s.pre_kick.size() - 2]) < 1e-9);

    const FockOperator avg = period_average(L, K, T, css.op());
    CHECK(std::abs(avg.trace() - 1.0) < 1e-12);
    CHECK(mean_number(avg) == doctest::Approx(pk / T).epsilon(1e-10));
    CHECK(factorial_moment2(avg) == doctest::Approx(pk / T * pk / std::expm1(T)).epsilon(1e-10));

    double sampled = 0.0;
    const std::size_t first = s.t.size() - 1 - 8;
    for (std::size_t i = first; i < first + 8; ++i) sampled += s.mean_number[i];
    CHECK(std::abs(sampled / 8.0 - pk / T) < 0.05);

    const DensityMatrix averaged = steady_state(time_averaged_rhs(L, K, T));
    CHECK(diff(averaged.op(), avg) < 1e-7);
  }

  SUBCASE("time-averaged generator") {
    const DensityMatrix vac = DensityMatrix::fock_state(0, d);
    CHECK(diff(time_averaged_rhs(L, K, T).apply(vac.op()), K.apply(vac.op()) * cplx(1.0 / T)) < 1e-12);

    const int dj = 20;
    const OscillatorParams pj{0.6, 1.0, 0.4};
    const SuperOperator Lj = build_liouvillian(pj, dj);
    const SuperOperator M = jc_kick(0.9, dj).net();
    const double r = 3.0;
    const SuperOperator ref = Lj + cplx(r) * M;
    const SuperOperator slope = cplx(0.5 * r) * (M * Lj);
    for (double Ts : {1e-3, 1e-4}) {
      const SuperOperator got = time_averaged_rhs(Lj, cplx(r * Ts) * M, Ts);
      CHECK((got - ref - cplx(Ts) * slope).max_abs() / (Ts * slope.max_abs()) < 20.0 * Ts);
    }
    const double Ts = 1e-7;
    CHECK((time_averaged_rhs(Lj, cplx(r * Ts) * M, Ts) - ref).max_abs() / ref.max_abs() < 1e-6);
  }

  CHECK_THROWS_AS(time_averaged_rhs(L, K, 0.0), DomainError);
}

TEST_CASE("kick matrix in the damping bases") {
  const double pk = 0.7, T = 0.4;
  const int n_max = 6;
  const int d = damping_required_dim(2 * n_max, 0.0, 1e-10) + 4;
  const KickMatrix km = kick_matrix(one_photon_kick(pk, d), 0.0, n_max, 0);
  for (int m = 0; m <= n_max; ++m)
    for (int n = 0; n <= n_max; ++n) CHECK(std::abs(km.at(m, 0, n, 0) - (m == n + 1 ? pk : 0.0)) < 1e-12);

  const OscillatorParams p{0.0, 1.0, 0.0};
  Matrix g = mode_generator(km, p, T);
  g.row(0).setZero();
  g(0, 0) = 1.0;
  Vector rhs = Vector::Zero(g.rows());
  rhs(0) = 1.0;
  const Vector alpha = g.fullPivLu().solve(rhs);
  CHECK(std::abs(alpha(1) - pk / T) < 1e-12);
  CHECK(std::abs(alpha(2) - 0.5 * pk / T * pk / std::expm1(T)) < 1e-12);

  const int dp = damping_required_dim(2 * 3 + 1, 2.0, 1e-10);
  const KickMatrix kp = kick_matrix(parity_kick(dp).A, 2.0, 3, 1);
  for (int k = -1; k <= 1; ++k)
    for (int k2 = -1; k2 <= 1; ++k2)
      if (k != k2)
        for (int n = 0; n <= 3; ++n)
          for (int n2 = 0; n2 <= 3; ++n2) CHECK(std::abs(kp.at(n, k, n2, k2)) < 1e-12);

  CHECK_THROWS_AS(kick_matrix(one_photon_kick(pk, 8), 0.0, n_max, 0), TruncationError);
}
