#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qdamp/errors.hpp"
#include "qdamp/specialfns.hpp"

using namespace qdamp;

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return b;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// explicit finite sum, independent of the recurrence; also returns the largest term
double laguerre_sum(int n, int k, double x, double* largest = nullptr) {
  double s = 0.0, big = 0.0;
  for (int m = 0; m <= n; ++m) {
    const double term = binom(n + k, m + k) * std::pow(-x, m) / factorial(m);
    s += term;
    big = std::max(big, std::abs(term));
  }
  if (largest) *largest = big;
  return s;
}

double bessel_j_series(int k, double x) {
  double s = 0.0;
  for (int m = 0; m < 60; ++m) {
    s += std::pow(-1.0, m) * std::pow(0.5 * x, k + 2 * m) / (factorial(m) * factorial(m + k));
  }
  return s;
}

}  // namespace

TEST_CASE("laguerre low orders") {
  CHECK(laguerre(0, 5, 3.7) == 1.0);
  CHECK(laguerre(1, 2, 0.5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(laguerre(2, 0, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("laguerre matches explicit sum") {
  CHECK(std::abs(laguerre(4, 2, 1.3) - laguerre_sum(4, 2, 1.3)) < 1e-12);
  for (int n : {0, 3, 7, 12})
    for (int k : {0, 1, 4})
      for (double x : {0.0, 0.4, 2.5, 6.0}) {
        double big = 0.0;
        const double ref = laguerre_sum(n, k, x, &big);
        CHECK(std::abs(laguerre(n, k, x) - ref) < 1e-13 * std::max(1.0, big));
      }
}

TEST_CASE("laguerre recurrence residual") {
  double worst = 0.0;
  for (int k = 0; k <= 6; ++k)
    for (double x = -50.0; x <= 50.0; x += 2.5)
      for (int n = 1; n < 60; ++n) {
        const double lm = laguerre(n - 1, k, x), l0 = laguerre(n, k, x), lp = laguerre(n + 1, k, x);
        const double lhs = (n + 1) * lp;
        const double rhs = (2 * n + k + 1 - x) * l0 - (n + k) * lm;
        const double scale = std::max({std::abs(lhs), std::abs((2 * n + k + 1 - x) * l0), std::abs((n + k) * lm)});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
      }
  CHECK(worst < 1e-12);
}

TEST_CASE("laguerre rejects negative indices") {
  CHECK_THROWS_AS(laguerre(-1, 0, 1.0), DomainError);
  CHECK_THROWS_AS(laguerre(1, -2, 1.0), DomainError);
}

TEST_CASE("bessel_j values and symmetry") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(3, 0.0) == 0.0);
  CHECK(bessel_j(-3, 2.0) == doctest::Approx(-bessel_j(3, 2.0)).epsilon(1e-15));
  CHECK(bessel_j(-2, 2.0) == doctest::Approx(bessel_j(2, 2.0)).epsilon(1e-15));
  for (int k : {0, 1, 2, 5, 9})
    for (double x : {0.3, 1.5, 4.0, 11.0})
      CHECK(std::abs(bessel_j(k, x) - bessel_j_series(k, x)) < 1e-12);
  CHECK(bessel_j(1, -2.0) == doctest::Approx(-bessel_j(1, 2.0)).epsilon(1e-15));
}

TEST_CASE("bessel_j sum of squares") {
  double s = 0.0;
  for (int k = -40; k <= 40; ++k) s += bessel_j(k, 1.5) * bessel_j(k, 1.5);
  CHECK(std::abs(s - 1.0) < 1e-10);
}

TEST_CASE("bessel_j generating function on the unit circle") {
  const double x = 2.3;
  for (double th : {0.3, 1.1, 2.9}) {
    const std::complex<double> y = std::polar(1.0, th);
    std::complex<double> s = 0.0;
    for (int k = -40; k <= 40; ++k) s += std::pow(y, k) * bessel_j(k, x);
    const std::complex<double> ref = std::exp(0.5 * x * (y - 1.0 / y));
    CHECK(std::abs(s - ref) < 1e-12);
  }
}

TEST_CASE("bessel_i values") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  CHECK(bessel_i(2, 1.0) == bessel_i(-2, 1.0));
  // I_0(1), I_1(2) reference values
  CHECK(bessel_i(0, 1.0) == doctest::Approx(1.2660658777520082).epsilon(1e-14));
  CHECK(bessel_i(1, 2.0) == doctest::Approx(1.5906368546373291).epsilon(1e-14));
}

TEST_CASE("non-finite arguments are rejected") {
  CHECK_THROWS_AS(bessel_j(0, NAN), DomainError);
  CHECK_THROWS_AS(bessel_i(0, INFINITY), DomainError);
  CHECK_THROWS_AS(laguerre(2, 0, NAN), DomainError);
}
