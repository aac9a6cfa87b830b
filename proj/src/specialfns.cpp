#include "qdamp/specialfns.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "qdamp/errors.hpp"

namespace qdamp {

double laguerre(int n, int k, double x) {
  if (n < 0 || k < 0) throw DomainError("laguerre: degree and superscript must be nonnegative");
  if (!std::isfinite(x)) throw DomainError("laguerre: non-finite argument");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + k - x;
  for (int m = 1; m < n; ++m) {
    const double next = ((2.0 * m + k + 1.0 - x) * cur - (m + k) * prev) / (m + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double bessel_j(int k, double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_j: non-finite argument");
  const int n = std::abs(k);
  // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x)
  const double sign = ((k < 0) != (x < 0)) && (n % 2 == 1) ? -1.0 : 1.0;
  const double ax = std::abs(x);
  if (ax == 0.0) return n == 0 ? 1.0 : 0.0;

  const int scale = std::max(n, static_cast<int>(ax));
  const int start = 2 * ((scale + 20 + static_cast<int>(std::sqrt(40.0 * scale))) / 2);
  constexpr double kBig = 1e250;

  double upper = 0.0;  // t_{j+1}
  double cur = 1.0;    // t_j, starting at j = start (even)
  double sum = 2.0 * cur;
  double result = (start == n) ? cur : 0.0;
  for (int j = start; j > 0; --j) {
    const double lower = j * (2.0 / ax) * cur - upper;
    upper = cur;
    cur = lower;
    const int index = j - 1;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      upper /= kBig;
      sum /= kBig;
      result /= kBig;
    }
    if (index == n) result = cur;
    if (index == 0) {
      sum += cur;
    } else if (index % 2 == 0) {
      sum += 2.0 * cur;
    }
  }
  return sign * result / sum;
}

double bessel_i(int k, double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_i: non-finite argument");
  const int n = std::abs(k);
  const double half = 0.5 * x;
  // leading term (x/2)^n / n!
  double term = 1.0;
  for (int m = 1; m <= n; ++m) term *= half / m;
  double sum = term;
  const double q = half * half;
  for (int m = 1; m < 10000; ++m) {
    term *= q / (static_cast<double>(m) * (m + n));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace qdamp
