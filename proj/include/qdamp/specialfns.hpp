#pragma once

namespace qdamp {

/// Generalized Laguerre polynomial L_n^(k)(x), upward three-term recurrence.
double laguerre(int n, int k, double x);

/// Bessel function of the first kind J_k(x) for integer k, by Miller's
/// downward recurrence normalized with J_0 + 2 sum J_2m = 1.
double bessel_j(int k, double x);

/// Modified Bessel function I_k(x) for integer k, by its power series.
double bessel_i(int k, double x);

}  // namespace qdamp
