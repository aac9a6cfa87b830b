#pragma once

#include <vector>

#include "qdamp/fock.hpp"
#include "qdamp/superoperator.hpp"

namespace qdamp {

struct OscillatorParams {
  double omega = 0.0;  // rad per unit time
  double A = 1.0;      // energy decay rate
  double nu = 0.0;     // thermal occupation
  void validate() const;
};

struct LindbladSpec {
  FockOperator H;
  std::vector<FockOperator> jump_ops;
};

/// Matrix product a a^dagger on the truncated space (top entry 0).
FockOperator anti_number(int dim);

/// i w [rho, n] - (A/2)(nu+1)(n rho - 2 a rho a^+ + rho n) - (A/2) nu (aa^+ rho - 2 a^+ rho a + rho aa^+)
SuperOperator build_liouvillian(const OscillatorParams& p, int dim);
/// L rho by direct matrix products, without forming the superoperator.
FockOperator liouvillian_action(const FockOperator& rho, const OscillatorParams& p);
/// X L, the action to the left.
FockOperator left_action(const FockOperator& x, const OscillatorParams& p);
/// -i k w - (n + |k|/2) A
cplx eigenvalue(int n, int k, const OscillatorParams& p);

/// i[rho, H] + sum_j ([V_j^+, rho V_j] + [V_j^+ rho, V_j])
SuperOperator build_lindblad(const LindbladSpec& spec);

/// Evolves |psi0><psi0| for dt under d rho/dt = V V^+ rho - 2 V^+ rho V + rho V V^+
/// and returns <psi1|rho|psi1>/<psi1|psi1> with psi1 = V^+ psi0.
double non_lindblad_demo(const FockOperator& v, const Vector& psi0, double dt);

/// max_m |(m+1)[(nu+1)f(m+1) - nu f(m)] - m[(nu+1)f(m) - nu f(m-1)]| for m = 0..dim-2.
double detailed_balance_residual(const FockOperator& f, const OscillatorParams& p);

/// max |X(i,j)| over i, j < limit.
double interior_max_abs(const FockOperator& x, int limit);

}  // namespace qdamp
