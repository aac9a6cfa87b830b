#pragma once

#include <vector>

#include "qdamp/fock.hpp"
#include "qdamp/liouvillian.hpp"
#include "qdamp/superoperator.hpp"

namespace qdamp {

enum class Branch { down, up };

/// Effect of one atom: A for the atom leaving in the lower level, B for the upper level.
struct KickPair {
  SuperOperator A;
  SuperOperator B;

  const SuperOperator& branch(Branch b) const { return b == Branch::down ? A : B; }
  /// A + B - 1
  SuperOperator net() const;
};

struct DetectionConfig {
  double eta_down = 0.0;
  double eta_up = 0.0;
  double rate = 1.0;
  void validate() const;
  double eta(Branch b) const { return b == Branch::down ? eta_down : eta_up; }
};

/// A: rho -> a^+ s rho s a, s = sin(phi sqrt(aa^+))/sqrt(aa^+);  B: rho -> c rho c, c = cos(phi sqrt(aa^+)).
KickPair jc_kick(double phi, int dim);
/// Projections onto even (A) and odd (B) photon number.
KickPair parity_kick(int dim);
/// A = q 1, B = (1 - q) 1.
KickPair trivial_kick(double q, int dim);
/// K rho = p (a^+ g rho g a + P rho P - rho), g = (aa^+)^{-1/2}, P the projector on the top level.
SuperOperator one_photon_kick(double p, int dim);

/// L + r (A + B - 1)
SuperOperator scully_lamb(const OscillatorParams& p, const KickPair& kick, double rate, int dim);
/// eta_down A + eta_up B
SuperOperator click_operator(const KickPair& kick, const DetectionConfig& cfg);
/// L0 - r (eta_down A + eta_up B)
SuperOperator conditional_liouvillian(const SuperOperator& L0, const DetectionConfig& cfg, const KickPair& kick);

struct NormalizedState {
  DensityMatrix rho;
  double no_click_prob;
};

/// e^{Leta t} rho0 normalized, together with its trace. Throws UnderflowError below 1e-300.
NormalizedState propagate_normalized(const SuperOperator& Leta, const DensityMatrix& rho0, double t);
/// branch(rho)/Tr{branch(rho)}; throws ImpossibleOutcome when the trace is below 1e-14.
DensityMatrix reduce_state(const DensityMatrix& rho, Branch branch, const KickPair& kick);

/// Unit-trace null vector of S. Uses the diagonal sector when S is sectored.
DensityMatrix steady_state(const SuperOperator& s);

struct KickedSeries {
  std::vector<double> t;
  std::vector<double> mean_number;
  std::vector<FockOperator> pre_kick;  // state just before each kick
};

/// Kicks at t = 0, T, 2T, ...; samples <a^+ a> at samples_per_period points inside each period.
KickedSeries periodic_kick_evolve(const SuperOperator& L, const SuperOperator& K, double T, const DensityMatrix& rho0,
                                  int periods, int samples_per_period);
/// Fixed point of e^{LT}(1 + K), the state just before a kick.
DensityMatrix cyclic_steady_state(const SuperOperator& L, const SuperOperator& K, double T);
/// (1/T) int_0^T rho_t dt for the cycle starting from rho(-0).
FockOperator period_average(const SuperOperator& L, const SuperOperator& K, double T, const FockOperator& pre_kick);

/// L + K L/(1 - e^{-LT}), evaluated as L + K phi_1(-LT)^{-1}/T.
SuperOperator time_averaged_rhs(const SuperOperator& L, const SuperOperator& K, double T);

/// K_{n,n'}^{(k,k')} = Tr{left_n^(k) K right_n'^(k')}; index (k + k_max)(n_max + 1) + n.
struct KickMatrix {
  int n_max = 0;
  int k_max = 0;
  Matrix entries;
  int index(int n, int k) const { return (k + k_max) * (n_max + 1) + n; }
  cplx at(int n, int k, int n2, int k2) const { return entries(index(n, k), index(n2, k2)); }
};

KickMatrix kick_matrix(const SuperOperator& K, double nu, int n_max, int k_max);
/// Generator of the time-averaged coefficient equations: lambda_n^(k) delta + K lambda'/(1 - e^{-lambda' T}).
Matrix mode_generator(const KickMatrix& km, const OscillatorParams& p, double T);

}  // namespace qdamp
