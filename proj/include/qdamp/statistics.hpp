#pragma once

#include <utility>
#include <vector>

#include "qdamp/micromaser.hpp"

namespace qdamp {

/// Ordered click pair: the first click conditions, the second is observed after time t.
enum class ClickPair { down_down, down_up, up_down, up_up };

Branch first_branch(ClickPair p);
Branch second_branch(ClickPair p);

struct Curve {
  std::vector<double> t;
  std::vector<double> values;
};

struct CorrelationCurve : Curve {
  ClickPair pair = ClickPair::down_down;
};

struct CountingDistribution {
  double t = 0.0;
  std::vector<double> probs;  // w_0 .. w_n_max
  double truncation_mass = 0.0;
};

/// (eta_down Tr{A rho}, eta_up Tr{B rho}), click probabilities per atom.
std::pair<double, double> apriori_click_probs(const KickPair& kick, const DensityMatrix& rho_ss,
                                              const DetectionConfig& cfg);

/// G(t) = Tr{Y e^{L0 t} X rho} / (Tr{Y rho} Tr{X rho}) for the pair (X, Y).
CorrelationCurve correlation(ClickPair pair, const SuperOperator& L0, const KickPair& kick,
                             const DensityMatrix& rho_ss, const std::vector<double>& t_grid);

/// Waiting-time quantities for the watched detector after a `from` click, prepared once for many times.
/// Diagonalizes Leta by a symmetrizing similarity when it is a real birth-death block, uses the matrix exponential otherwise.
class WaitingTime {
 public:
  WaitingTime(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg, Branch from, Branch watched);
  /// Tr{e^{Leta t} rho0}
  double no_click(double t) const;
  /// r eta Tr{X e^{Leta t} rho0}
  double density(double t) const;

 private:
  Matrix leta_;
  Vector rho0_;
  Eigen::RowVectorXcd trace_row_;
  Eigen::RowVectorXcd click_row_;
  bool spectral_ = false;
  Vector lambda_;
  Vector weights_;
  Eigen::RowVectorXcd trace_modes_;
  Eigen::RowVectorXcd click_modes_;
};

/// Probability of no click of the watched detector before t after a `from` click, Tr{e^{Leta t} rho0}.
Curve no_click_probability(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                           Branch from, Branch watched, const std::vector<double>& t_grid);
/// P_next(t) = r eta Tr{X e^{(L0 - r eta X) t} Y rho_ss}/Tr{Y rho_ss}, X = watched, Y = from.
/// Only the watched detector's efficiency enters.
Curve waiting_time_density(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                           Branch from, Branch watched, const std::vector<double>& t_grid);

/// Counting probabilities of clicks registered by C = eta_down A + eta_up B, started in the steady state of L0.
/// Solves d rho_m/dt = Leta rho_m + r C rho_(m-1) by one block-triangular exponential.
/// Throws ConvergenceError when the mass beyond n_max exceeds 1e-6.
CountingDistribution counting_distribution(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                                           double t, int n_max);
/// sum_n x^n w_n(t) = Tr{e^{(Leta + x r C) t} rho_ss}
double counting_generating_function(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                                    double t, double x);

/// sum_n n w_n(t) = r t Tr{C rho_ss}
double mean_count(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg, double t);
/// sum_n n(n-1) w_n(t) = (r t)^2 Tr{C E(L0 t) C rho_ss}, E(y) = 2(e^y - 1 - y)/y^2.
double second_factorial_moment(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg, double t);
/// Q(t) = second factorial moment / mean - mean.
Curve fano_mandel(const SuperOperator& L0, const KickPair& kick, const DetectionConfig& cfg,
                  const std::vector<double>& t_grid);

/// int_0^1 e^{tau F} dF e^{(1 - tau) F} d tau by Gauss-Legendre quadrature.
SuperOperator perturbation_slice(const SuperOperator& F, const SuperOperator& dF, int quad_points);

}  // namespace qdamp
