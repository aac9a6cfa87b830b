#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qdamp/micromaser.hpp"

namespace qdamp {

/// Name recorded in output metadata for the random streams used below.
inline constexpr const char* kRngAlgorithm = "mt19937_64 seeded by seed_seq(seed_lo, seed_hi, index_lo, index_hi)";

/// Engine for trajectory `index` of a run with master seed `seed`.
std::mt19937_64 trajectory_stream(std::uint64_t seed, std::uint64_t index);
/// Uniform in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& gen);
/// Exponential with the given rate.
double exponential(std::mt19937_64& gen, double rate);

/// e^{S t} X for many t, prepared lazily per sector.
/// Birth-death sectors use their symmetrized spectrum. Other sectors split the gap into a
/// multiple of h, composed from cached e^{S h 2^j}, and a remainder below h, summed as a
/// Taylor series. Not thread-safe.
class PropagatorLadder {
 public:
  explicit PropagatorLadder(SuperOperator s);
  FockOperator apply(const FockOperator& x, double t) const;
  const SuperOperator& generator() const { return s_; }

 private:
  struct Rungs {
    std::optional<BirthDeathSpectrum> spectrum;
    Matrix gen;
    double h = 1.0;
    std::vector<Matrix> powers;  // e^{gen h 2^j}
  };
  Vector advance(int key, const Vector& v, double t) const;

  SuperOperator s_;
  mutable std::map<int, Rungs> cache_;
};

struct Observer {
  std::string name;
  bool attend_down = false;
  bool attend_up = false;
  double eta_down_eff = 0.0;
  double eta_up_eff = 0.0;
  /// false: reacts to clicks without knowing which detector fired
  bool distinguish = true;

  void validate() const;
  /// Observer attending the chosen detectors with the efficiencies of cfg.
  static Observer attending(std::string name, const DetectionConfig& cfg, bool down, bool up, bool distinguish = true);
};

/// The four standard observers: up clicks only, down clicks only, both, both without distinction.
std::vector<Observer> standard_observers(const DetectionConfig& cfg);

struct ClickRecord {
  double time = 0.0;
  Branch branch = Branch::down;
  bool detected = false;
};

struct ObserverSeries {
  std::string name;
  std::vector<double> t;
  std::vector<double> parity;
  std::vector<double> number;
  /// probability of no attended click since the last attended click
  std::vector<double> no_click;
  /// filled when TrajectoryOptions::check_positivity is set
  std::vector<double> min_eigenvalue;
};

struct TrajectoryResult {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  double end_time = 0.0;
  std::vector<ClickRecord> clicks;
  ObserverSeries omniscient;
  std::vector<ObserverSeries> observers;
};

struct TrajectoryOptions {
  /// series sampled at i t_end / samples, i = 0..samples; 0 records nothing
  int samples = 0;
  /// start of every state; the Scully-Lamb steady state when empty
  std::optional<DensityMatrix> initial;
  /// end the run at the first detected click of this branch
  std::optional<Branch> stop_on_detected;
  bool check_positivity = false;
};

struct TrajectoryConfig {
  OscillatorParams oscillator;
  KickPair kick;
  DetectionConfig detection;
  std::vector<Observer> observers;
  TrajectoryOptions options;
};

/// Runs trajectories of one configuration, reusing propagators between runs.
///
/// Atoms arrive as a Poisson process of rate r. Each atom's branch is drawn from the
/// omniscient state, which is reduced for every atom and evolves with L between atoms.
/// Each observer evolves with its own L0 - r(eta_down A + eta_up B), renormalized,
/// and is reduced only by detected clicks it attends.
class TrajectorySimulator {
 public:
  explicit TrajectorySimulator(TrajectoryConfig config);

  TrajectoryResult run(double t_end, std::uint64_t seed, std::uint64_t index = 0) const;
  /// Observer series for a given click list; undetected records are ignored.
  TrajectoryResult replay(const std::vector<ClickRecord>& clicks, double t_end) const;

  const TrajectoryConfig& config() const { return config_; }
  const DensityMatrix& initial_state() const { return initial_; }

 private:
  struct ObserverModel {
    PropagatorLadder ladder;
    SuperOperator click;  // reduction when the observer does not distinguish
  };

  TrajectoryConfig config_;
  DensityMatrix initial_;
  PropagatorLadder between_atoms_;
  std::vector<ObserverModel> models_;
};

TrajectoryResult simulate(const TrajectoryConfig& config, double t_end, std::uint64_t seed);

/// Runs n trajectories with indices 0..n-1; results are ordered by index for any thread count.
std::vector<TrajectoryResult> run_ensemble(const TrajectoryConfig& config, double t_end, std::uint64_t seed, int n,
                                           int threads = 1);

enum class Quantity { parity, number, no_click };

struct EnsembleCurve {
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> std_error;
};

/// Seed average of one sampled quantity; observer -1 selects the omniscient series.
EnsembleCurve ensemble_average(const std::vector<TrajectoryResult>& runs, int observer, Quantity q);
EnsembleCurve ensemble_average(const TrajectoryConfig& config, double t_end, std::uint64_t seed, int n_seeds,
                               int observer, Quantity q, int threads = 1);

/// Kolmogorov-Smirnov statistic sup |F_emp - F| of samples against a distribution function.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf);
/// Critical value of the statistic at the 1% level for n samples.
inline double ks_critical_1pct(int n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace qdamp

#include <algorithm>
#include <cmath>

namespace qdamp {

template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace qdamp
