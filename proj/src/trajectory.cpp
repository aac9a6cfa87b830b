#include "qdamp/trajectory.hpp"

#include <thread>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdamp/errors.hpp"

namespace qdamp {

namespace {

constexpr int kDenseKey = 1 << 20;

FockOperator hermitian_part(const FockOperator& x) { return 0.5 * (x + x.adjoint()); }

double real_trace(const FockOperator& x) { return x.trace().real(); }

double parity_value(const FockOperator& rho) {
  double s = 0.0;
  for (int n = 0; n < rho.dim(); ++n) s += (n % 2 == 0 ? 1.0 : -1.0) * rho(n, n).real();
  return s;
}

double number_value(const FockOperator& rho) {
  double s = 0.0;
  for (int n = 1; n < rho.dim(); ++n) s += n * rho(n, n).real();
  return s;
}

double min_eigenvalue(const FockOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho).matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

struct Tracked {
  FockOperator rho;
  double no_click = 1.0;
};

void record(ObserverSeries& s, double t, const Tracked& st, bool positivity) {
  s.t.push_back(t);
  s.parity.push_back(parity_value(st.rho));
  s.number.push_back(number_value(st.rho));
  s.no_click.push_back(st.no_click);
  if (positivity) s.min_eigenvalue.push_back(min_eigenvalue(st.rho));
}

/// Propagates and renormalizes; accumulates the trace into the no-click probability.
void advance(Tracked& st, const PropagatorLadder& ladder, double dt) {
  if (dt <= 0.0) return;
  FockOperator y = ladder.apply(st.rho, dt);
  const double tr = real_trace(y);
  if (!(tr > 1e-300)) throw UnderflowError("trajectory: no-click probability underflow");
  st.no_click *= tr;
  st.rho = y * cplx(1.0 / tr);
}

void reduce(Tracked& st, const SuperOperator& op) {
  const FockOperator y = op.apply(st.rho);
  const double tr = real_trace(y);
  if (!(tr > 1e-14)) throw ImpossibleOutcome("trajectory: click of zero probability");
  st.rho = hermitian_part(y) * cplx(1.0 / tr);
  st.no_click = 1.0;
}

bool attends(const Observer& o, Branch b) { return b == Branch::down ? o.attend_down : o.attend_up; }

}  // namespace

std::mt19937_64 trajectory_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& gen, double rate) { return -std::log1p(-uniform01(gen)) / rate; }

PropagatorLadder::PropagatorLadder(SuperOperator s) : s_(std::move(s)) {}

Vector PropagatorLadder::advance(int key, const Vector& v, double t) const {
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    Rungs r;
    r.gen = key == kDenseKey ? s_.to_dense() : s_.sector(key);
    r.spectrum = birth_death_spectrum(r.gen);
    const double norm = r.gen.cwiseAbs().colwise().sum().maxCoeff();
    r.h = 1.0;
    while (r.h * norm > 0.5) r.h *= 0.5;
    while (r.h * norm < 0.25 && r.h < 1.0) r.h *= 2.0;
    r.powers.push_back((r.gen * r.h).exp());
    it = cache_.emplace(key, std::move(r)).first;
  }
  Rungs& r = it->second;
  if (r.spectrum) return evolve(*r.spectrum, v, t);
  double steps = std::floor(t / r.h);
  const double rest = t - steps * r.h;
  Vector out = v;
  for (std::size_t j = 0; steps > 0.0; ++j, steps = std::floor(steps / 2)) {
    if (j == r.powers.size()) r.powers.push_back(r.powers.back() * r.powers.back());
    if (std::fmod(steps, 2.0) == 1.0) out = r.powers[j] * out;
  }
  if (rest > 0.0) {
    Vector term = out;
    const double scale = out.cwiseAbs().maxCoeff();
    for (int j = 1; j <= 40; ++j) {
      term = r.gen * term * cplx(rest / j);
      out += term;
      if (term.cwiseAbs().maxCoeff() <= 1e-17 * scale) break;
    }
  }
  return out;
}

FockOperator PropagatorLadder::apply(const FockOperator& x, double t) const {
  if (!(t >= 0.0 && std::isfinite(t))) throw DomainError("PropagatorLadder: time must be finite and >= 0");
  if (x.dim() != s_.dim()) throw DimensionMismatch("PropagatorLadder: dims differ");
  const int d = s_.dim();
  if (!s_.is_sectored()) {
    const Vector v = advance(kDenseKey, vec(x.matrix()), t);
    return FockOperator(Matrix(Eigen::Map<const Matrix>(v.data(), d, d)));
  }
  FockOperator out = FockOperator::zero(d);
  for (int k = 1 - d; k < d; ++k) {
    const Vector v = sector_of(x, k);
    if (v.isZero(0.0)) continue;
    set_sector(out, k, advance(k, v, t));
  }
  return out;
}

void Observer::validate() const {
  for (double e : {eta_down_eff, eta_up_eff})
    if (!(e >= 0.0 && e <= 1.0)) throw DomainError("Observer " + name + ": efficiency outside [0,1]");
  if (!attend_down && eta_down_eff != 0.0) throw DomainError("Observer " + name + ": ignored detector needs eta 0");
  if (!attend_up && eta_up_eff != 0.0) throw DomainError("Observer " + name + ": ignored detector needs eta 0");
}

Observer Observer::attending(std::string name, const DetectionConfig& cfg, bool down, bool up, bool distinguish) {
  Observer o;
  o.name = std::move(name);
  o.attend_down = down;
  o.attend_up = up;
  o.eta_down_eff = down ? cfg.eta_down : 0.0;
  o.eta_up_eff = up ? cfg.eta_up : 0.0;
  o.distinguish = distinguish;
  return o;
}

std::vector<Observer> standard_observers(const DetectionConfig& cfg) {
  return {Observer::attending("up_only", cfg, false, true), Observer::attending("down_only", cfg, true, false),
          Observer::attending("both", cfg, true, true), Observer::attending("both_merged", cfg, true, true, false)};
}

TrajectorySimulator::TrajectorySimulator(TrajectoryConfig config)
    : config_(std::move(config)),
      initial_(DensityMatrix::fock_state(0, std::max(2, config_.kick.A.dim()))),
      between_atoms_(build_liouvillian(config_.oscillator, config_.kick.A.dim())) {
  config_.detection.validate();
  const int dim = config_.kick.A.dim();
  const SuperOperator l0 = scully_lamb(config_.oscillator, config_.kick, config_.detection.rate, dim);
  if (config_.options.initial) {
    if (config_.options.initial->dim() != dim) throw DimensionMismatch("TrajectorySimulator: initial state dim");
    initial_ = *config_.options.initial;
  } else {
    initial_ = steady_state(l0);
  }
  if (config_.options.samples < 0) throw DomainError("TrajectorySimulator: samples must be >= 0");
  const double r = config_.detection.rate;
  for (const Observer& o : config_.observers) {
    o.validate();
    const SuperOperator c = cplx(o.eta_down_eff) * config_.kick.A + cplx(o.eta_up_eff) * config_.kick.B;
    models_.push_back({PropagatorLadder(l0 - cplx(r) * c), c});
  }
}

TrajectoryResult TrajectorySimulator::run(double t_end, std::uint64_t seed, std::uint64_t index) const {
  if (!(t_end > 0.0 && std::isfinite(t_end))) throw DomainError("simulate: t_end must be positive");
  const TrajectoryOptions& opt = config_.options;
  const DetectionConfig& cfg = config_.detection;
  const KickPair& kick = config_.kick;
  std::mt19937_64 gen = trajectory_stream(seed, index);

  TrajectoryResult res;
  res.seed = seed;
  res.index = index;
  res.omniscient.name = "omniscient";
  Tracked omni{initial_.op()};
  std::vector<Tracked> obs(models_.size(), Tracked{initial_.op()});
  for (const Observer& o : config_.observers) res.observers.emplace_back().name = o.name;

  auto record_all = [&](double t) {
    record(res.omniscient, t, omni, opt.check_positivity);
    for (std::size_t i = 0; i < obs.size(); ++i) record(res.observers[i], t, obs[i], opt.check_positivity);
  };
  auto advance_all = [&](double dt) {
    advance(omni, between_atoms_, dt);
    omni.no_click = 1.0;
    for (std::size_t i = 0; i < obs.size(); ++i) advance(obs[i], models_[i].ladder, dt);
  };

  double t = 0.0;
  double arrival = exponential(gen, cfg.rate);
  int next_sample = 0;
  auto sample_time = [&](int i) { return t_end * i / opt.samples; };
  while (true) {
    if (opt.samples > 0 && next_sample <= opt.samples && sample_time(next_sample) <= arrival) {
      const double ts = sample_time(next_sample++);
      advance_all(ts - t);
      t = ts;
      record_all(t);
      continue;
    }
    if (arrival > t_end) {
      advance_all(t_end - t);
      t = t_end;
      break;
    }
    advance_all(arrival - t);
    t = arrival;
    const double pd = std::max(0.0, real_trace(kick.A.apply(omni.rho)));
    const double pu = std::max(0.0, real_trace(kick.B.apply(omni.rho)));
    const Branch b = uniform01(gen) * (pd + pu) < pd ? Branch::down : Branch::up;
    reduce(omni, kick.branch(b));
    const bool detected = uniform01(gen) < cfg.eta(b);
    res.clicks.push_back({t, b, detected});
    if (detected) {
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const Observer& o = config_.observers[i];
        if (!attends(o, b)) continue;
        reduce(obs[i], o.distinguish ? kick.branch(b) : models_[i].click);
      }
    }
    if (detected && opt.stop_on_detected == b) break;
    arrival = t + exponential(gen, cfg.rate);
  }
  res.end_time = t;
  return res;
}

TrajectoryResult TrajectorySimulator::replay(const std::vector<ClickRecord>& clicks, double t_end) const {
  if (!(t_end > 0.0 && std::isfinite(t_end))) throw DomainError("replay: t_end must be positive");
  for (std::size_t i = 1; i < clicks.size(); ++i)
    if (!(clicks[i].time > clicks[i - 1].time)) throw DomainError("replay: click times must increase");
  const TrajectoryOptions& opt = config_.options;
  TrajectoryResult res;
  res.clicks = clicks;
  res.end_time = t_end;
  std::vector<Tracked> obs(models_.size(), Tracked{initial_.op()});
  for (const Observer& o : config_.observers) res.observers.emplace_back().name = o.name;
  auto advance_all = [&](double dt) {
    for (std::size_t i = 0; i < obs.size(); ++i) advance(obs[i], models_[i].ladder, dt);
  };
  auto record_all = [&](double ts) {
    for (std::size_t i = 0; i < obs.size(); ++i) record(res.observers[i], ts, obs[i], opt.check_positivity);
  };

  double t = 0.0;
  int next_sample = 0;
  auto sample_time = [&](int i) { return t_end * i / opt.samples; };
  for (const ClickRecord& c : clicks) {
    if (c.time > t_end) break;
    while (opt.samples > 0 && next_sample <= opt.samples && sample_time(next_sample) <= c.time) {
      const double ts = sample_time(next_sample++);
      advance_all(ts - t);
      t = ts;
      record_all(t);
    }
    advance_all(c.time - t);
    t = c.time;
    if (!c.detected) continue;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const Observer& o = config_.observers[i];
      if (!attends(o, c.branch)) continue;
      reduce(obs[i], o.distinguish ? config_.kick.branch(c.branch) : models_[i].click);
    }
  }
  while (opt.samples > 0 && next_sample <= opt.samples) {
    const double ts = sample_time(next_sample++);
    advance_all(ts - t);
    t = ts;
    record_all(t);
  }
  return res;
}

TrajectoryResult simulate(const TrajectoryConfig& config, double t_end, std::uint64_t seed) {
  return TrajectorySimulator(config).run(t_end, seed, 0);
}

std::vector<TrajectoryResult> run_ensemble(const TrajectoryConfig& config, double t_end, std::uint64_t seed, int n,
                                           int threads) {
  if (n < 1) throw DomainError("run_ensemble: n must be >= 1");
  if (threads < 1) throw DomainError("run_ensemble: threads must be >= 1");
  std::vector<TrajectoryResult> out(static_cast<std::size_t>(n));
  threads = std::min(threads, n);
  if (threads == 1) {
    const TrajectorySimulator sim(config);
    for (int i = 0; i < n; ++i) out[i] = sim.run(t_end, seed, i);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        const TrajectorySimulator sim(config);
        for (int i = w; i < n; i += threads) out[i] = sim.run(t_end, seed, i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

EnsembleCurve ensemble_average(const std::vector<TrajectoryResult>& runs, int observer, Quantity q) {
  if (runs.size() < 2) throw DomainError("ensemble_average: need at least 2 runs");
  auto series = [observer](const TrajectoryResult& r) -> const ObserverSeries& {
    if (observer < 0) return r.omniscient;
    if (observer >= static_cast<int>(r.observers.size())) throw DomainError("ensemble_average: no such observer");
    return r.observers[observer];
  };
  auto values = [q](const ObserverSeries& s) -> const std::vector<double>& {
    return q == Quantity::parity ? s.parity : q == Quantity::number ? s.number : s.no_click;
  };
  const ObserverSeries& first = series(runs.front());
  EnsembleCurve c;
  c.t = first.t;
  const std::size_t m = c.t.size();
  c.mean.assign(m, 0.0);
  c.std_error.assign(m, 0.0);
  for (const auto& r : runs) {
    const auto& v = values(series(r));
    if (v.size() != m) throw DomainError("ensemble_average: runs sampled on different grids");
    for (std::size_t i = 0; i < m; ++i) c.mean[i] += v[i];
  }
  const double n = static_cast<double>(runs.size());
  for (double& x : c.mean) x /= n;
  for (const auto& r : runs) {
    const auto& v = values(series(r));
    for (std::size_t i = 0; i < m; ++i) c.std_error[i] += (v[i] - c.mean[i]) * (v[i] - c.mean[i]);
  }
  for (double& x : c.std_error) x = std::sqrt(x / (n - 1) / n);
  return c;
}

EnsembleCurve ensemble_average(const TrajectoryConfig& config, double t_end, std::uint64_t seed, int n_seeds,
                               int observer, Quantity q, int threads) {
  if (n_seeds < 2) throw DomainError("ensemble_average: n_seeds must be >= 2");
  if (config.options.samples < 1) throw DomainError("ensemble_average: samples must be >= 1");
  return ensemble_average(run_ensemble(config, t_end, seed, n_seeds, threads), observer, q);
}

}  // namespace qdamp
