#include "qdamp/cli.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "qdamp/damping.hpp"
#include "qdamp/statistics.hpp"
#include "qdamp/trajectory.hpp"

#ifndef QDAMP_VERSION
#define QDAMP_VERSION "0.0.0"
#endif

namespace qdamp::cli {

namespace {

namespace pt = boost::property_tree;

constexpr int kSchemaVersion = 1;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"oscillator", {"omega_per_A", "nu_photons"}},
      {"kick", {"type", "phi_rad", "p", "q"}},
      {"detection", {"eta_down", "eta_up", "rate_per_A"}},
      {"fock", {"dim"}},
      {"time", {"start_At", "end_At", "points", "spacing"}},
      {"spectrum", {"n_max", "k_max"}},
      {"counting", {"t_At", "n_max"}},
      {"kicked", {"period_AT", "periods", "samples_per_period"}},
      {"trajectory", {"end_At", "runs", "samples", "observers", "seed"}},
      {"output", {"json"}},
  };
  return keys;
}

const std::map<std::string, KickType>& kick_names() {
  static const std::map<std::string, KickType> names{{"none", KickType::none},
                                                     {"jc", KickType::jc},
                                                     {"parity", KickType::parity},
                                                     {"one_photon", KickType::one_photon},
                                                     {"trivial", KickType::trivial}};
  return names;
}

std::string kick_name(KickType t) {
  for (const auto& [name, type] : kick_names())
    if (type == t) return name;
  return "none";
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <class T>
  void get(const std::string& path, T& out) {
    const auto node = tree_.get_optional<std::string>(path);
    if (!node) return;
    std::istringstream in(*node);
    T value{};
    in >> std::boolalpha >> value;
    if (in.fail() || !(in >> std::ws).eof()) {
      problems.push_back(path + ": cannot parse '" + *node + "'");
      return;
    }
    out = value;
  }

  std::string get_string(const std::string& path, const std::string& fallback) {
    return tree_.get<std::string>(path, fallback);
  }

  std::vector<std::string> problems;

 private:
  const pt::ptree& tree_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

SuperOperator scully_lamb_of(const ScenarioConfig& c, const KickPair& kick, int dim) {
  return scully_lamb(c.oscillator, kick, c.detection.rate, dim);
}

std::vector<Observer> make_observers(const ScenarioConfig& c) {
  std::vector<Observer> out;
  for (const auto& name : c.observers) {
    if (name == "up_only") out.push_back(Observer::attending(name, c.detection, false, true));
    if (name == "down_only") out.push_back(Observer::attending(name, c.detection, true, false));
    if (name == "both") out.push_back(Observer::attending(name, c.detection, true, true));
    if (name == "both_merged") out.push_back(Observer::attending(name, c.detection, true, true, false));
  }
  return out;
}

const char* branch_name(Branch b) { return b == Branch::down ? "down" : "up"; }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
        std::string s = "invalid configuration:";
        for (const auto& p : problems) s += "\n  " + p;
        return s;
      }()),
      problems_(std::move(problems)) {}

std::vector<double> TimeGrid::values() const {
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    t[i] = log_spacing ? start_At * std::pow(end_At / start_At, f) : start_At + f * (end_At - start_At);
  }
  return t;
}

ScenarioConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")"});
  }
  Reader r(tree);
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      r.problems.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) r.problems.push_back("unknown key " + section + "." + key);
  }

  ScenarioConfig c;
  r.get("oscillator.omega_per_A", c.oscillator.omega);
  r.get("oscillator.nu_photons", c.oscillator.nu);
  const std::string kick = r.get_string("kick.type", "none");
  if (const auto it = kick_names().find(kick); it != kick_names().end())
    c.kick.type = it->second;
  else
    r.problems.push_back("kick.type: unknown kick '" + kick + "'");
  r.get("kick.phi_rad", c.kick.phi_rad);
  r.get("kick.p", c.kick.p);
  r.get("kick.q", c.kick.q);
  r.get("detection.eta_down", c.detection.eta_down);
  r.get("detection.eta_up", c.detection.eta_up);
  r.get("detection.rate_per_A", c.detection.rate);
  r.get("fock.dim", c.fock_dim);
  r.get("time.start_At", c.time.start_At);
  r.get("time.end_At", c.time.end_At);
  r.get("time.points", c.time.points);
  const std::string spacing = r.get_string("time.spacing", "linear");
  if (spacing == "log")
    c.time.log_spacing = true;
  else if (spacing != "linear")
    r.problems.push_back("time.spacing: expected linear or log");
  r.get("spectrum.n_max", c.spectrum_n_max);
  r.get("spectrum.k_max", c.spectrum_k_max);
  r.get("counting.t_At", c.counting_t_At);
  r.get("counting.n_max", c.counting_n_max);
  r.get("kicked.period_AT", c.kicked_period_AT);
  r.get("kicked.periods", c.kicked_periods);
  r.get("kicked.samples_per_period", c.kicked_samples_per_period);
  r.get("trajectory.end_At", c.trajectory_end_At);
  r.get("trajectory.runs", c.trajectory_runs);
  r.get("trajectory.samples", c.trajectory_samples);
  r.get("trajectory.seed", c.seed);
  if (tree.get_optional<std::string>("trajectory.observers"))
    c.observers = split_list(r.get_string("trajectory.observers", ""));
  r.get("output.json", c.json);
  try {
    validate(c);
  } catch (const ConfigError& e) {
    r.problems.insert(r.problems.end(), e.problems().begin(), e.problems().end());
  }
  if (!r.problems.empty()) throw ConfigError(r.problems);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ScenarioConfig& c) {
  std::vector<std::string> p;
  auto need = [&p](bool ok, const std::string& msg) {
    if (!ok) p.push_back(msg);
  };
  need(std::isfinite(c.oscillator.omega), "oscillator.omega_per_A must be finite");
  need(c.oscillator.nu >= 0.0 && std::isfinite(c.oscillator.nu), "oscillator.nu_photons must be >= 0");
  need(std::isfinite(c.kick.phi_rad), "kick.phi_rad must be finite");
  need(c.kick.p >= 0.0 && c.kick.p <= 1.0, "kick.p must lie in [0,1]");
  need(c.kick.q >= 0.0 && c.kick.q <= 1.0, "kick.q must lie in [0,1]");
  need(c.detection.eta_down >= 0.0 && c.detection.eta_down <= 1.0, "detection.eta_down must lie in [0,1]");
  need(c.detection.eta_up >= 0.0 && c.detection.eta_up <= 1.0, "detection.eta_up must lie in [0,1]");
  need(c.detection.rate > 0.0 && std::isfinite(c.detection.rate), "detection.rate_per_A must be > 0");
  need(c.fock_dim == 0 || (c.fock_dim >= 2 && c.fock_dim <= 4096), "fock.dim must be 0 (auto) or in [2,4096]");
  need(c.time.points >= 1, "time.points must be >= 1");
  need(c.time.start_At >= 0.0 && std::isfinite(c.time.start_At), "time.start_At must be >= 0");
  need(c.time.end_At >= c.time.start_At && std::isfinite(c.time.end_At), "time.end_At must be >= time.start_At");
  need(!c.time.log_spacing || c.time.start_At > 0.0, "time.start_At must be > 0 for log spacing");
  need(c.spectrum_n_max >= 0 && c.spectrum_k_max >= 0, "spectrum.n_max and spectrum.k_max must be >= 0");
  need(c.counting_t_At >= 0.0 && std::isfinite(c.counting_t_At), "counting.t_At must be >= 0");
  need(c.counting_n_max >= 1, "counting.n_max must be >= 1");
  need(c.kicked_period_AT > 0.0 && std::isfinite(c.kicked_period_AT), "kicked.period_AT must be > 0");
  need(c.kicked_periods >= 1, "kicked.periods must be >= 1");
  need(c.kicked_samples_per_period >= 1, "kicked.samples_per_period must be >= 1");
  need(c.trajectory_end_At > 0.0 && std::isfinite(c.trajectory_end_At), "trajectory.end_At must be > 0");
  need(c.trajectory_runs >= 1, "trajectory.runs must be >= 1");
  need(c.trajectory_samples >= 1, "trajectory.samples must be >= 1");
  for (const auto& o : c.observers)
    need(o == "up_only" || o == "down_only" || o == "both" || o == "both_merged",
         "trajectory.observers: unknown observer '" + o + "'");
  if (!p.empty()) throw ConfigError(p);
}

std::string canonical(const ScenarioConfig& c) {
  std::map<std::string, std::string> kv{
      {"oscillator.omega_per_A", format_double(c.oscillator.omega)},
      {"oscillator.nu_photons", format_double(c.oscillator.nu)},
      {"kick.type", kick_name(c.kick.type)},
      {"kick.phi_rad", format_double(c.kick.phi_rad)},
      {"kick.p", format_double(c.kick.p)},
      {"kick.q", format_double(c.kick.q)},
      {"detection.eta_down", format_double(c.detection.eta_down)},
      {"detection.eta_up", format_double(c.detection.eta_up)},
      {"detection.rate_per_A", format_double(c.detection.rate)},
      {"fock.dim", std::to_string(c.fock_dim)},
      {"time.start_At", format_double(c.time.start_At)},
      {"time.end_At", format_double(c.time.end_At)},
      {"time.points", std::to_string(c.time.points)},
      {"time.spacing", c.time.log_spacing ? "log" : "linear"},
      {"spectrum.n_max", std::to_string(c.spectrum_n_max)},
      {"spectrum.k_max", std::to_string(c.spectrum_k_max)},
      {"counting.t_At", format_double(c.counting_t_At)},
      {"counting.n_max", std::to_string(c.counting_n_max)},
      {"kicked.period_AT", format_double(c.kicked_period_AT)},
      {"kicked.periods", std::to_string(c.kicked_periods)},
      {"kicked.samples_per_period", std::to_string(c.kicked_samples_per_period)},
      {"trajectory.end_At", format_double(c.trajectory_end_At)},
      {"trajectory.runs", std::to_string(c.trajectory_runs)},
      {"trajectory.samples", std::to_string(c.trajectory_samples)},
      {"trajectory.seed", std::to_string(c.seed)},
      {"output.json", c.json ? "true" : "false"},
  };
  std::string obs;
  for (const auto& o : c.observers) obs += (obs.empty() ? "" : ",") + o;
  kv["trajectory.observers"] = obs;
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string config_hash(const ScenarioConfig& c) {
  const std::string text = canonical(c);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("config_hash: SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

KickPair build_kick(const ScenarioConfig& c, int dim) {
  switch (c.kick.type) {
    case KickType::jc:
      return jc_kick(c.kick.phi_rad, dim);
    case KickType::parity:
      return parity_kick(dim);
    case KickType::trivial:
      return trivial_kick(c.kick.q, dim);
    case KickType::one_photon:
      // the whole kick acts as the down branch
      return KickPair{one_photon_kick(c.kick.p, dim) + SuperOperator::identity(dim), SuperOperator::zero(dim)};
    case KickType::none:
      break;
  }
  return trivial_kick(0.0, dim);
}

int resolve_dim(const ScenarioConfig& c) {
  if (c.fock_dim > 0) return c.fock_dim;
  int dim = std::max(16, thermal_required_dim(c.oscillator.nu, 1e-14));
  if (c.kick.type == KickType::parity || c.kick.type == KickType::trivial || c.kick.type == KickType::none) return dim;
  for (; dim <= 4096; dim = dim * 3 / 2) {
    const DensityMatrix ss = steady_state(scully_lamb_of(c, build_kick(c, dim), dim));
    if (ss.matrix()(dim - 1, dim - 1).real() < 1e-12) return dim;
  }
  throw TruncationError("resolve_dim: steady state does not fit", 4096);
}

Table cmd_spectrum(const ScenarioConfig& c) {
  Table t{"spectrum", {"n", "k", "re_lambda_per_A", "im_lambda_per_A", "interior_residual"}, {}};
  const int margin = 20;
  const int dim = damping_required_dim(c.spectrum_n_max + c.spectrum_k_max, c.oscillator.nu, 1e-12) + margin;
  for (int k = -c.spectrum_k_max; k <= c.spectrum_k_max; ++k) {
    for (int n = 0; n <= c.spectrum_n_max; ++n) {
      const cplx lambda = eigenvalue(n, k, c.oscillator);
      const FockOperator r = right_eigenvector(n, k, c.oscillator.nu, dim);
      const FockOperator res = liouvillian_action(r, c.oscillator) - lambda * r;
      t.rows.push_back({std::int64_t{n}, std::int64_t{k}, lambda.real(), lambda.imag(),
                        interior_max_abs(res, dim - margin) / r.max_abs()});
    }
  }
  return t;
}

Table cmd_steady(const ScenarioConfig& c) {
  const int dim = resolve_dim(c);
  const DensityMatrix ss = steady_state(scully_lamb_of(c, build_kick(c, dim), dim));
  Table t{"steady", {"n", "probability"}, {}};
  for (int n = 0; n < dim; ++n) t.rows.push_back({std::int64_t{n}, ss.matrix()(n, n).real()});
  return t;
}

Table cmd_correlations(const ScenarioConfig& c) {
  const int dim = resolve_dim(c);
  const KickPair kick = build_kick(c, dim);
  const SuperOperator l0 = scully_lamb_of(c, kick, dim);
  const DensityMatrix ss = steady_state(l0);
  const std::vector<double> grid = c.time.values();
  Table t{"correlations", {"t_At", "G_down_down", "G_down_up", "G_up_down", "G_up_up"}, {}};
  std::vector<std::vector<double>> cols;
  for (ClickPair pair : {ClickPair::down_down, ClickPair::down_up, ClickPair::up_down, ClickPair::up_up}) {
    try {
      cols.push_back(correlation(pair, l0, kick, ss, grid).values);
    } catch (const DomainError&) {
      cols.emplace_back(grid.size(), std::nan(""));
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) t.rows.push_back({grid[i], cols[0][i], cols[1][i], cols[2][i], cols[3][i]});
  return t;
}

Table cmd_waiting(const ScenarioConfig& c) {
  const int dim = resolve_dim(c);
  const KickPair kick = build_kick(c, dim);
  const SuperOperator l0 = scully_lamb_of(c, kick, dim);
  const std::vector<double> grid = c.time.values();
  Table t{"waiting", {"t_At"}, {}};
  std::vector<std::vector<double>> cols;
  for (Branch from : {Branch::down, Branch::up}) {
    for (Branch watched : {Branch::down, Branch::up}) {
      const std::string tag = std::string(branch_name(from)) + "_" + branch_name(watched);
      t.columns.push_back("density_" + tag);
      t.columns.push_back("no_click_" + tag);
      try {
        const WaitingTime w(l0, kick, c.detection, from, watched);
        std::vector<double> d, q;
        for (double x : grid) {
          d.push_back(c.detection.eta(watched) > 0.0 ? w.density(x) : std::nan(""));
          q.push_back(w.no_click(x));
        }
        cols.push_back(d);
        cols.push_back(q);
      } catch (const DomainError&) {
        cols.emplace_back(grid.size(), std::nan(""));
        cols.emplace_back(grid.size(), std::nan(""));
      }
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<Cell> row{grid[i]};
    for (const auto& col : cols) row.push_back(col[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table cmd_counting(const ScenarioConfig& c) {
  const int dim = resolve_dim(c);
  const KickPair kick = build_kick(c, dim);
  const CountingDistribution w =
      counting_distribution(scully_lamb_of(c, kick, dim), kick, c.detection, c.counting_t_At, c.counting_n_max);
  Table t{"counting", {"n", "probability"}, {}};
  for (std::size_t n = 0; n < w.probs.size(); ++n) t.rows.push_back({static_cast<std::int64_t>(n), w.probs[n]});
  return t;
}

Table cmd_fano(const ScenarioConfig& c) {
  const int dim = resolve_dim(c);
  const KickPair kick = build_kick(c, dim);
  const Curve q = fano_mandel(scully_lamb_of(c, kick, dim), kick, c.detection, c.time.values());
  Table t{"fano", {"t_At", "Q"}, {}};
  for (std::size_t i = 0; i < q.t.size(); ++i) t.rows.push_back({q.t[i], q.values[i]});
  return t;
}

Table cmd_kicked(const ScenarioConfig& c) {
  const int dim = resolve_dim(c);
  const SuperOperator l = build_liouvillian(c.oscillator, dim);
  const SuperOperator k = build_kick(c, dim).net();
  const KickedSeries s = periodic_kick_evolve(l, k, c.kicked_period_AT, thermal_state(c.oscillator.nu, dim),
                                              c.kicked_periods, c.kicked_samples_per_period);
  Table t{"kicked", {"t_At", "mean_number"}, {}};
  for (std::size_t i = 0; i < s.t.size(); ++i) t.rows.push_back({s.t[i], s.mean_number[i]});
  return t;
}

std::vector<Table> cmd_trajectory(const ScenarioConfig& c, int threads) {
  const int dim = resolve_dim(c);
  TrajectoryConfig tc{c.oscillator, build_kick(c, dim), c.detection, make_observers(c), {}};
  tc.options.samples = c.trajectory_samples;
  const auto runs = run_ensemble(tc, c.trajectory_end_At, c.seed, c.trajectory_runs, threads);
  Table clicks{"clicks", {"run", "t_At", "branch", "detected"}, {}};
  Table series{"series", {"run", "t_At", "observer", "parity", "mean_number"}, {}};
  for (const auto& r : runs) {
    const auto run = static_cast<std::int64_t>(r.index);
    for (const auto& k : r.clicks)
      clicks.rows.push_back({run, k.time, std::string(branch_name(k.branch)), std::int64_t{k.detected ? 1 : 0}});
    auto emit = [&](const ObserverSeries& s) {
      for (std::size_t i = 0; i < s.t.size(); ++i) series.rows.push_back({run, s.t[i], s.name, s.parity[i], s.number[i]});
    };
    emit(r.omniscient);
    for (const auto& s : r.observers) emit(s);
  }
  return {clicks, series};
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "steady", "correlations", "waiting",
                                              "counting", "fano",   "kicked",       "trajectory"};
  return names;
}

std::vector<Table> run_command(const std::string& command, const ScenarioConfig& c, int threads) {
  validate(c);
  if (command == "spectrum") return {cmd_spectrum(c)};
  if (command == "steady") return {cmd_steady(c)};
  if (command == "correlations") return {cmd_correlations(c)};
  if (command == "waiting") return {cmd_waiting(c)};
  if (command == "counting") return {cmd_counting(c)};
  if (command == "fano") return {cmd_fano(c)};
  if (command == "kicked") return {cmd_kicked(c)};
  if (command == "trajectory") return cmd_trajectory(c, threads);
  throw ConfigError({"unknown command '" + command + "'"});
}

std::string library_version() { return QDAMP_VERSION; }

std::string to_csv(const Table& t, const OutputMeta& meta) {
  std::string out;
  out += "# qdamp " + library_version() + "\n";
  out += "# command: " + meta.command + "\n";
  out += "# table: " + t.name + "\n";
  out += "# config_sha256: " + meta.config_hash + "\n";
  out += "# rng: " + std::string(kRngAlgorithm) + "\n";
  out += "# seed: " + std::to_string(meta.seed) + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      if (const double* d = std::get_if<double>(&row[i]))
        out += format_double(*d);
      else if (const std::int64_t* n = std::get_if<std::int64_t>(&row[i]))
        out += std::to_string(*n);
      else
        out += std::get<std::string>(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string to_json(const std::vector<Table>& tables, const OutputMeta& meta) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = library_version();
  j["command"] = meta.command;
  j["config_sha256"] = meta.config_hash;
  j["rng"] = kRngAlgorithm;
  j["seed"] = meta.seed;
  nlohmann::ordered_json tabs = nlohmann::ordered_json::object();
  for (const auto& t : tables) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (const auto& cell : row) {
        if (const double* d = std::get_if<double>(&cell))
          r.push_back(std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr));
        else if (const std::int64_t* n = std::get_if<std::int64_t>(&cell))
          r.push_back(*n);
        else
          r.push_back(std::get<std::string>(cell));
      }
      rows.push_back(std::move(r));
    }
    tabs[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
  }
  j["tables"] = std::move(tabs);
  return j.dump(1) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const std::vector<Table>& tables,
                                                 const OutputMeta& meta, bool json) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) throw IoError("cannot write " + path.string());
    written.push_back(path);
  };
  for (const auto& t : tables) {
    const std::string stem = t.name == meta.command ? meta.command : meta.command + "_" + t.name;
    write(dir / (stem + ".csv"), to_csv(t, meta));
  }
  if (json) write(dir / (meta.command + ".json"), to_json(tables, meta));
  return written;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const DimensionMismatch*>(&e))
    return 2;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 3;
}

std::string error_report(const std::exception& e) {
  nlohmann::ordered_json j;
  const int code = exit_code(e);
  j["error"] = code == 2 ? "config" : code == 4 ? "io" : "numerical";
  if (const auto* c = dynamic_cast<const ConfigError*>(&e))
    j["messages"] = c->problems();
  else
    j["messages"] = {e.what()};
  return j.dump();
}

}  // namespace qdamp::cli
