#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "qdamp/errors.hpp"
#include "qdamp/micromaser.hpp"

namespace qdamp::cli {

/// Every violated precondition of a scenario, one message each.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class KickType { none, jc, parity, one_photon, trivial };

struct KickSpec {
  KickType type = KickType::none;
  double phi_rad = 0.0;
  double p = 0.0;  // one-photon kick strength
  double q = 0.5;  // trivial kick down probability
};

/// Times in units of 1/A.
struct TimeGrid {
  double start_At = 0.0;
  double end_At = 5.0;
  int points = 21;
  bool log_spacing = false;
  std::vector<double> values() const;
};

/// A = 1 throughout; times are A t and rates are in units of A.
struct ScenarioConfig {
  OscillatorParams oscillator;
  KickSpec kick;
  DetectionConfig detection;
  int fock_dim = 0;  // 0 chooses automatically
  TimeGrid time;

  int spectrum_n_max = 5;
  int spectrum_k_max = 3;
  double counting_t_At = 1.0;
  int counting_n_max = 40;
  double kicked_period_AT = 0.4;
  int kicked_periods = 20;
  int kicked_samples_per_period = 20;
  double trajectory_end_At = 10.0;
  int trajectory_runs = 1;
  int trajectory_samples = 200;
  std::vector<std::string> observers{"up_only", "down_only", "both", "both_merged"};
  std::uint64_t seed = 0;

  bool json = true;
};

/// Parses and validates an INI document. Unknown sections or keys, malformed values and
/// violated preconditions are reported together in one ConfigError.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Throws ConfigError listing every violated precondition.
void validate(const ScenarioConfig& c);
/// Sorted key = value lines of the resolved scenario.
std::string canonical(const ScenarioConfig& c);
/// SHA-256 of canonical(c), lowercase hex.
std::string config_hash(const ScenarioConfig& c);

KickPair build_kick(const ScenarioConfig& c, int dim);
/// Fock dimension for the scenario: fock_dim when set, otherwise grown until the
/// Scully-Lamb steady state leaves less than 1e-12 in its top level.
int resolve_dim(const ScenarioConfig& c);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

Table cmd_spectrum(const ScenarioConfig& c);
Table cmd_steady(const ScenarioConfig& c);
Table cmd_correlations(const ScenarioConfig& c);
Table cmd_waiting(const ScenarioConfig& c);
Table cmd_counting(const ScenarioConfig& c);
Table cmd_fano(const ScenarioConfig& c);
Table cmd_kicked(const ScenarioConfig& c);
std::vector<Table> cmd_trajectory(const ScenarioConfig& c, int threads = 1);

const std::vector<std::string>& command_names();
std::vector<Table> run_command(const std::string& command, const ScenarioConfig& c, int threads = 1);

struct OutputMeta {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
};

std::string library_version();
/// CSV with a commented header; numbers use 17 significant digits.
std::string to_csv(const Table& t, const OutputMeta& meta);
/// {"schema_version", "version", "command", "config_sha256", "rng", "seed", "tables": {...}}
std::string to_json(const std::vector<Table>& tables, const OutputMeta& meta);
/// Writes <command>[_<table>].csv per table and, when json is set, <command>.json.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const std::vector<Table>& tables,
                                                 const OutputMeta& meta, bool json);

/// 0 success, 2 config error, 3 numerical failure, 4 I/O.
int exit_code(const std::exception& e);
/// {"error": kind, "messages": [...]}
std::string error_report(const std::exception& e);

}  // namespace qdamp::cli
