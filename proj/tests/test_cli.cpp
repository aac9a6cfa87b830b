#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qdamp/cli.hpp"

using namespace qdamp;
using namespace qdamp::cli;

namespace {

const char* kParity = R"(
[oscillator]
nu_photons = 2
[kick]
type = parity
[detection]
eta_down = 0.1
eta_up = 0.15
rate_per_A = 10
[time]
start_At = 0
end_At = 5
points = 11
[trajectory]
end_At = 4
runs = 3
samples = 8
seed = 12345
)";

double num(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return *d;
  return static_cast<double>(std::get<std::int64_t>(c));
}

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

}  // namespace

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse_config(kParity);
  CHECK(c.oscillator.nu == 2.0);
  CHECK(c.kick.type == KickType::parity);
  CHECK(c.detection.eta_up == 0.15);
  CHECK(c.detection.rate == 10.0);
  CHECK(c.time.points == 11);
  CHECK(c.seed == 12345);
  CHECK(c.observers.size() == 4);
  const std::vector<double> t = c.time.values();
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 5.0);

  const ScenarioConfig d = parse_config(std::string(kParity) + "[output]\njson = false\n");
  CHECK_FALSE(d.json);
  CHECK(canonical(c) != canonical(d));
  const std::string h = config_hash(c);
  CHECK(h.size() == 64);
  CHECK(h == config_hash(parse_config(kParity)));
  ScenarioConfig e = c;
  e.seed = 1;
  CHECK(config_hash(e) != h);

  TimeGrid g{0.1, 1000.0, 5, true};
  const auto v = g.values();
  CHECK(std::abs(v[1] - 1.0) < 1e-12);
  CHECK(std::abs(v[4] - 1000.0) < 1e-9);
}

TEST_CASE("config errors list every problem") {
  const auto p = problems_of("[oscillator]\nnu_photons = -1\nfoo = 1\n[kick]\ntype = maser\n[detection]\neta_down = 2\n"
                             "[time]\npoints = x\n[extra]\na = 1\n");
  CHECK(p.size() == 6);
  auto has = [&p](const std::string& s) {
    return std::any_of(p.begin(), p.end(), [&](const std::string& m) { return m.find(s) != std::string::npos; });
  };
  CHECK(has("oscillator.foo"));
  CHECK(has("maser"));
  CHECK(has("[extra]"));
  CHECK(has("time.points"));
  CHECK(has("nu_photons must be >= 0"));
  CHECK(has("eta_down must lie in [0,1]"));
  CHECK(problems_of("[time]\nstart_At = 0\nspacing = log\n").size() == 1);
  CHECK(problems_of("[trajectory]\nobservers = up_only, nobody\n").size() == 1);
  CHECK(problems_of("[oscillator\n").size() == 1);
  CHECK(problems_of(kParity).empty());
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ConfigError({"x"})) == 2);
  CHECK(exit_code(DomainError("x")) == 2);
  CHECK(exit_code(TruncationError("x", 10)) == 3);
  CHECK(exit_code(UnderflowError("x")) == 3);
  CHECK(exit_code(ConvergenceError("x")) == 3);
  CHECK(exit_code(IoError("x")) == 4);
  const auto j = nlohmann::json::parse(error_report(ConfigError({"a", "b"})));
  CHECK(j["error"] == "config");
  CHECK(j["messages"].size() == 2);
  CHECK(nlohmann::json::parse(error_report(ConvergenceError("c")))["error"] == "numerical");

  ScenarioConfig c = parse_config(kParity);
  c.counting_n_max = 2;
  c.counting_t_At = 5.0;
  CHECK_THROWS_AS(run_command("counting", c), ConvergenceError);
  CHECK_THROWS_AS(run_command("nothing", c), ConfigError);
  c.detection.rate = -1.0;
  CHECK_THROWS_AS(run_command("steady", c), ConfigError);
}

TEST_CASE("spectrum command") {
  ScenarioConfig c = parse_config("[oscillator]\nnu_photons = 0.5\nomega_per_A = 2.5\n");
  const Table t = cmd_spectrum(c);
  CHECK(t.rows.size() == 6 * 7);
  for (const auto& row : t.rows) {
    const double n = num(row[0]), k = num(row[1]);
    CHECK(num(row[2]) == doctest::Approx(-(n + std::abs(k) / 2)).epsilon(1e-15));
    CHECK(num(row[3]) == doctest::Approx(-k * 2.5).epsilon(1e-15));
    CHECK(num(row[4]) < 1e-8);
  }
}

TEST_CASE("steady and counting commands") {
  const ScenarioConfig c = parse_config(kParity);
  const Table s = cmd_steady(c);
  double total = 0.0;
  for (const auto& row : s.rows) {
    const double n = num(row[0]);
    CHECK(std::abs(num(row[1]) - std::pow(2.0, n) / std::pow(3.0, n + 1)) < 1e-12);
    total += num(row[1]);
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
  ScenarioConfig d = c;
  d.counting_t_At = 0.5;
  d.counting_n_max = 20;
  const Table w = cmd_counting(d);
  double sum = 0.0, mean = 0.0;
  for (const auto& row : w.rows) {
    sum += num(row[1]);
    mean += num(row[0]) * num(row[1]);
  }
  CHECK(std::abs(sum - 1.0) < 1e-6);
  CHECK(std::abs(mean - 10 * 0.5 * (0.1 * 0.6 + 0.15 * 0.4)) < 1e-6);
}

TEST_CASE("correlations command for parity measurements") {
  const Table t = cmd_correlations(parse_config(kParity));
  REQUIRE(t.columns.size() == 5);
  REQUIRE(t.rows.size() == 11);
  CHECK(std::abs(num(t.rows[0][1]) - 5.0 / 3.0) < 1e-9);
  CHECK(std::abs(num(t.rows[0][2])) < 1e-9);
  CHECK(std::abs(num(t.rows[0][3])) < 1e-9);
  CHECK(std::abs(num(t.rows[0][4]) - 2.5) < 1e-9);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(num(t.rows[i][1]) < num(t.rows[i - 1][1]));
    CHECK(num(t.rows[i][2]) > num(t.rows[i - 1][2]));
    CHECK(num(t.rows[i][4]) < num(t.rows[i - 1][4]));
  }
}

TEST_CASE("fano command reaches its asymptote") {
  ScenarioConfig c = parse_config(kParity);
  c.detection.eta_up = 0.0;
  c.time = TimeGrid{0.1, 2e4, 12, true};
  const Table t = cmd_fano(c);
  const double last = num(t.rows.back()[1]);
  const double limit = std::log(5.0) / 15.0 * 0.1 * 10.0;
  CHECK(std::abs(last - limit) < 1e-3 * limit);
}

TEST_CASE("waiting and kicked commands") {
  ScenarioConfig c = parse_config(kParity);
  c.time = TimeGrid{0.0, 3.0, 4, false};
  const Table w = cmd_waiting(c);
  CHECK(w.columns.size() == 9);
  CHECK(num(w.rows[0][2]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(num(w.rows[0][1]) - 1.0) < 1e-12);
  CHECK(std::abs(num(w.rows[0][3])) < 1e-12);
  for (const auto& row : w.rows) CHECK(num(row[2]) <= 1.0 + 1e-12);

  ScenarioConfig k = parse_config("[kick]\ntype = one_photon\np = 0.7\n[kicked]\nperiod_AT = 0.4\nperiods = 40\n");
  const Table s = cmd_kicked(k);
  CHECK(s.rows.size() == 40 * 20 + 1);
  for (const auto& row : s.rows) CHECK(std::isfinite(num(row[1])));
}

TEST_CASE("outputs are deterministic") {
  const ScenarioConfig c = parse_config(kParity);
  const OutputMeta meta{"trajectory", config_hash(c), c.seed};
  const auto a = run_command("trajectory", c);
  const auto b = run_command("trajectory", c, 2);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_csv(a[i], meta) == to_csv(b[i], meta));
  CHECK(to_json(a, meta) == to_json(b, meta));

  const std::string csv = to_csv(a[1], meta);
  CHECK(csv.find("# config_sha256: " + meta.config_hash) != std::string::npos);
  CHECK(csv.find("# seed: 12345") != std::string::npos);
  CHECK(csv.find("# rng: mt19937_64") != std::string::npos);
  CHECK(csv.find("run,t_At,observer,parity,mean_number\n") != std::string::npos);

  const auto j = nlohmann::json::parse(to_json(a, meta));
  CHECK(j["schema_version"] == 1);
  CHECK(j["seed"] == 12345);
  CHECK(j["tables"]["series"]["rows"].size() == a[1].rows.size());

  const auto dir = std::filesystem::temp_directory_path() / "qdamp_cli_test";
  std::filesystem::remove_all(dir);
  const auto files = write_outputs(dir, a, meta, true);
  CHECK(files.size() == 3);
  std::ifstream in(dir / "trajectory_series.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv);
  std::filesystem::remove_all(dir);

  Table nan_table{"x", {"v"}, {{std::nan("")}}};
  CHECK(nlohmann::json::parse(to_json({nan_table}, meta))["tables"]["x"]["rows"][0][0].is_null());
  CHECK(to_csv(nan_table, meta).find("\nnan\n") != std::string::npos);
}
