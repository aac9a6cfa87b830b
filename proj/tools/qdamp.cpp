#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>

#include "qdamp/cli.hpp"

int main(int argc, char** argv) {
  namespace qc = qdamp::cli;
  CLI::App app{"Damped oscillator and micromaser detection statistics"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  for (const auto& name : qc::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " analysis");
    sub->add_option("--config", config_path, "INI scenario file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "master seed, overrides trajectory.seed");
    sub->add_option("--threads", threads, "worker threads for trajectories")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    qc::ScenarioConfig cfg = qc::load_config(config_path);
    if (seed) cfg.seed = *seed;
    const auto tables = qc::run_command(command, cfg, threads);
    const qc::OutputMeta meta{command, qc::config_hash(cfg), cfg.seed};
    for (const auto& path : qc::write_outputs(out_dir, tables, meta, cfg.json)) std::cout << path.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << qc::error_report(e) << "\n";
    return qc::exit_code(e);
  }
  return 0;
}
