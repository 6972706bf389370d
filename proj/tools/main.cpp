#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "vrmass/errors.hpp"
#include "vrmass/run.hpp"

int main(int argc, char** argv) {
  using namespace vrmass::cli;
  CLI::App app{"Volume-renormalised mass laboratory for radial asymptotically hyperbolic metrics"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  int jobs = 1;
  for (std::string_view name : {"mass", "curvature", "vstatic", "critical", "coercivity", "compare", "project"}) {
    auto* sub = app.add_subcommand(std::string(name));
    sub->add_option("--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Directory for run.json and CSV tables");
    sub->add_option("--seed", seed, "Override grid.seed");
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Override command.tol (verdict threshold)");
  }
  CLI11_PARSE(app, argc, argv);
  const auto command = *parse_command(app.get_subcommands().front()->get_name());

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const vrmass::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  // The subcommand selects the pipeline; a config naming another one is an error.
  if (cfg.command_named && cfg.command != command) {
    std::cerr << "error: command.name: config selects '" << command_name(cfg.command)
              << "' but the subcommand is '" << command_name(command) << "'\n";
    return 1;
  }
  cfg.command = command;

  const auto outcome = run(cfg, {out_dir, jobs, seed, tol});
  std::fwrite(outcome.report.data(), 1, outcome.report.size(), stdout);
  return outcome.exit_code;
}
