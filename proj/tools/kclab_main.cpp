#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kclab/app.hpp"
#include "kclab/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kolmogorov-consistency checks for probe-based sequential measurements"};
  app.require_subcommand(1);

  kclab::CommandOptions opts;
  std::vector<std::string> tol_overrides;
  std::uint64_t seed = 0;
  std::string out_dir;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Master seed (overrides the config)");
    cmd->add_option("--tol", tol_overrides, "Tolerance override name=value (repeatable)");
    cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
    cmd->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  std::string config;
  auto* run = app.add_subcommand("run", "Run the checks listed in a config");
  run->add_option("config", config, "Config file")->required();
  add_common(run);

  std::string param;
  std::string grid;
  auto* sweep = app.add_subcommand("sweep", "Tabulate witnesses against t or omega");
  sweep->add_option("config", config, "Config file")->required();
  sweep->add_option("--param", param, "t or omega")->required();
  sweep->add_option("--grid", grid, "Comma list or lin:start:stop:num")->required();
  add_common(sweep);

  auto* oracle = app.add_subcommand("oracle", "Cross-check probabilities on the naive path");
  oracle->add_option("config", config, "Config file")->required();
  add_common(oracle);

  auto* search = app.add_subcommand("search", "Search for degenerate noncommutative KC-consistent models");
  search->add_option("config", config, "Config file")->required();
  add_common(search);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kclab::kExitConfig;
  }

  for (auto* cmd : {run, sweep, oracle, search})
    if (cmd->parsed() && cmd->count("--seed") > 0) opts.seed = seed;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  try {
    for (const auto& t : tol_overrides) opts.tolerances.push_back(kclab::parse_tolerance_override(t));
  } catch (const kclab::Error& e) {
    std::cerr << "kclab: " << e.what() << '\n';
    return kclab::kExitConfig;
  }

  if (run->parsed()) return kclab::run_command(config, opts, std::cerr);
  if (sweep->parsed()) return kclab::sweep_command(config, param, grid, opts, std::cerr);
  if (oracle->parsed()) return kclab::oracle_command(config, opts, std::cerr);
  return kclab::search_command(config, opts, std::cerr);
}
