#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace impalloc::cli;
  CLI::App app{"Importance-weighted storage allocation for lossy compression"};
  app.require_subcommand(1);

  AllocateArgs alloc;
  auto* allocate = app.add_subcommand("allocate", "Solve one configuration");
  allocate->add_option("--config", alloc.config, "Experiment JSON")->required();
  allocate->add_option("--out", alloc.out, "Output file")->required();
  allocate->add_option("--format", alloc.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Sweep the budget or varpi");
  sweep->add_option("--config", sw.config, "Experiment JSON")->required();
  sweep->add_option("--param", sw.param, "budget or varpi")->required();
  sweep->add_option("--from", sw.from, "First value")->required();
  sweep->add_option("--to", sw.to, "Last value")->required();
  sweep->add_option("--steps", sw.steps, "Number of rows (>= 2)")->required();
  sweep->add_option("--out", sw.out, "Output CSV")->required();

  VerifyArgs ver;
  std::uint64_t seed = 0;
  auto* verify = app.add_subcommand("verify", "Certify the solver's plan");
  verify->add_option("--config", ver.config, "Experiment JSON")->required();
  verify->add_option("--oracle", ver.oracle, "brute, perturb or kkt")->required();
  verify->add_option("--trials", ver.trials, "Perturbation trials");
  auto* seed_opt = verify->add_option("--seed", seed, "Random seed");

  ReproduceArgs rep;
  auto* repro = app.add_subcommand("reproduce", "Recompute a published experiment");
  repro->add_option("--experiment", rep.experiment,
                    "fig1..fig5, table1 or table2")
      ->required();
  repro->add_option("--out", rep.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*allocate) return cmd_allocate(alloc, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(sw, std::cout, std::cerr);
  if (*verify) {
    if (*seed_opt) ver.seed = seed;
    return cmd_verify(ver, std::cout, std::cerr);
  }
  return cmd_reproduce(rep, std::cout, std::cerr);
}
