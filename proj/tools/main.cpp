#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "unipark/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate and verify inverse-optimal parking controllers for the unicycle"};
  app.require_subcommand(1);

  unipark::cli::RunOptions opts;
  std::string config;
  std::string out = ".";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--dt", opts.dt, "override the step size of every scenario");
    sub->add_option("--t-max", opts.t_max, "override the horizon of every scenario");
    sub->add_flag("--quiet", opts.quiet, "only report errors");
  };
  add_common(app.add_subcommand("simulate", "run every scenario in turn"));
  add_common(app.add_subcommand("sweep", "run every scenario on a worker pool"));
  add_common(app.add_subcommand("compare", "sweep and tabulate peak effort against the first scenario"));
  add_common(app.add_subcommand("adaptive", "sweep and check the adaptive transient bound"));
  add_common(app.add_subcommand("probe", "cost of kappa-scaled feedback over each scenario's kappa grid"));
  auto* table = app.add_subcommand("penalty-table", "dump penalty functions on a grid");
  table->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return unipark::cli::kExitConfig;
  }

  const auto* sub = app.get_subcommands().front();
  opts.config = config;
  opts.out_dir = out;
  return unipark::cli::run(sub->get_name(), opts, std::cerr);
}
