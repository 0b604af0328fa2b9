#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermoflux/commands.hpp"

int main(int argc, char** argv) {
  using namespace thermoflux;

  CLI::App app{"Non-isothermal porous media and ideal gas solver with extremum-principle diagnostics"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run one simulation from a config file");
  run->add_option("config", run_config, "Config file")->required()->check(CLI::ExistingFile);

  AnalyzeOptions analyze_opt;
  std::optional<double> dtilde, d, alpha;
  std::optional<std::string> out_dir;
  auto* analyze = app.add_subcommand("analyze", "Exponents, weight tables and density thresholds");
  analyze->add_option("--model", analyze_opt.model, "ideal_gas or porous_media")->required();
  analyze->add_option("--kappa1", analyze_opt.kappa1, "kappa1")->required();
  analyze->add_option("--kappa2", analyze_opt.kappa2, "kappa2")->required();
  analyze->add_option("--dtilde", dtilde, "Ideal-gas conductivity constant");
  analyze->add_option("--d", d, "Porous-media conductivity constant");
  analyze->add_option("--alpha", alpha, "Density exponent (> 1)");
  analyze->add_option("--rho-min", analyze_opt.scan.rho_min, "Lower end of the threshold scan")->capture_default_str();
  analyze->add_option("--rho-max", analyze_opt.scan.rho_max, "Upper end of the threshold scan")->capture_default_str();
  analyze->add_option("--points", analyze_opt.scan.points, "Scan points")->capture_default_str();
  analyze->add_option("--out", out_dir, "Directory for weight_plus.csv, weight_minus.csv, gtilde_scan.csv");

  std::string sweep_config;
  std::vector<std::string> vary;
  unsigned jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep, one subdirectory per point");
  sweep->add_option("config", sweep_config, "Base config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--vary", vary, "section.key=v1,v2,... (repeatable)")->required();
  sweep->add_option("--jobs", jobs, "Concurrent runs (0: all hardware threads)")->capture_default_str();

  auto* check = app.add_subcommand("check", "Run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run) return cmd_run(run_config, std::cout, std::cerr);
  if (*analyze) {
    analyze_opt.d_tilde = dtilde;
    analyze_opt.d = d;
    analyze_opt.alpha = alpha;
    analyze_opt.out_dir = out_dir;
    return cmd_analyze(analyze_opt, std::cout, std::cerr);
  }
  if (*sweep) return cmd_sweep(sweep_config, vary, jobs, std::cout, std::cerr);
  if (*check) return cmd_check(std::cout);
  return kExitUsage;
}
