#include <iostream>

#include "CLI11.hpp"
#include "ckam/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weak-KAM solvers and contact mean-field-game equilibria on the circle"};
  app.require_subcommand(1);

  ckam::CliOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;
  int grid_n = 0;
  double level = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_flag("--emit-svg", opts.emit_svg, "write SVG plots");
    sub->add_option("--seed", seed, "seed for sampled checks");
    sub->add_option("--grid-n", grid_n, "grid size override")->check(CLI::Range(8, 1 << 22));
  };

  common(app.add_subcommand("check", "print the assumption report and a-priori bounds"));
  common(app.add_subcommand("solve-hj", "solve for u_minus and u_plus"));
  auto* crit = app.add_subcommand("critical-value", "critical value with long-time cross-check");
  common(crit);
  crit->add_option("--level", level, "u-level a (default: the admissible level a_m)");
  common(app.add_subcommand("mather", "extract the K-set and its Mather measure"));
  common(app.add_subcommand("equilibrium", "iterate the best-response map to an equilibrium"));
  auto* verify = app.add_subcommand("verify", "recompute residuals of a stored (u, m) pair");
  common(verify);
  verify->add_option("--u", opts.u_path, "value function CSV")->required();
  verify->add_option("--m", opts.m_path, "measure CSV")->required();

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  opts.subcommand = sub->get_name();
  if (sub->count("--out")) opts.out_dir = out_dir;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--grid-n")) opts.grid_n = grid_n;
  if (sub->get_option_no_throw("--level") && sub->count("--level")) opts.level = level;
  return ckam::run_cli(opts, std::cout, std::cerr);
}
