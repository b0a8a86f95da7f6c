#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ckam/mather.hpp"
#include "ckam/mfg.hpp"
#include "ckam/model.hpp"
#include "ckam/weak_kam.hpp"

namespace ckam {

/// Parsed JSON run configuration. Optional fields fall back to grid-dependent defaults.
struct RunConfig {
  int n = 256;

  std::string theta_kind = "linear";  // linear | linear_tanh | arctan
  double theta_slope = 1.0;
  double theta_amplitude = 0.0;
  std::string kinetic = "1";
  std::string potential = "0";

  std::string base = "0";
  double strength = 0.0;
  std::string kernel_kind = "gaussian";  // gaussian | cosine
  double kernel_eps = 0.1;

  std::optional<double> dt;
  std::optional<double> v_max;
  double tol_conv = 1e-9;
  std::optional<int> max_steps;
  double inner_tol = 1e-15;

  std::string selection = "uniform";  // uniform | residual-weighted
  std::string damping = "averaging";  // averaging | fixed
  double alpha = 1.0;
  std::optional<double> tol_m;
  double tol_mass = 1e-3;
  int max_outer = 200;
  int continuity_modes = 8;
  std::string initial = "uniform";  // uniform | dirac:<node>

  std::optional<double> tol_h;
  std::optional<double> tol_g;

  int sample_budget = 200;

  std::string out_dir = "out";
  bool emit_svg = false;
  std::uint64_t seed = 0;
};

/// Throws ConfigError naming the offending field path.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Everything a pipeline needs, built and validated from a RunConfig.
struct Problem {
  PeriodicGrid grid;
  ContactModel model;
  Coupling coupling;
  EquilibriumConfig equilibrium;  ///< carries the solver and K-set tolerances
  GridMeasure initial;

  const SemigroupConfig& solver() const { return equilibrium.solver; }
};

Problem build_problem(const RunConfig& cfg);

}  // namespace ckam
