#pragma once

#include <vector>

#include "ckam/grid.hpp"
#include "ckam/model.hpp"

namespace ckam {

/// Grid samples of a(x), V(x) and F(x, m) for one frozen measure m.
struct FrozenData {
  PeriodicGrid grid;
  Theta theta;
  std::vector<double> a;
  std::vector<double> v;
  std::vector<double> f;

  static FrozenData build(const ContactModel& model, const Coupling& coupling,
                          const GridMeasure& m);
  int size() const noexcept { return grid.size(); }
  /// H(x_i, u, p) - F(x_i, m).
  double hamiltonian(int i, double u, double p) const {
    return theta(u) + 0.5 * a[static_cast<std::size_t>(i)] * p * p +
           v[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(i)];
  }
};

struct SemigroupConfig {
  double dt = 0.0;         ///< time step
  double v_max = 0.0;      ///< velocity search radius
  double tol_conv = 1e-9;  ///< a-posteriori sup-norm error target for the limit
  int max_steps = 0;
  double inner_tol = 1e-15;  ///< relative tolerance of the per-node implicit solve

  /// dt = h, v_max = (D2 + 1) * a_max, max_steps = 10 * ceil(log(1/tol) / (delta dt)).
  static SemigroupConfig defaults(const ContactModel& model, const Coupling& coupling,
                                  const PeriodicGrid& grid, double tol_conv = 1e-9);
  /// Throws ConfigurationError when a field breaks a scheme requirement.
  void validate(const ContactModel& model, const Coupling& coupling,
                const PeriodicGrid& grid) const;
};

struct WeakKamSolution {
  GridFunction u;
  double residual = 0.0;     ///< kink-aware discrete HJ residual
  int steps = 0;
  bool converged = false;
  double increment = 0.0;    ///< sup-norm change of the last step
  double error_bound = 0.0;  ///< increment / (delta dt) for the backward iteration
};

/// One implicit semi-Lagrangian step of the backward semigroup.
GridFunction backward_step(const GridFunction& u, const FrozenData& data,
                           const SemigroupConfig& cfg);
GridFunction backward_step(const GridFunction& u, const ContactModel& model,
                           const Coupling& coupling, const GridMeasure& m,
                           const SemigroupConfig& cfg);

/// Mirror step of the forward semigroup (sup over forward feet).
GridFunction forward_step(const GridFunction& u, const FrozenData& data,
                          const SemigroupConfig& cfg);
GridFunction forward_step(const GridFunction& u, const ContactModel& model,
                          const Coupling& coupling, const GridMeasure& m,
                          const SemigroupConfig& cfg);

WeakKamSolution solve_u_minus(const FrozenData& data, const GridFunction& seed,
                              const SemigroupConfig& cfg);
WeakKamSolution solve_u_minus(const ContactModel& model, const Coupling& coupling,
                              const GridMeasure& m, const GridFunction& seed,
                              const SemigroupConfig& cfg);
/// Seeds with the constant a_m.
WeakKamSolution solve_u_minus(const ContactModel& model, const Coupling& coupling,
                              const GridMeasure& m, const SemigroupConfig& cfg);

/// Forward limit started from a converged u_minus.
WeakKamSolution solve_u_plus(const GridFunction& u_minus, const FrozenData& data,
                             const SemigroupConfig& cfg);
WeakKamSolution solve_u_plus(const GridFunction& u_minus, const ContactModel& model,
                             const Coupling& coupling, const GridMeasure& m,
                             const SemigroupConfig& cfg);

/// Threshold on |D+ u - D- u| above which a node is treated as a kink.
double kink_threshold(const PeriodicGrid& grid);

/// Gradient used for residuals: 0 at discrete local minima, the upwind
/// (larger |p|) one-sided difference at other kinks, centered elsewhere.
double viscosity_gradient(const GridFunction& u, int i);

std::vector<double> hj_residual_nodes(const GridFunction& u, const FrozenData& data);
double hj_residual(const GridFunction& u, const FrozenData& data);

/// Minimal discrete action over grid paths with `steps` legs from node x to node y,
/// for the Lagrangian frozen at level a_m plus F(., m).
double finite_action(const ContactModel& model, const Coupling& coupling, const GridMeasure& m,
                     int x, int y, double t, int steps);

/// All-pairs table of the same quantity, row = start node.
std::vector<std::vector<double>> finite_action_table(const ContactModel& model,
                                                     const Coupling& coupling,
                                                     const GridMeasure& m, double t, int steps);

/// Frozen-level solution w_m of H(x, a_m, Dw) = F(x, m) vanishing on the
/// maximisers of H(x, a_m, 0) - F(x, m).
GridFunction frozen_level_solution(const ContactModel& model, const Coupling& coupling,
                                   const GridMeasure& m);

struct CriticalValue {
  double value = 0.0;               ///< max_i (H(x_i, a, 0) - F(x_i, m))
  double long_time_estimate = 0.0;  ///< -T_t 0 / t at the node of largest deviation
  double horizon = 0.0;
  double discrepancy = 0.0;         ///< max_i |-T_t 0 (x_i) / t - value|
  double tolerance = 0.0;           ///< allowed discrepancy at this horizon
  bool consistent = false;
};

/// Critical value of p -> H(x, a, p) - F(x, m) with the classical
/// Lax-Oleinik long-time average as a cross-check.
CriticalValue critical_value(const ContactModel& model, double a, const Coupling& coupling,
                             const GridMeasure& m, double horizon = 40.0);

}  // namespace ckam
