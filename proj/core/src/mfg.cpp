#include "ckam/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ckam/error.hpp"

namespace ckam {

std::string to_string(Selection s) {
  return s == Selection::Uniform ? "uniform" : "residual-weighted";
}

std::string to_string(Damping d) { return d == Damping::Averaging ? "averaging" : "fixed"; }

EquilibriumConfig EquilibriumConfig::defaults(const ContactModel& model, const Coupling& coupling,
                                              const PeriodicGrid& grid) {
  EquilibriumConfig cfg;
  cfg.tol_m = std::max(1e-6, grid.spacing() / 10.0);
  cfg.solver = SemigroupConfig::defaults(model, coupling, grid);
  cfg.kset = KSetTolerances::defaults(model, grid, cfg.solver.tol_conv);
  return cfg;
}

void EquilibriumConfig::validate() const {
  if (damping == Damping::Fixed && !(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigurationError("equilibrium.alpha must lie in (0, 1]");
  }
  if (!(tol_m > 0.0)) throw ConfigurationError("equilibrium.tol_m must be positive");
  if (!(tol_mass >= 0.0)) throw ConfigurationError("equilibrium.tol_mass must be nonnegative");
  if (max_outer < 1) throw ConfigurationError("equilibrium.max_outer must be >= 1");
  if (continuity_modes < 1) throw ConfigurationError("equilibrium.continuity_modes must be >= 1");
}

BestResponse best_response(const GridMeasure& m, const ContactModel& model,
                           const Coupling& coupling, const EquilibriumConfig& cfg,
                           const GridFunction* warm) {
  const auto data = FrozenData::build(model, coupling, m);
  const GridFunction seed =
      warm ? *warm : GridFunction::constant(m.grid(), solve_a_m(model, coupling, m));
  WeakKamSolution sol = solve_u_minus(data, seed, cfg.solver);
  if (!sol.converged) {
    throw Error("best_response: HJ solve did not converge in " + std::to_string(sol.steps) +
                " steps (last increment " + format_double(sol.increment) + ")");
  }
  KSet kset = extract_kset(sol.u, data, cfg.kset);

  std::vector<double> w(static_cast<std::size_t>(m.grid().size()), 0.0);
  if (cfg.selection == Selection::Uniform) {
    for (int node : kset.nodes) w[static_cast<std::size_t>(node)] = 1.0;
  } else {
    for (std::size_t i = 0; i < kset.size(); ++i) {
      w[static_cast<std::size_t>(kset.nodes[i])] = 1.0 / (1.0 + kset.h_residual[i] / cfg.kset.tol_h);
    }
  }
  return {GridMeasure::normalized(m.grid(), std::move(w)), std::move(sol), std::move(kset)};
}

double support_leak(const GridMeasure& m, const KSet& kset) {
  double inside = 0.0;
  for (int node : kset.nodes) inside += m[node];
  return std::max(0.0, 1.0 - inside);
}

EquilibriumResult iterate_equilibrium(const GridMeasure& m0, const ContactModel& model,
                                      const Coupling& coupling, const EquilibriumConfig& cfg) {
  cfg.validate();
  GridMeasure m = m0;
  GridMeasure previous = m0;
  GridFunction warm = GridFunction::constant(m0.grid(), solve_a_m(model, coupling, m0));
  EquilibriumResult res{warm, m0, {}, 0.0, 0.0, 0.0, 0.0, 0, false, {}};

  for (int k = 0; k < cfg.max_outer; ++k) {
    BestResponse br = best_response(m, model, coupling, cfg, &warm);
    const double gap = k == 0 ? d1_distance(m, br.measure) : d1_distance(previous, m);
    const double leak = support_leak(m, br.kset);
    res.trace.push_back({k, gap, static_cast<int>(m.support().size()), leak});
    res.u = br.solution.u;
    res.m = m;
    res.kset = br.kset;
    res.d1_gap = gap;
    res.support_leak = leak;
    res.iterations = k;
    if (k > 0 && gap <= cfg.tol_m && leak <= cfg.tol_mass) {
      res.converged = true;
      break;
    }
    const double alpha =
        cfg.damping == Damping::Averaging ? 1.0 / static_cast<double>(k + 1) : cfg.alpha;
    previous = m;
    m = m.blend(br.measure, alpha);
    warm = br.solution.u;
  }
  res.hj_residual = hj_residual(res.u, model, coupling, res.m);
  res.continuity_residual =
      continuity_residual(res.u, res.m, model, coupling, cfg.continuity_modes);
  return res;
}

double hj_residual(const GridFunction& u, const ContactModel& model, const Coupling& coupling,
                   const GridMeasure& m) {
  const auto data = FrozenData::build(model, coupling, m);
  double worst = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const double r = std::abs(data.hamiltonian(i, u[i], viscosity_gradient(u, i)));
    const double sub = std::min(data.hamiltonian(i, u[i], backward_difference(u, i)),
                                data.hamiltonian(i, u[i], forward_difference(u, i)));
    worst = std::max({worst, r, sub});
  }
  return worst;
}

double continuity_residual(const GridFunction& u, const GridMeasure& m, const ContactModel& model,
                           const Coupling& /*coupling*/, int modes) {
  if (modes < 1) throw Error("continuity_residual: modes must be >= 1");
  if (!(u.grid() == m.grid())) throw Error("continuity_residual: grid mismatch");
  const auto& grid = m.grid();
  std::vector<double> flux;  // w_i H_p(x_i, u_i, Du_i) on the support
  std::vector<double> xs;
  for (int i : m.support()) {
    const double x = grid.node(i);
    const double p = viscosity_gradient(u, i);
    flux.push_back(m[i] * model.partials(x, u[i], p).hp);
    xs.push_back(x);
  }
  double worst = 0.0;
  for (int k = 1; k <= modes; ++k) {
    const double w = 2.0 * std::numbers::pi * k;
    double s_sin = 0.0, s_cos = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      s_sin += w * std::cos(w * xs[j]) * flux[j];   // phi = sin
      s_cos += -w * std::sin(w * xs[j]) * flux[j];  // phi = cos
    }
    worst = std::max({worst, std::abs(s_sin), std::abs(s_cos)});
  }
  return worst;
}

}  // namespace ckam
