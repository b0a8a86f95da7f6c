#include "ckam/weak_kam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ckam/error.hpp"

namespace ckam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_slope(const std::vector<double>& u, double h) {
  double lip = 0.0;
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    lip = std::max(lip, std::abs(u[(i + 1) % n] - u[i]));
  }
  return lip / h;
}

// Exact minimum of s -> I(x_i - s) + s^2 / (2c) over |s| <= smax, where I is the
// piecewise-linear interpolant of u. On every cell the objective is a convex
// quadratic in s, so each cell contributes a closed-form candidate.
double min_over_feet(const std::vector<double>& u, int n, int i, double h, double c,
                     double smax) {
  const double ui = u[static_cast<std::size_t>(i)];
  double best = ui;
  if (!(smax > 0.0)) return best;
  const double cells = smax / h;
  const double h2c = h * h / (2.0 * c);
  const double ratio = c / (h * h);
  auto at = [&](int k) {
    int r = k % n;
    if (r < 0) r += n;
    return u[static_cast<std::size_t>(r)];
  };
  const int d_max = std::min(static_cast<int>(std::ceil(cells)), n / 2);
  for (int side = -1; side <= 1; side += 2) {
    for (int d = 0; d < d_max; ++d) {
      const double A = at(i + side * d);
      const double B = at(i + side * (d + 1)) - A;
      const double t_hi = std::min(1.0, cells - d);
      double t = -B * ratio - d;
      t = std::clamp(t, 0.0, t_hi);
      const double s = d + t;
      const double val = A + t * B + s * s * h2c;
      if (val < best) best = val;
    }
  }
  return best;
}

// Solves w + sign * dt * theta(w) = q.
double implicit_level(const Theta& theta, double dt, double sign, double q, double inner_tol) {
  if (theta.kind() == Theta::Kind::Linear) return q / (1.0 + sign * dt * theta.slope());
  double w = q / (1.0 + sign * dt * theta.derivative(0.0));
  for (int it = 0; it < 100; ++it) {
    const double next = q - sign * dt * theta(w);
    if (std::abs(next - w) <= inner_tol * (1.0 + std::abs(next))) return next;
    w = next;
  }
  throw ConfigurationError("implicit level solve did not converge in 100 iterations (dt * lambda = " +
                           format_double(dt * theta.lambda()) + ")");
}

double window(const FrozenData& data, const SemigroupConfig& cfg, int i, double lip) {
  const double c = data.a[static_cast<std::size_t>(i)] * cfg.dt;
  // any foot beyond 2 c Lip costs more than staying put
  return std::min(cfg.dt * cfg.v_max, 2.0 * c * lip);
}

}  // namespace

FrozenData FrozenData::build(const ContactModel& model, const Coupling& coupling,
                             const GridMeasure& m) {
  const auto& grid = m.grid();
  FrozenData d{grid, model.theta(), {}, {}, coupling.on_grid(m)};
  d.a.resize(static_cast<std::size_t>(grid.size()));
  d.v.resize(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) {
    d.a[static_cast<std::size_t>(i)] = model.kinetic()(grid.node(i));
    d.v[static_cast<std::size_t>(i)] = model.potential()(grid.node(i));
  }
  validate_kinetic(model.kinetic(), grid);
  return d;
}

SemigroupConfig SemigroupConfig::defaults(const ContactModel& model, const Coupling& coupling,
                                          const PeriodicGrid& grid, double tol_conv) {
  const auto bounds = compute_bounds(model, coupling, grid);
  const auto ext = sample_extrema(model, grid);
  SemigroupConfig cfg;
  cfg.dt = grid.spacing();
  cfg.v_max = (bounds.d2_lip + 1.0) * ext.a_max;
  cfg.tol_conv = tol_conv;
  const double rate = model.theta().delta() * cfg.dt;
  cfg.max_steps = 10 * static_cast<int>(std::ceil(std::log(1.0 / tol_conv) / rate));
  return cfg;
}

void SemigroupConfig::validate(const ContactModel& model, const Coupling& coupling,
                               const PeriodicGrid& grid) const {
  if (!(dt > 0.0)) throw ConfigurationError("solver.dt must be positive");
  if (!(dt * model.theta().lambda() < 1.0)) {
    throw ConfigurationError("solver.dt * lambda must be < 1, got " +
                             format_double(dt * model.theta().lambda()));
  }
  if (!(tol_conv > 0.0)) throw ConfigurationError("solver.tol_conv must be positive");
  if (!(inner_tol > 0.0)) throw ConfigurationError("solver.inner_tol must be positive");
  if (max_steps < 1) throw ConfigurationError("solver.max_steps must be >= 1");
  const auto bounds = compute_bounds(model, coupling, grid);
  const double need = (bounds.d2_lip + 1.0) * sample_extrema(model, grid).a_max;
  if (!(v_max >= need * (1.0 - 1e-12))) {
    throw ConfigurationError("solver.v_max must be >= (D2 + 1) a_max = " + format_double(need));
  }
}

GridFunction backward_step(const GridFunction& u, const FrozenData& data,
                           const SemigroupConfig& cfg) {
  if (!(u.grid() == data.grid)) throw Error("backward_step: grid mismatch");
  const int n = data.size();
  const double h = data.grid.spacing();
  const std::vector<double> uv(u.values().begin(), u.values().end());
  const double lip = max_slope(uv, h);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double c = data.a[k] * cfg.dt;
    const double best = min_over_feet(uv, n, i, h, c, window(data, cfg, i, lip));
    const double q = best + cfg.dt * (data.f[k] - data.v[k]);
    out[k] = implicit_level(data.theta, cfg.dt, 1.0, q, cfg.inner_tol);
  }
  return GridFunction(data.grid, std::move(out));
}

GridFunction backward_step(const GridFunction& u, const ContactModel& model,
                           const Coupling& coupling, const GridMeasure& m,
                           const SemigroupConfig& cfg) {
  return backward_step(u, FrozenData::build(model, coupling, m), cfg);
}

GridFunction forward_step(const GridFunction& u, const FrozenData& data,
                          const SemigroupConfig& cfg) {
  if (!(u.grid() == data.grid)) throw Error("forward_step: grid mismatch");
  const int n = data.size();
  const double h = data.grid.spacing();
  std::vector<double> neg(u.values().size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -u.values()[i];
  const double lip = max_slope(neg, h);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double c = data.a[k] * cfg.dt;
    // the search is symmetric in s, so forward feet reduce to the backward kernel on -u
    const double best = -min_over_feet(neg, n, i, h, c, window(data, cfg, i, lip));
    const double q = best - cfg.dt * (data.f[k] - data.v[k]);
    out[k] = implicit_level(data.theta, cfg.dt, -1.0, q, cfg.inner_tol);
  }
  return GridFunction(data.grid, std::move(out));
}

GridFunction forward_step(const GridFunction& u, const ContactModel& model,
                          const Coupling& coupling, const GridMeasure& m,
                          const SemigroupConfig& cfg) {
  return forward_step(u, FrozenData::build(model, coupling, m), cfg);
}

WeakKamSolution solve_u_minus(const FrozenData& data, const GridFunction& seed,
                              const SemigroupConfig& cfg) {
  if (!(seed.grid() == data.grid)) throw Error("solve_u_minus: seed grid mismatch");
  const double rate = data.theta.delta() * cfg.dt;
  if (!(rate > 0.0)) throw ConfigurationError("solve_u_minus: delta * dt must be positive");
  WeakKamSolution sol{seed, 0.0, 0, false, kInf, kInf};
  while (sol.steps < cfg.max_steps) {
    GridFunction next = backward_step(sol.u, data, cfg);
    sol.increment = sup_distance(next, sol.u);
    sol.u = std::move(next);
    ++sol.steps;
    // q / (1 - q) with q = 1 / (1 + delta dt)
    sol.error_bound = sol.increment / rate;
    if (sol.error_bound <= cfg.tol_conv) {
      sol.converged = true;
      break;
    }
  }
  sol.residual = hj_residual(sol.u, data);
  return sol;
}

WeakKamSolution solve_u_minus(const ContactModel& model, const Coupling& coupling,
                              const GridMeasure& m, const GridFunction& seed,
                              const SemigroupConfig& cfg) {
  return solve_u_minus(FrozenData::build(model, coupling, m), seed, cfg);
}

WeakKamSolution solve_u_minus(const ContactModel& model, const Coupling& coupling,
                              const GridMeasure& m, const SemigroupConfig& cfg) {
  const double a = solve_a_m(model, coupling, m);
  return solve_u_minus(model, coupling, m, GridFunction::constant(m.grid(), a), cfg);
}

WeakKamSolution solve_u_plus(const GridFunction& u_minus, const FrozenData& data,
                             const SemigroupConfig& cfg) {
  if (!(u_minus.grid() == data.grid)) throw Error("solve_u_plus: grid mismatch");
  const double rate = data.theta.delta() * cfg.dt;
  WeakKamSolution sol{u_minus, 0.0, 0, false, kInf, kInf};
  // The forward scheme is expanding. The seed already carries an error of order tol_conv,
  // which the scheme amplifies by 1 / (1 - rate) per step, so the stopping threshold leaves
  // a factor of ten above that floor.
  const double target = 10.0 * cfg.tol_conv;
  while (sol.steps < cfg.max_steps) {
    GridFunction next = forward_step(sol.u, data, cfg);
    for (std::size_t i = 0; i < next.mutable_values().size(); ++i) {
      next.mutable_values()[i] = std::min(next.mutable_values()[i], sol.u.values()[i]);
    }
    sol.increment = sup_distance(next, sol.u);
    sol.u = std::move(next);
    ++sol.steps;
    sol.error_bound = sol.increment / rate;
    if (sol.error_bound <= target) {
      sol.converged = true;
      break;
    }
  }
  sol.residual = hj_residual(sol.u, data);
  return sol;
}

WeakKamSolution solve_u_plus(const GridFunction& u_minus, const ContactModel& model,
                             const Coupling& coupling, const GridMeasure& m,
                             const SemigroupConfig& cfg) {
  return solve_u_plus(u_minus, FrozenData::build(model, coupling, m), cfg);
}

double kink_threshold(const PeriodicGrid& grid) { return std::sqrt(grid.spacing()); }

double viscosity_gradient(const GridFunction& u, int i) {
  const double dm = backward_difference(u, i);
  const double dp = forward_difference(u, i);
  if (dm <= 0.0 && dp >= 0.0) return 0.0;
  if (std::abs(dp - dm) <= kink_threshold(u.grid())) return 0.5 * (dm + dp);
  const double left = std::max(dm, 0.0);
  const double right = std::min(dp, 0.0);
  return std::abs(left) >= std::abs(right) ? left : right;
}

std::vector<double> hj_residual_nodes(const GridFunction& u, const FrozenData& data) {
  std::vector<double> r(static_cast<std::size_t>(data.size()));
  for (int i = 0; i < data.size(); ++i) {
    r[static_cast<std::size_t>(i)] =
        std::abs(data.hamiltonian(i, u[i], viscosity_gradient(u, i)));
  }
  return r;
}

double hj_residual(const GridFunction& u, const FrozenData& data) {
  const auto r = hj_residual_nodes(u, data);
  return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

namespace {

struct ActionProblem {
  PeriodicGrid grid;
  std::vector<double> a;
  std::vector<double> potential;  // -theta(a_m) - V + F at each node
};

ActionProblem action_problem(const ContactModel& model, const Coupling& coupling,
                             const GridMeasure& m) {
  const auto data = FrozenData::build(model, coupling, m);
  const double level = model.theta()(solve_a_m(model, coupling, m));
  ActionProblem p{m.grid(), data.a, std::vector<double>(data.a.size())};
  for (std::size_t i = 0; i < p.a.size(); ++i) p.potential[i] = -level - data.v[i] + data.f[i];
  return p;
}

std::vector<double> action_row(const ActionProblem& p, int x, double t, int steps) {
  const int n = p.grid.size();
  const double tau = t / steps;
  const double h = p.grid.spacing();
  // Legs follow the straight path node to node, so every crossed cell is charged with its
  // own trapezoid weight. Prefix sums over two laps make each leg O(1).
  std::vector<double> inv_a(2 * static_cast<std::size_t>(n) + 1, 0.0),
      pot(2 * static_cast<std::size_t>(n) + 1, 0.0);
  for (int c = 0; c < 2 * n; ++c) {
    const std::size_t c0 = static_cast<std::size_t>(c % n), c1 = static_cast<std::size_t>((c + 1) % n);
    const std::size_t k = static_cast<std::size_t>(c);
    inv_a[k + 1] = inv_a[k] + 0.25 * (1.0 / p.a[c0] + 1.0 / p.a[c1]);
    pot[k + 1] = pot[k] + 0.5 * (p.potential[c0] + p.potential[c1]);
  }
  std::vector<double> cur(static_cast<std::size_t>(n), kInf), nxt(static_cast<std::size_t>(n));
  cur[static_cast<std::size_t>(p.grid.wrap(x))] = 0.0;
  for (int s = 0; s < steps; ++s) {
    std::fill(nxt.begin(), nxt.end(), kInf);
    for (int z = 0; z < n; ++z) {
      const double base = cur[static_cast<std::size_t>(z)];
      if (base == kInf) continue;
      for (int k = -n / 2; k < n - n / 2; ++k) {
        const int z2 = p.grid.wrap(z + k);
        double leg;
        if (k == 0) {
          leg = tau * p.potential[static_cast<std::size_t>(z)];
        } else {
          const int cells = std::abs(k);
          const std::size_t lo = static_cast<std::size_t>(p.grid.wrap(std::min(z, z + k)));
          const std::size_t hi = lo + static_cast<std::size_t>(cells);
          const double v = k * h / tau;
          leg = tau / cells * (v * v * (inv_a[hi] - inv_a[lo]) + (pot[hi] - pot[lo]));
        }
        const double val = base + leg;
        if (val < nxt[static_cast<std::size_t>(z2)]) nxt[static_cast<std::size_t>(z2)] = val;
      }
    }
    std::swap(cur, nxt);
  }
  return cur;
}

}  // namespace

double finite_action(const ContactModel& model, const Coupling& coupling, const GridMeasure& m,
                     int x, int y, double t, int steps) {
  if (!(t > 0.0)) throw Error("finite_action: horizon must be positive");
  if (steps < 1) throw Error("finite_action: steps must be >= 1");
  const auto p = action_problem(model, coupling, m);
  return action_row(p, x, t, steps)[static_cast<std::size_t>(m.grid().wrap(y))];
}

std::vector<std::vector<double>> finite_action_table(const ContactModel& model,
                                                     const Coupling& coupling,
                                                     const GridMeasure& m, double t, int steps) {
  if (!(t > 0.0)) throw Error("finite_action: horizon must be positive");
  if (steps < 1) throw Error("finite_action: steps must be >= 1");
  const auto p = action_problem(model, coupling, m);
  std::vector<std::vector<double>> table;
  table.reserve(static_cast<std::size_t>(m.grid().size()));
  for (int x = 0; x < m.grid().size(); ++x) table.push_back(action_row(p, x, t, steps));
  return table;
}

GridFunction frozen_level_solution(const ContactModel& model, const Coupling& coupling,
                                   const GridMeasure& m) {
  const auto data = FrozenData::build(model, coupling, m);
  const double level = model.theta()(solve_a_m(model, coupling, m));
  const int n = data.size();
  const double h = data.grid.spacing();
  std::vector<double> k(static_cast<std::size_t>(n)), rho(static_cast<std::size_t>(n));
  double k_max = -kInf;
  for (int i = 0; i < n; ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    k[j] = level + data.v[j] - data.f[j];
    k_max = std::max(k_max, k[j]);
  }
  // Jacobi-metric density sqrt(2 (max K - K) / a)
  for (std::size_t j = 0; j < k.size(); ++j) rho[j] = std::sqrt(2.0 * (k_max - k[j]) / data.a[j]);
  std::vector<double> cum(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    cum[static_cast<std::size_t>(i) + 1] =
        cum[static_cast<std::size_t>(i)] +
        0.5 * h * (rho[static_cast<std::size_t>(i)] + rho[static_cast<std::size_t>((i + 1) % n)]);
  }
  const double perimeter = cum.back();
  std::vector<int> aubry;
  for (int i = 0; i < n; ++i) {
    if (k[static_cast<std::size_t>(i)] == k_max) aubry.push_back(i);
  }
  std::vector<double> w(static_cast<std::size_t>(n), kInf);
  for (int x = 0; x < n; ++x) {
    for (int y : aubry) {
      double fwd = cum[static_cast<std::size_t>(x)] - cum[static_cast<std::size_t>(y)];
      if (fwd < 0.0) fwd += perimeter;
      const double d = std::min(fwd, perimeter - fwd);
      w[static_cast<std::size_t>(x)] = std::min(w[static_cast<std::size_t>(x)], d);
    }
  }
  return GridFunction(data.grid, std::move(w));
}

CriticalValue critical_value(const ContactModel& model, double a, const Coupling& coupling,
                             const GridMeasure& m, double horizon) {
  if (!(horizon > 0.0)) throw Error("critical_value: horizon must be positive");
  const auto data = FrozenData::build(model, coupling, m);
  const int n = data.size();
  const double h = data.grid.spacing();
  std::vector<double> k(static_cast<std::size_t>(n));
  CriticalValue cv;
  cv.value = -kInf;
  for (int i = 0; i < n; ++i) {
    k[static_cast<std::size_t>(i)] = data.hamiltonian(i, a, 0.0);
    cv.value = std::max(cv.value, k[static_cast<std::size_t>(i)]);
  }

  // classical (u-independent) Lax-Oleinik iteration from phi = 0
  const double dt = h;
  const int steps = static_cast<int>(std::ceil(horizon / dt));
  cv.horizon = steps * dt;
  const auto bounds = compute_bounds(model, coupling, data.grid);
  const double v_max = (bounds.d2_lip + 1.0) * sample_extrema(model, data.grid).a_max;
  std::vector<double> u(static_cast<std::size_t>(n), 0.0), next(static_cast<std::size_t>(n));
  for (int s = 0; s < steps; ++s) {
    const double lip = max_slope(u, h);
    for (int i = 0; i < n; ++i) {
      const std::size_t j = static_cast<std::size_t>(i);
      const double c = data.a[j] * dt;
      const double best = min_over_feet(u, n, i, h, c, std::min(dt * v_max, 2.0 * c * lip));
      next[j] = best - dt * k[j];
    }
    std::swap(u, next);
  }
  cv.discrepancy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double est = -u[static_cast<std::size_t>(i)] / cv.horizon;
    const double dev = std::abs(est - cv.value);
    if (dev >= cv.discrepancy) {
      cv.discrepancy = dev;
      cv.long_time_estimate = est;
    }
  }
  // T_t 0 + c t stays within the Jacobi diameter of the Aubry set
  cv.tolerance = (2.0 * bounds.d2_lip * kCircleDiameter + 1.0) / cv.horizon + h;
  cv.consistent = cv.discrepancy <= cv.tolerance;
  return cv;
}

}  // namespace ckam
