// Acceptance harness. Prints one PASS/FAIL line per criterion followed by
// indented sub-check lines; exits non-zero when any selected criterion fails.
//
//   acceptance                 run every criterion
//   acceptance --criterion 4   run criterion 4 only (repeatable)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ckam/dynamics.hpp"
#include "ckam/mather.hpp"
#include "ckam/mfg.hpp"
#include "ckam/weak_kam.hpp"
#include "consistency.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace ckam;
using namespace testmodels;

namespace {

class Report {
 public:
  explicit Report(int id) : id_(id) {}

  bool check(bool ok, const std::string& what) {
    lines_.push_back(std::string(ok ? "    ok    " : "    FAILED") + "  " + what);
    all_ &= ok;
    return ok;
  }
  /// Diagnostics that are printed but do not decide the criterion.
  void note(const std::string& what) { lines_.push_back("    note      " + what); }

  bool finish(const std::string& title) const {
    std::printf("C%d %s  %s\n", id_, all_ ? "PASS" : "FAIL", title.c_str());
    for (const auto& l : lines_) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
    return all_;
  }

 private:
  int id_;
  bool all_ = true;
  std::vector<std::string> lines_;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

WeakKamSolution solve(const ContactModel& model, const Coupling& c, const GridMeasure& m,
                      double seed, double tol_conv = 1e-9) {
  const auto cfg = SemigroupConfig::defaults(model, c, m.grid(), tol_conv);
  return solve_u_minus(model, c, m, GridFunction::constant(m.grid(), seed), cfg);
}

double lipschitz_estimate(const GridFunction& u) {
  double worst = 0.0;
  for (int i = 0; i < u.grid().size(); ++i) worst = std::max(worst, std::abs(forward_difference(u, i)));
  return worst;
}

// ---------------------------------------------------------------------------

bool criterion1() {
  Report r(1);
  const auto t0 = std::chrono::steady_clock::now();
  PeriodicGrid g(128);
  const auto model = flat_model();
  const auto u = solve(model, Coupling::none(), GridMeasure::uniform(g), 1.0);
  r.check(u.converged && u.u.sup_norm() <= 1e-8, fmt("u_minus from seed 1: sup|u| = %.3g <= 1e-8", u.u.sup_norm()));
  const auto cfg = EquilibriumConfig::defaults(model, Coupling::none(), g);
  const auto eq = iterate_equilibrium(GridMeasure::dirac(g, 17), model, Coupling::none(), cfg);
  r.check(eq.converged, fmt("equilibrium converged after %d outer steps", eq.iterations));
  r.check(eq.d1_gap <= 1e-10, fmt("d1_gap %.3g <= 1e-10", eq.d1_gap));
  r.check(eq.hj_residual <= 1e-10, fmt("HJ residual %.3g <= 1e-10", eq.hj_residual));
  r.check(eq.continuity_residual <= 1e-10, fmt("continuity residual %.3g <= 1e-10", eq.continuity_residual));
  const double t = seconds_since(t0);
  r.check(t < 1.0, fmt("runtime %.3f s < 1 s", t));
  return r.finish("trivial equilibrium (flat model, n = 128)");
}

bool criterion2() {
  Report r(2);
  const auto model = cosine_model();
  const double exact = oracle::cosine_profile(0.5, true);

  PeriodicGrid fine(4096);
  const auto t_fine = std::chrono::steady_clock::now();
  const auto ref = solve(model, Coupling::none(), GridMeasure::uniform(fine), -1.0);
  const double ref_half = ref.u[fine.nearest(0.5)];
  r.note(fmt("n = 4096 oracle: u_minus(1/2) = %.7f (%.1f s); continuum ODE value %.7f", ref_half,
             seconds_since(t_fine), exact));

  std::vector<double> errors, hs;
  for (int n : {128, 256, 512}) {
    PeriodicGrid g(n);
    const double h = g.spacing();
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = GridMeasure::uniform(g);
    const auto data = FrozenData::build(model, Coupling::none(), m);
    const auto cfg = SemigroupConfig::defaults(model, Coupling::none(), g);
    const auto sol = solve_u_minus(data, GridFunction::constant(g, -1.0), cfg);
    const int half = g.nearest(0.5);
    const double value = sol.u[half];

    r.check(std::abs(value - 1.0) <= 3.0 * h,
            fmt("n = %d: literal target u_minus(1/2) = 1, got %.7f, error %.4f vs 3h = %.4f", n, value,
                std::abs(value - 1.0), 3.0 * h));
    r.note(fmt("n = %d companion: |u_minus(1/2) - oracle| = %.2e <= 3h = %.2e : %s", n,
               std::abs(value - ref_half), 3.0 * h,
               std::abs(value - ref_half) <= 3.0 * h ? "holds" : "VIOLATED"));
    errors.push_back(std::abs(value - exact));
    hs.push_back(h);

    try {
      const auto k = extract_kset(sol.u, data, KSetTolerances::defaults(model, g));
      const double pos = k.size() ? k.positions[0] : -1.0;
      r.check(k.size() == 1 && circle_distance(pos, 0.5) <= h,
              fmt("n = %d: literal target K-set = one node within h of 0.5, got %zu node(s) at x = %.6f", n,
                  k.size(), pos));
      const bool companion = k.size() == 1 && circle_distance(pos, 0.0) <= h;
      r.note(fmt("n = %d companion: K-set is one node within h of the maximiser of V (x = 0) : %s", n,
                 companion ? "holds" : "VIOLATED"));
    } catch (const EmptyKSetError& e) {
      r.check(false, fmt("n = %d: K-set empty (%s)", n, e.what()));
    }
    const double t = seconds_since(t0);
    r.check(t < 10.0, fmt("n = %d: runtime %.2f s < 10 s", n, t));
  }
  const double order = std::log(errors.front() / errors.back()) / std::log(hs.front() / hs.back());
  r.check(order >= 0.9, fmt("observed order %.3f >= 0.9 (errors %.2e, %.2e, %.2e against the continuum value)",
                            order, errors[0], errors[1], errors[2]));
  return r.finish("cosine benchmark (theta = id, a = 1, V = cos 2 pi x)");
}

bool criterion3() {
  Report r(3);
  PeriodicGrid g(128);
  const auto model = cosine_model();
  const auto m = GridMeasure::uniform(g);
  const auto data = FrozenData::build(model, Coupling::none(), m);
  const auto cfg = SemigroupConfig::defaults(model, Coupling::none(), g);
  const double factor = 1.0 / (1.0 + model.theta().delta() * cfg.dt);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> val(-2.0, 2.0), bump(0.0, 1.0);
  double worst_excess = -1e300;
  int ordering_violations = 0;
  for (int pair = 0; pair < 100; ++pair) {
    std::vector<double> a(128), b(128), c(128);
    for (int i = 0; i < 128; ++i) {
      a[i] = val(rng);
      b[i] = val(rng);
      c[i] = a[i] + bump(rng);
    }
    GridFunction phi(g, a), psi(g, b), above(g, c);
    for (int step = 0; step < 3; ++step) {
      const auto p1 = backward_step(phi, data, cfg), p2 = backward_step(psi, data, cfg);
      worst_excess = std::max(worst_excess, sup_distance(p1, p2) - factor * sup_distance(phi, psi));
      const auto q = backward_step(above, data, cfg);
      for (int i = 0; i < 128; ++i) ordering_violations += p1[i] > q[i];
      phi = p1;
      psi = p2;
      above = q;
    }
  }
  r.check(worst_excess <= 1e-12,
          fmt("max over 300 steps of |T phi - T psi| - |phi - psi| / (1 + delta dt) = %.3g <= 1e-12", worst_excess));
  r.check(ordering_violations == 0, fmt("ordered seeds stay ordered: %d violations", ordering_violations));
  return r.finish("contraction and monotonicity over 100 random seed pairs");
}

bool criterion4() {
  Report r(4);
  std::mt19937_64 rng(44);
  auto draw = [&](const PeriodicGrid& g, int max_atoms, std::vector<oracle::Atom>& atoms) {
    std::uniform_int_distribution<int> count(1, max_atoms), node(0, g.size() - 1);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    std::vector<double> weights(g.size(), 0.0);
    const int k = count(rng);
    for (int a = 0; a < k; ++a) weights[node(rng)] += w(rng);
    auto m = GridMeasure::normalized(g, weights);
    atoms.clear();
    for (int i : m.support()) atoms.push_back({i, m[i]});
    return m;
  };
  double worst = 0.0;
  std::vector<oracle::Atom> a, b, c;
  for (int trial = 0; trial < 200; ++trial) {
    PeriodicGrid g(16 + trial % 113);
    const auto ma = draw(g, 4, a), mb = draw(g, 4, b);
    worst = std::max(worst, std::abs(d1_distance(ma, mb) - oracle::transport_cost(a, b, g.size())));
  }
  r.check(worst <= 1e-9, fmt("200 pairs against the min-cost-flow oracle: max deviation %.3g <= 1e-9", worst));

  double asym = 0.0, triangle = -1e300, self = 0.0, negative = 0.0;
  PeriodicGrid g(96);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = draw(g, 6, a), y = draw(g, 6, b), z = draw(g, 6, c);
    const double xy = d1_distance(x, y), yx = d1_distance(y, x);
    asym = std::max(asym, std::abs(xy - yx));
    triangle = std::max(triangle, xy - d1_distance(x, z) - d1_distance(z, y));
    self = std::max(self, d1_distance(x, x));
    negative = std::min(negative, xy);
  }
  r.check(asym <= 1e-12, fmt("symmetry defect %.3g <= 1e-12", asym));
  r.check(triangle <= 1e-12, fmt("triangle excess %.3g <= 1e-12", triangle));
  r.check(self <= 1e-12 && negative >= 0.0, fmt("d(x, x) <= %.3g, min d = %.3g >= 0", self, negative));
  return r.finish("exact circular Wasserstein-1 distance");
}

bool criterion5() {
  Report r(5);
  struct Case {
    const char* name;
    ContactModel model;
  };
  for (const Case& c : {Case{"cosine", cosine_model()}, Case{"double well", double_well_model()}}) {
    PeriodicGrid g(256);
    const auto m = GridMeasure::uniform(g);
    const auto data = FrozenData::build(c.model, Coupling::none(), m);
    // the u^2 test function sees the solver error directly, so solve two digits tighter
    const auto cfg = SemigroupConfig::defaults(c.model, Coupling::none(), g, 1e-11);
    const auto sol = solve_u_minus(data, GridFunction::constant(g, 0.0), cfg);
    const auto k = extract_kset(sol.u, data, KSetTolerances::defaults(c.model, g, 1e-11));
    double drift = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      drift = std::max(drift, fixed_point_drift(c.model, Coupling::none(), m, {k.positions[i], k.u_values[i], 0.0}));
    }
    r.check(drift <= 1e-6, fmt("%s: %zu K-set node(s), max fixed-point drift %.3g <= 1e-6", c.name, k.size(), drift));
    const auto eta = build_mather_measure(k, sol.u);
    const double inv = invariance_check(eta, c.model, Coupling::none(), m, 1.0, default_test_functions());
    r.check(inv <= 1e-9, fmt("%s: invariance defect of the Mather measure %.3g <= 1e-9", c.name, inv));
  }

  const auto model = cosine_model();
  const auto m = GridMeasure::uniform(PeriodicGrid(64));
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> xs(0.0, 1.0), ps(-2.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    ContactState s{xs(rng), 0.0, ps(rng)};
    s.u = -0.5 * s.p * s.p - std::cos(2.0 * std::numbers::pi * s.x);
    const auto traj = integrate_orbit(model, Coupling::none(), m, s, FlowConfig{});
    for (double h : traj.h_m) worst = std::max(worst, std::abs(h));
  }
  r.check(worst <= 1e-8, fmt("20 zero-level orbits over t <= 1: max |H_m| = %.3g <= 1e-8", worst));
  return r.finish("Mather-set dynamics");
}

bool criterion6() {
  Report r(6);
  PeriodicGrid g(256);
  const auto model = cosine_model();

  auto run = [&](double beta, bool literal) {
    const auto coupling = kernel_coupling(beta, 0.1);
    const auto cfg = EquilibriumConfig::defaults(model, coupling, g);
    const auto t0 = std::chrono::steady_clock::now();
    const auto eq = iterate_equilibrium(GridMeasure::uniform(g), model, coupling, cfg);
    const double t = seconds_since(t0);
    const auto candidates = oracle::consistent_single_atoms(model, coupling, g, cfg.solver, cfg.kset);
    int heaviest = 0;
    for (int i = 0; i < g.size(); ++i) {
      if (eq.m[i] > eq.m[heaviest]) heaviest = i;
    }
    const bool atom_ok = !candidates.empty() && oracle::within_cells(heaviest, candidates, g.size(), 1);
    std::string cand = candidates.empty() ? "none" : "";
    for (std::size_t i = 0; i < candidates.size(); ++i) cand += (i ? "," : "") + std::to_string(candidates[i]);
    const std::string tag = fmt("beta = %+.1f", beta);
    const std::vector<std::pair<bool, std::string>> checks = {
        {eq.converged, fmt("%s: converged = %s after %d outer steps (d1_gap %.3g, leak %.3g)", tag.c_str(),
                           eq.converged ? "true" : "false", eq.iterations, eq.d1_gap, eq.support_leak)},
        {atom_ok, fmt("%s: heaviest node %d (mass %.4f) within one cell of consistent single atoms {%s}", tag.c_str(),
                      heaviest, eq.m[heaviest], cand.c_str())},
        {eq.continuity_residual <= 1e-10, fmt("%s: continuity residual %.3g <= 1e-10", tag.c_str(), eq.continuity_residual)},
        {eq.support_leak <= 1e-3, fmt("%s: support leak %.3g <= 1e-3", tag.c_str(), eq.support_leak)},
        {t < 60.0, fmt("%s: runtime %.1f s < 60 s", tag.c_str(), t)}};
    for (const auto& [ok, text] : checks) {
      if (literal) {
        r.check(ok, text);
      } else {
        r.note("companion " + text + (ok ? " : holds" : " : VIOLATED"));
      }
    }
  };
  run(0.5, true);
  // beta > 0 raises F where the mass sits and pushes the best response away;
  // the attracting sign is reported alongside for comparison
  run(-0.5, false);
  return r.finish("coupled equilibrium (wrapped Gaussian kernel, eps = 0.1, n = 256)");
}

bool criterion7() {
  Report r(7);
  PeriodicGrid g(256);
  const auto model = cosine_model();
  const auto coupling = kernel_coupling(0.5, 0.1);
  const auto cfg = SemigroupConfig::defaults(model, coupling, g);
  const int half = g.nearest(0.5);
  const auto target = GridMeasure::dirac(g, half);
  const auto base = solve_u_minus(model, coupling, target, GridFunction::constant(g, 0.0), cfg);
  double last = 1e300;
  bool decreasing = true;
  for (int j : {2, 4, 8, 16}) {
    std::vector<double> w(256, 0.0);
    w[half] = 1.0 - 1.0 / j;
    w[0] = 1.0 / j;
    const GridMeasure mj(g, w);
    const auto sol = solve_u_minus(model, coupling, mj, GridFunction::constant(g, 0.0), cfg);
    const double gap = sup_distance(sol.u, base.u);
    const double bound = coupling.lip_in_m() * d1_distance(mj, target) / model.theta().delta() + 2.0 * cfg.tol_conv;
    r.check(sol.converged && gap <= bound, fmt("j = %2d: |u_mj - u_m| = %.4e <= %.4e", j, gap, bound));
    decreasing &= gap < last;
    last = gap;
  }
  r.check(decreasing, "gaps strictly decrease in j");
  return r.finish("stability of u_m in the measure");
}

bool criterion8() {
  Report r(8);
  PeriodicGrid g(128);
  struct Case {
    std::string name;
    ContactModel model;
    Coupling coupling;
  };
  const std::vector<Case> cases = {
      {"cosine, uncoupled", cosine_model(), Coupling::none()},
      {"cosine, gaussian beta=+0.5", cosine_model(), kernel_coupling(0.5)},
      {"cosine, gaussian beta=-0.5", cosine_model(), kernel_coupling(-0.5)},
      {"double well, cosine kernel beta=0.3 + g", double_well_model(),
       Coupling(Profile::from_expression(parse_expression("0.2*sin(2*pi*x)")), 0.3, Kernel::cosine())},
      {"tanh theta, variable a, gaussian beta=0.5",
       ContactModel(Theta::linear_tanh(0.6, 0.4), Profile::from_expression(parse_expression("1 + 0.3*cos(2*pi*x)")),
                    Profile::from_expression(parse_expression("cos(2*pi*x)"))),
       kernel_coupling(0.5, 0.2)}};
  std::mt19937_64 rng(88);
  std::uniform_int_distribution<int> node(0, g.size() - 1);
  for (const auto& c : cases) {
    const auto b = compute_bounds(c.model, c.coupling, g, 1.0);
    double worst_a = 0.0, worst_u = 0.0, worst_lip = 0.0, worst_lower = -1e300, worst_upper = -1e300;
    std::vector<double> mix(g.size(), 0.0);
    mix[5] = 0.3;
    mix[70] = 0.7;
    for (const auto& m : {GridMeasure::uniform(g), GridMeasure::dirac(g, 0), GridMeasure::dirac(g, 43), GridMeasure(g, mix)}) {
      worst_a = std::max(worst_a, std::abs(solve_a_m(c.model, c.coupling, m)));
      const auto sol = solve_u_minus(c.model, c.coupling, m, SemigroupConfig::defaults(c.model, c.coupling, g));
      worst_u = std::max(worst_u, sol.u.sup_norm());
      worst_lip = std::max(worst_lip, lipschitz_estimate(sol.u));
      const auto w = frozen_level_solution(c.model, c.coupling, m);
      for (double t : {1.0, 2.0}) {
        const auto table = finite_action_table(c.model, c.coupling, m, t, static_cast<int>(16 * t));
        for (int s = 0; s < 50; ++s) {
          const int x = node(rng), y = node(rng);
          worst_lower = std::max(worst_lower, (w[y] - w[x]) - table[x][y]);
          worst_upper = std::max(worst_upper, table[x][y] - (b.e_t + 2.0 * b.d2_lip * kCircleDiameter));
        }
      }
    }
    const double h = g.spacing();
    r.check(worst_a <= b.d1_bound, fmt("%s: max |a_m| %.4f <= D1 %.4f", c.name.c_str(), worst_a, b.d1_bound));
    r.check(worst_u <= b.d3_sup, fmt("%s: max |u_m| %.4f <= D3 %.4f", c.name.c_str(), worst_u, b.d3_sup));
    r.check(worst_lip <= b.d2_lip + 10.0 * h,
            fmt("%s: adjacent-node slope %.4f <= D2 + 10h = %.4f", c.name.c_str(), worst_lip, b.d2_lip + 10.0 * h));
    r.check(worst_lower <= 1e-9, fmt("%s: lower action bound, max (w(y) - w(x)) - h_t(x,y) = %.3g <= 0",
                                     c.name.c_str(), worst_lower));
    r.check(worst_upper <= 0.0, fmt("%s: upper action bound, max h_t(x,y) - (E_t0 + 2 D2 diam) = %.3g <= 0",
                                    c.name.c_str(), worst_upper));
  }
  return r.finish("a-priori bounds across test couplings");
}

bool criterion9() {
  Report r(9);
  PeriodicGrid g(256);
  struct Case {
    std::string name;
    ContactModel model;
    Coupling coupling;
    GridMeasure m;
  };
  const std::vector<Case> cases = {
      {"flat", flat_model(), Coupling::none(), GridMeasure::uniform(g)},
      {"cosine", cosine_model(), Coupling::none(), GridMeasure::uniform(g)},
      {"double well", double_well_model(), Coupling::none(), GridMeasure::uniform(g)},
      {"cosine, beta=+0.5 at delta_1/2", cosine_model(), kernel_coupling(0.5), GridMeasure::dirac(g, 128)},
      {"cosine, beta=-0.5 at delta_0", cosine_model(), kernel_coupling(-0.5), GridMeasure::dirac(g, 0)},
      {"tanh theta",
       ContactModel(Theta::linear_tanh(0.6, 0.4), Profile::constant(1.0),
                    Profile::from_expression(parse_expression("cos(2*pi*x)"))),
       Coupling::none(), GridMeasure::uniform(g)}};
  for (const auto& c : cases) {
    const auto cfg = SemigroupConfig::defaults(c.model, c.coupling, g);
    const auto hi = solve_u_minus(c.model, c.coupling, c.m, GridFunction::constant(g, 10.0), cfg);
    const auto lo = solve_u_minus(c.model, c.coupling, c.m, GridFunction::constant(g, -10.0), cfg);
    const double gap = sup_distance(hi.u, lo.u);
    r.check(hi.converged && lo.converged && gap <= 2.0 * cfg.tol_conv,
            fmt("%s: |u(+10) - u(-10)| = %.3g <= %.1e", c.name.c_str(), gap, 2.0 * cfg.tol_conv));
  }
  return r.finish("seed independence of u_minus");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (1-9); repeat to select several")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::vector<std::function<bool()>> criteria = {criterion1, criterion2, criterion3,
                                                       criterion4, criterion5, criterion6,
                                                       criterion7, criterion8, criterion9};
  bool all = true;
  for (int id : selected) {
    try {
      all &= criteria[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
      std::printf("C%d FAIL  aborted: %s\n", id, e.what());
      all = false;
    }
  }
  return all ? 0 : 1;
}
