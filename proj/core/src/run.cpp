#include "ckam/run.hpp"

#include <filesystem>
#include <ostream>

#include "ckam/config.hpp"
#include "ckam/dynamics.hpp"
#include "ckam/error.hpp"
#include "ckam/mather.hpp"
#include "ckam/mfg.hpp"
#include "ckam/report.hpp"
#include "ckam/weak_kam.hpp"
#include "json.hpp"

namespace ckam {

namespace {

using ojson = nlohmann::ordered_json;

struct Context {
  RunConfig config;
  Problem problem;
  std::filesystem::path out_dir;
};

Context prepare(const CliOptions& opts, std::optional<int> forced_n = std::nullopt) {
  RunConfig cfg = load_run_config(opts.config_path);
  if (opts.grid_n) cfg.n = *opts.grid_n;
  if (forced_n) cfg.n = *forced_n;
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  if (opts.emit_svg) cfg.emit_svg = true;
  if (cfg.n < 8) throw ConfigError("grid.n", "must be >= 8");
  Problem problem = build_problem(cfg);
  std::filesystem::path dir(cfg.out_dir);
  return {std::move(cfg), std::move(problem), dir};
}

void ensure_dir(const std::filesystem::path& dir) { std::filesystem::create_directories(dir); }

std::string path_in(const std::filesystem::path& dir, const char* name) {
  return (dir / name).string();
}

void write_json(const std::filesystem::path& dir, const char* name, const ojson& j) {
  write_text_file(path_in(dir, name), j.dump(2) + "\n");
}

void validate_solver(const Problem& p) {
  require_assumptions(check_assumptions(p.model, p.coupling, p.grid, 32));
  p.solver().validate(p.model, p.coupling, p.grid);
}

ojson solution_json(const WeakKamSolution& s) {
  return ojson{{"converged", s.converged},
               {"steps", s.steps},
               {"last_increment", s.increment},
               {"error_bound", s.error_bound},
               {"hj_residual", s.residual}};
}

ojson kset_json(const KSet& k) {
  ojson nodes = ojson::array();
  for (std::size_t i = 0; i < k.size(); ++i) {
    nodes.push_back({{"index", k.nodes[i]},
                     {"x", k.positions[i]},
                     {"u", k.u_values[i]},
                     {"h_residual", k.h_residual[i]},
                     {"g_residual", k.g_residual[i]}});
  }
  return nodes;
}

int cmd_check(const CliOptions& opts, std::ostream& out) {
  Context ctx = prepare(opts);
  const auto& p = ctx.problem;
  const auto rep = check_assumptions(p.model, p.coupling, p.grid, ctx.config.sample_budget,
                                     ctx.config.seed);
  for (const auto& c : rep.checks) {
    out << c.name << ' ' << (c.passed ? "PASS" : "FAIL") << "  " << c.detail << '\n';
  }
  out << "a_min " << format_double(rep.a_min) << "  a_max " << format_double(rep.a_max) << '\n';
  out << "f_infinity " << format_double(p.coupling.f_infinity()) << " (sampled "
      << format_double(rep.f_infinity_estimate) << ")  lip_in_m "
      << format_double(p.coupling.lip_in_m()) << " (sampled "
      << format_double(rep.lip_in_m_estimate) << ")\n";
  if (p.model.theta().delta() > 0.0) {
    const auto b = compute_bounds(p.model, p.coupling, p.grid);
    out << "D1 " << format_double(b.d1_bound) << "  D2 " << format_double(b.d2_lip) << "  D3 "
        << format_double(b.d3_sup) << "  E_t0 " << format_double(b.e_t) << "  B+c "
        << format_double(b.b_const) << '\n';
  }
  return rep.all_passed() ? kExitSuccess : kExitError;
}

int cmd_solve_hj(const CliOptions& opts, std::ostream& out) {
  Context ctx = prepare(opts);
  const auto& p = ctx.problem;
  validate_solver(p);
  ensure_dir(ctx.out_dir);
  const double a_m = solve_a_m(p.model, p.coupling, p.initial);
  const auto data = FrozenData::build(p.model, p.coupling, p.initial);
  const auto minus = solve_u_minus(data, GridFunction::constant(p.grid, a_m), p.solver());
  write_csv(path_in(ctx.out_dir, "u_minus.csv"), minus.u);
  ojson j{{"grid_n", p.grid.size()}, {"a_m", a_m}, {"u_minus", solution_json(minus)}};
  bool ok = minus.converged;
  if (minus.converged) {
    const auto plus = solve_u_plus(minus.u, data, p.solver());
    write_csv(path_in(ctx.out_dir, "u_plus.csv"), plus.u);
    j["u_plus"] = solution_json(plus);
    ok = ok && plus.converged;
  }
  write_json(ctx.out_dir, "residuals.json", j);
  out << j.dump(2) << '\n';
  return ok ? kExitSuccess : kExitNotConverged;
}

int cmd_critical_value(const CliOptions& opts, std::ostream& out) {
  Context ctx = prepare(opts);
  const auto& p = ctx.problem;
  validate_solver(p);
  const double a = opts.level ? *opts.level : solve_a_m(p.model, p.coupling, p.initial);
  const auto cv = critical_value(p.model, a, p.coupling, p.initial);
  ojson j{{"level", a},
          {"critical_value", cv.value},
          {"long_time_estimate", cv.long_time_estimate},
          {"horizon", cv.horizon},
          {"discrepancy", cv.discrepancy},
          {"tolerance", cv.tolerance},
          {"consistent", cv.consistent}};
  ensure_dir(ctx.out_dir);
  write_json(ctx.out_dir, "critical_value.json", j);
  out << j.dump(2) << '\n';
  if (!cv.consistent) throw Error("long-time cross-check disagrees with the critical value");
  return kExitSuccess;
}

int cmd_mather(const CliOptions& opts, std::ostream& out) {
  Context ctx = prepare(opts);
  const auto& p = ctx.problem;
  validate_solver(p);
  ensure_dir(ctx.out_dir);
  const auto data = FrozenData::build(p.model, p.coupling, p.initial);
  const double a_m = solve_a_m(p.model, p.coupling, p.initial);
  const auto minus = solve_u_minus(data, GridFunction::constant(p.grid, a_m), p.solver());
  if (!minus.converged) {
    out << ojson{{"u_minus", solution_json(minus)}}.dump(2) << '\n';
    return kExitNotConverged;
  }
  const auto plus = solve_u_plus(minus.u, data, p.solver());
  const KSet k = extract_kset(minus.u, data, p.equilibrium.kset);
  ojson nodes = kset_json(k);
  for (std::size_t i = 0; i < k.size(); ++i) {
    nodes[i]["drift"] = fixed_point_drift(p.model, p.coupling, p.initial,
                                          {k.positions[i], k.u_values[i], 0.0});
  }
  const auto eta = build_mather_measure(k, minus.u);
  ojson j{{"grid_n", p.grid.size()},
          {"tol_h", p.equilibrium.kset.tol_h},
          {"tol_g", p.equilibrium.kset.tol_g},
          {"nodes", nodes},
          {"aubry_proxy", aubry_proxy(minus.u, plus.u, p.equilibrium.kset.tol_h)},
          {"invariance", invariance_check(eta, p.model, p.coupling, p.initial, 1.0,
                                          default_test_functions())},
          {"u_minus", solution_json(minus)},
          {"u_plus", solution_json(plus)}};
  write_json(ctx.out_dir, "kset.json", j);
  out << j.dump(2) << '\n';
  return kExitSuccess;
}

int cmd_equilibrium(const CliOptions& opts, std::ostream& out) {
  Context ctx = prepare(opts);
  const auto& p = ctx.problem;
  validate_solver(p);
  ensure_dir(ctx.out_dir);
  const auto r = iterate_equilibrium(p.initial, p.model, p.coupling, p.equilibrium);
  write_csv(path_in(ctx.out_dir, "u.csv"), r.u);
  write_csv(path_in(ctx.out_dir, "m.csv"), r.m);
  ojson trace = ojson::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"k", t.k},
                     {"d1_gap", t.d1_gap},
                     {"support_size", t.support_size},
                     {"support_leak", t.support_leak}});
  }
  ojson j{{"grid_n", p.grid.size()},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"d1_gap", r.d1_gap},
          {"support_leak", r.support_leak},
          {"hj_residual", r.hj_residual},
          {"continuity_residual", r.continuity_residual},
          {"selection", to_string(p.equilibrium.selection)},
          {"damping", to_string(p.equilibrium.damping)},
          {"tol_m", p.equilibrium.tol_m},
          {"tol_mass", p.equilibrium.tol_mass},
          {"kset", kset_json(r.kset)},
          {"trace", trace}};
  write_json(ctx.out_dir, "report.json", j);
  if (ctx.config.emit_svg) {
    write_text_file(path_in(ctx.out_dir, "u.svg"), svg_function_plot(r.u, "value function u"));
    write_text_file(path_in(ctx.out_dir, "m.svg"), svg_measure_plot(r.m, "equilibrium measure m"));
  }
  out << "converged " << (r.converged ? "true" : "false") << "  iterations " << r.iterations
      << "  d1_gap " << format_double(r.d1_gap) << "  support_leak "
      << format_double(r.support_leak) << "\nhj_residual " << format_double(r.hj_residual)
      << "  continuity_residual " << format_double(r.continuity_residual) << '\n';
  return r.converged ? kExitSuccess : kExitNotConverged;
}

int cmd_verify(const CliOptions& opts, std::ostream& out) {
  if (opts.u_path.empty() || opts.m_path.empty()) throw Error("verify needs --u and --m");
  const GridFunction u = read_grid_function_csv(opts.u_path);
  const GridMeasure m = read_grid_measure_csv(opts.m_path);
  if (!(u.grid() == m.grid())) throw Error("verify: u and m live on different grids");
  Context ctx = prepare(opts, u.grid().size());
  const auto& p = ctx.problem;
  double leak = 1.0;
  ojson kset = ojson::array();
  try {
    const KSet k = extract_kset(u, p.model, p.coupling, m, p.equilibrium.kset);
    leak = support_leak(m, k);
    kset = kset_json(k);
  } catch (const EmptyKSetError&) {
  }
  ojson j{{"grid_n", u.grid().size()},
          {"hj_residual", hj_residual(u, p.model, p.coupling, m)},
          {"continuity_residual",
           continuity_residual(u, m, p.model, p.coupling, p.equilibrium.continuity_modes)},
          {"support_leak", leak},
          {"kset", kset}};
  ensure_dir(ctx.out_dir);
  write_json(ctx.out_dir, "verify.json", j);
  out << j.dump(2) << '\n';
  return kExitSuccess;
}

}  // namespace

int run_cli(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.subcommand == "check") return cmd_check(opts, out);
    if (opts.subcommand == "solve-hj") return cmd_solve_hj(opts, out);
    if (opts.subcommand == "critical-value") return cmd_critical_value(opts, out);
    if (opts.subcommand == "mather") return cmd_mather(opts, out);
    if (opts.subcommand == "equilibrium") return cmd_equilibrium(opts, out);
    if (opts.subcommand == "verify") return cmd_verify(opts, out);
    err << "error: unknown subcommand '" << opts.subcommand << "'\n";
    return kExitError;
  } catch (const AssumptionViolation& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace ckam
