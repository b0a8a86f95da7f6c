#include "ckam/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ckam/error.hpp"
#include "json.hpp"

namespace ckam {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so that the
// leftovers can be reported as unknown.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
    }
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
    }
  }
  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void integer(const std::string& key, std::optional<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected an unsigned integer");
      out = v->get<std::uint64_t>();
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  /// Expression fields also accept plain numbers.
  void expression(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) {
        out = format_double(v->get<double>());
      } else if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        throw ConfigError(field(key), "expected an expression string");
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Fn>
void sub_block(Block& parent, const std::string& key, Fn&& fn) {
  if (const json* v = parent.find(key)) {
    Block b(*v, parent.field(key));
    fn(b);
    b.finish();
  }
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

Expression parse_field(const std::string& text, const std::string& path) {
  try {
    return Expression::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(path, e.what());
  }
}

void require_periodic(const Expression& e, const std::string& path) {
  const double gap = std::abs(e(0.0) - e(1.0));
  if (!(gap <= 1e-9)) {
    throw ConfigError(path, "not periodic: |f(0) - f(1)| = " + format_double(gap));
  }
  for (int i = 0; i <= 1024; ++i) {
    if (!std::isfinite(e(i / 1024.0))) {
      throw ConfigError(path, "not finite at x = " + format_double(i / 1024.0));
    }
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  RunConfig c;
  Block top(root, "");
  sub_block(top, "grid", [&](Block& b) { b.integer("n", c.n); });
  sub_block(top, "model", [&](Block& b) {
    sub_block(b, "theta", [&](Block& t) {
      t.text("kind", c.theta_kind);
      t.number("slope", c.theta_slope);
      t.number("amplitude", c.theta_amplitude);
    });
    b.expression("kinetic", c.kinetic);
    b.expression("potential", c.potential);
  });
  sub_block(top, "coupling", [&](Block& b) {
    b.expression("base", c.base);
    b.number("strength", c.strength);
    sub_block(b, "kernel", [&](Block& k) {
      k.text("kind", c.kernel_kind);
      k.number("eps", c.kernel_eps);
    });
  });
  sub_block(top, "solver", [&](Block& b) {
    b.number("dt", c.dt);
    b.number("v_max", c.v_max);
    b.number("tol_conv", c.tol_conv);
    b.integer("max_steps", c.max_steps);
    b.number("inner_tol", c.inner_tol);
  });
  sub_block(top, "equilibrium", [&](Block& b) {
    b.text("selection", c.selection);
    b.text("damping", c.damping);
    b.number("alpha", c.alpha);
    b.number("tol_m", c.tol_m);
    b.number("tol_mass", c.tol_mass);
    b.integer("max_outer", c.max_outer);
    b.integer("continuity_modes", c.continuity_modes);
    b.text("initial", c.initial);
  });
  sub_block(top, "mather", [&](Block& b) {
    b.number("tol_h", c.tol_h);
    b.number("tol_g", c.tol_g);
  });
  sub_block(top, "checks", [&](Block& b) { b.integer("sample_budget", c.sample_budget); });
  sub_block(top, "output", [&](Block& b) {
    b.text("dir", c.out_dir);
    b.boolean("emit_svg", c.emit_svg);
  });
  top.unsigned_integer("seed", c.seed);
  top.finish();

  require(c.n >= 8, "grid.n", "must be >= 8");
  require(c.theta_kind == "linear" || c.theta_kind == "linear_tanh" || c.theta_kind == "arctan",
          "model.theta.kind", "must be linear, linear_tanh or arctan");
  require(c.theta_slope > 0.0, "model.theta.slope", "must be positive");
  require(c.theta_amplitude >= 0.0, "model.theta.amplitude", "must be nonnegative");
  require(c.kernel_kind == "gaussian" || c.kernel_kind == "cosine", "coupling.kernel.kind",
          "must be gaussian or cosine");
  require(c.kernel_eps > 0.0, "coupling.kernel.eps", "must be positive");
  require(std::isfinite(c.strength), "coupling.strength", "must be finite");
  require(!c.dt || *c.dt > 0.0, "solver.dt", "must be positive");
  require(!c.v_max || *c.v_max > 0.0, "solver.v_max", "must be positive");
  require(c.tol_conv > 0.0, "solver.tol_conv", "must be positive");
  require(!c.max_steps || *c.max_steps >= 1, "solver.max_steps", "must be >= 1");
  require(c.inner_tol > 0.0, "solver.inner_tol", "must be positive");
  require(c.selection == "uniform" || c.selection == "residual-weighted", "equilibrium.selection",
          "must be uniform or residual-weighted");
  require(c.damping == "averaging" || c.damping == "fixed", "equilibrium.damping",
          "must be averaging or fixed");
  require(c.alpha > 0.0 && c.alpha <= 1.0, "equilibrium.alpha", "must lie in (0, 1]");
  require(!c.tol_m || *c.tol_m > 0.0, "equilibrium.tol_m", "must be positive");
  require(c.tol_mass >= 0.0, "equilibrium.tol_mass", "must be nonnegative");
  require(c.max_outer >= 1, "equilibrium.max_outer", "must be >= 1");
  require(c.continuity_modes >= 1, "equilibrium.continuity_modes", "must be >= 1");
  require(c.initial == "uniform" || c.initial.rfind("dirac:", 0) == 0, "equilibrium.initial",
          "must be uniform or dirac:<node>");
  require(!c.tol_h || *c.tol_h > 0.0, "mather.tol_h", "must be positive");
  require(!c.tol_g || *c.tol_g > 0.0, "mather.tol_g", "must be positive");
  require(c.sample_budget >= 1, "checks.sample_budget", "must be >= 1");
  for (const auto& [text, path] : {std::pair{c.kinetic, "model.kinetic"},
                                   std::pair{c.potential, "model.potential"},
                                   std::pair{c.base, "coupling.base"}}) {
    parse_field(text, path);
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

Problem build_problem(const RunConfig& c) {
  const PeriodicGrid grid(c.n);
  const Expression kinetic = parse_field(c.kinetic, "model.kinetic");
  const Expression potential = parse_field(c.potential, "model.potential");
  const Expression base = parse_field(c.base, "coupling.base");
  require_periodic(kinetic, "model.kinetic");
  require_periodic(potential, "model.potential");
  require_periodic(base, "coupling.base");
  validate_kinetic(Profile::from_expression(kinetic), grid);

  Theta theta = c.theta_kind == "linear"        ? Theta::linear(c.theta_slope)
                : c.theta_kind == "linear_tanh" ? Theta::linear_tanh(c.theta_slope, c.theta_amplitude)
                                                : Theta::arctan();
  ContactModel model(theta, Profile::from_expression(kinetic), Profile::from_expression(potential));
  Kernel kernel =
      c.kernel_kind == "gaussian" ? Kernel::wrapped_gaussian(c.kernel_eps) : Kernel::cosine();
  Coupling coupling(Profile::from_expression(base), c.strength, kernel);

  EquilibriumConfig eq;
  if (theta.delta() > 0.0) {
    eq = EquilibriumConfig::defaults(model, coupling, grid);
  }
  eq.solver.tol_conv = c.tol_conv;
  eq.solver.inner_tol = c.inner_tol;
  if (c.dt) eq.solver.dt = *c.dt;
  if (c.v_max) eq.solver.v_max = *c.v_max;
  if (theta.delta() > 0.0) {
    eq.solver.max_steps =
        c.max_steps ? *c.max_steps
                    : 10 * static_cast<int>(std::ceil(std::log(1.0 / c.tol_conv) /
                                                      (theta.delta() * eq.solver.dt)));
    eq.kset = KSetTolerances::defaults(model, grid, c.tol_conv);
  }
  if (c.tol_h) eq.kset.tol_h = *c.tol_h;
  if (c.tol_g) eq.kset.tol_g = *c.tol_g;
  eq.selection = c.selection == "uniform" ? Selection::Uniform : Selection::ResidualWeighted;
  eq.damping = c.damping == "averaging" ? Damping::Averaging : Damping::Fixed;
  eq.alpha = c.alpha;
  if (c.tol_m) eq.tol_m = *c.tol_m;
  eq.tol_mass = c.tol_mass;
  eq.max_outer = c.max_outer;
  eq.continuity_modes = c.continuity_modes;

  GridMeasure initial = GridMeasure::uniform(grid);
  if (c.initial != "uniform") {
    const std::string idx = c.initial.substr(6);
    int node = 0;
    try {
      std::size_t used = 0;
      node = std::stoi(idx, &used);
      if (used != idx.size()) throw std::invalid_argument(idx);
    } catch (const std::exception&) {
      throw ConfigError("equilibrium.initial", "bad node index '" + idx + "'");
    }
    require(node >= 0 && node < c.n, "equilibrium.initial", "node index out of range");
    initial = GridMeasure::dirac(grid, node);
  }
  return Problem{grid, std::move(model), std::move(coupling), eq, std::move(initial)};
}

}  // namespace ckam
