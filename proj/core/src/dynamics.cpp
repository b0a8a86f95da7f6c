#include "ckam/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "ckam/error.hpp"

namespace ckam {

namespace {

// F(., m) restricted to the support of m, so each evaluation costs O(|supp m|).
class SparseField {
 public:
  SparseField(const Coupling& coupling, const GridMeasure& m) : coupling_(coupling) {
    if (coupling.strength() == 0.0) return;
    for (int j : m.support()) atoms_.push_back({m.grid().node(j), m[j]});
  }

  double value(double x) const {
    double s = coupling_.base()(x);
    for (const auto& a : atoms_) s += coupling_.strength() * a.w * coupling_.kernel()(x - a.y);
    return s;
  }
  double slope(double x) const {
    double s = coupling_.base().slope(x);
    for (const auto& a : atoms_) {
      s += coupling_.strength() * a.w * coupling_.kernel().slope(x - a.y);
    }
    return s;
  }

 private:
  struct Atom {
    double y;
    double w;
  };
  const Coupling& coupling_;
  std::vector<Atom> atoms_;
};

PhaseVelocity field(const ContactModel& model, const SparseField& f, double x, double u,
                    double p) {
  const Partials d = model.partials(x, u, p);
  const double hm = model.H(x, u, p) - f.value(x);
  return {d.hp, p * d.hp - hm, -(d.hx - f.slope(x)) - d.hu * p};
}

struct Integrator {
  const ContactModel& model;
  SparseField f;
  double blowup;

  ContactState step(const ContactState& s, double dt) const {
    const PhaseVelocity k1 = field(model, f, s.x, s.u, s.p);
    const PhaseVelocity k2 =
        field(model, f, s.x + 0.5 * dt * k1.dx, s.u + 0.5 * dt * k1.du, s.p + 0.5 * dt * k1.dp);
    const PhaseVelocity k3 =
        field(model, f, s.x + 0.5 * dt * k2.dx, s.u + 0.5 * dt * k2.du, s.p + 0.5 * dt * k2.dp);
    const PhaseVelocity k4 = field(model, f, s.x + dt * k3.dx, s.u + dt * k3.du, s.p + dt * k3.dp);
    ContactState out;
    out.x = wrap_unit(s.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx));
    out.u = s.u + dt / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    out.p = s.p + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    if (!(std::abs(out.u) <= blowup && std::abs(out.p) <= blowup)) {
      throw DivergenceError("orbit left the a-priori box |u|, |p| <= " + format_double(blowup) +
                            " at state (" + format_double(out.x) + ", " + format_double(out.u) +
                            ", " + format_double(out.p) + ")");
    }
    return out;
  }
};

double resolve_blowup(const ContactModel& model, const Coupling& coupling, const GridMeasure& m,
                      const FlowConfig& cfg) {
  if (cfg.blowup > 0.0) return cfg.blowup;
  return 1e3 * compute_bounds(model, coupling, m.grid()).d3_sup;
}

template <class Visit>
ContactState run(const ContactModel& model, const Coupling& coupling, const GridMeasure& m,
                 const ContactState& s0, const FlowConfig& cfg, Visit&& visit) {
  cfg.validate();
  Integrator integ{model, SparseField(coupling, m), resolve_blowup(model, coupling, m, cfg)};
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(cfg.horizon) / cfg.dt_ode)));
  const double dt = cfg.horizon / steps;
  ContactState s{wrap_unit(s0.x), s0.u, s0.p};
  visit(0.0, s, integ);
  for (int k = 1; k <= steps; ++k) {
    s = integ.step(s, dt);
    visit(k * dt, s, integ);
  }
  return s;
}

}  // namespace

void FlowConfig::validate() const {
  if (!(dt_ode > 0.0)) throw ConfigurationError("dt_ode must be positive");
  if (!std::isfinite(horizon)) throw ConfigurationError("horizon must be finite");
}

double contact_hamiltonian(const ContactModel& model, const Coupling& coupling,
                           const GridMeasure& m, const ContactState& s) {
  return model.H(s.x, s.u, s.p) - coupling.F(s.x, m);
}

PhaseVelocity vector_field(const ContactModel& model, const Coupling& coupling,
                           const GridMeasure& m, const ContactState& s) {
  return field(model, SparseField(coupling, m), s.x, s.u, s.p);
}

Trajectory integrate_orbit(const ContactModel& model, const Coupling& coupling,
                           const GridMeasure& m, const ContactState& s0, const FlowConfig& cfg) {
  Trajectory traj;
  run(model, coupling, m, s0, cfg, [&](double t, const ContactState& s, const Integrator& integ) {
    traj.t.push_back(t);
    traj.states.push_back(s);
    traj.h_m.push_back(model.H(s.x, s.u, s.p) - integ.f.value(s.x));
  });
  return traj;
}

ContactState flow_map(const ContactModel& model, const Coupling& coupling, const GridMeasure& m,
                      const ContactState& s0, const FlowConfig& cfg) {
  return run(model, coupling, m, s0, cfg, [](double, const ContactState&, const Integrator&) {});
}

double fixed_point_drift(const ContactModel& model, const Coupling& coupling,
                         const GridMeasure& m, const ContactState& s, double horizon,
                         double dt_ode) {
  FlowConfig cfg;
  cfg.dt_ode = dt_ode;
  cfg.horizon = horizon;
  const ContactState e = flow_map(model, coupling, m, s, cfg);
  return std::max({circle_distance(e.x, s.x), std::abs(e.u - s.u), std::abs(e.p - s.p)});
}

std::vector<PhaseTestFunction> default_test_functions() {
  std::vector<PhaseTestFunction> out;
  for (int k = 0; k <= 2; ++k) {
    for (int trig = 0; trig < (k == 0 ? 1 : 2); ++trig) {
      for (int i = 0; i <= 2; ++i) {
        for (int j = 0; j <= 2; ++j) {
          out.push_back([k, trig, i, j](const ContactState& s) {
            const double arg = 2.0 * std::numbers::pi * k * s.x;
            const double mode = trig == 0 ? std::cos(arg) : std::sin(arg);
            return mode * std::pow(s.u, i) * std::pow(s.p, j);
          });
        }
      }
    }
  }
  return out;
}

double invariance_check(const PhaseMeasure& eta, const ContactModel& model,
                        const Coupling& coupling, const GridMeasure& m, double horizon,
                        const std::vector<PhaseTestFunction>& tests, double dt_ode) {
  FlowConfig cfg;
  cfg.dt_ode = dt_ode;
  cfg.horizon = horizon;
  std::vector<ContactState> moved;
  for (const auto& atom : eta.atoms()) {
    moved.push_back(flow_map(model, coupling, m, atom.state, cfg));
  }
  double worst = 0.0;
  for (const auto& f : tests) {
    double before = 0.0, after = 0.0;
    for (std::size_t i = 0; i < moved.size(); ++i) {
      before += eta.atoms()[i].weight * f(eta.atoms()[i].state);
      after += eta.atoms()[i].weight * f(moved[i]);
    }
    worst = std::max(worst, std::abs(after - before));
  }
  return worst;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,u,p,H_m\n";
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const auto& s = traj.states[k];
    os << format_double(traj.t[k]) << ',' << format_double(s.x) << ',' << format_double(s.u)
       << ',' << format_double(s.p) << ',' << format_double(traj.h_m[k]) << '\n';
  }
}

}  // namespace ckam
