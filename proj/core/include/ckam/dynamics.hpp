#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ckam/grid.hpp"
#include "ckam/model.hpp"

namespace ckam {

struct FlowConfig {
  double dt_ode = 1e-3;
  double horizon = 1.0;  ///< negative values integrate backward in time
  /// Abort threshold on |u| and |p|; 0 selects 1e3 * D3.
  double blowup = 0.0;

  void validate() const;
};

struct PhaseVelocity {
  double dx = 0.0;
  double du = 0.0;
  double dp = 0.0;
};

/// H_m(x, u, p) = H(x, u, p) - F(x, m).
double contact_hamiltonian(const ContactModel& model, const Coupling& coupling,
                           const GridMeasure& m, const ContactState& s);

/// (H_p, p H_p - H_m, -H_x - H_u p) for the m-shifted Hamiltonian.
PhaseVelocity vector_field(const ContactModel& model, const Coupling& coupling,
                           const GridMeasure& m, const ContactState& s);

struct Trajectory {
  std::vector<double> t;
  std::vector<ContactState> states;
  std::vector<double> h_m;  ///< H_m along the orbit

  const ContactState& final_state() const { return states.back(); }
};

/// Fixed-step RK4; throws DivergenceError when |u| or |p| crosses the blow-up bound.
Trajectory integrate_orbit(const ContactModel& model, const Coupling& coupling,
                           const GridMeasure& m, const ContactState& s0, const FlowConfig& cfg);

/// Final state only (no sampling); same integrator.
ContactState flow_map(const ContactModel& model, const Coupling& coupling, const GridMeasure& m,
                      const ContactState& s0, const FlowConfig& cfg);

/// max(|x_T - x_0| on the circle, |u_T - u_0|, |p_T - p_0|).
double fixed_point_drift(const ContactModel& model, const Coupling& coupling,
                         const GridMeasure& m, const ContactState& s, double horizon = 1.0,
                         double dt_ode = 1e-3);

inline constexpr double kFixedPointTolerance = 1e-6;

using PhaseTestFunction = std::function<double(const ContactState&)>;

/// Fourier modes in x (k <= 2) times monomials u^i p^j (i, j <= 2).
std::vector<PhaseTestFunction> default_test_functions();

/// max_f |int f(Phi_T) d eta - int f d eta|.
double invariance_check(const PhaseMeasure& eta, const ContactModel& model,
                        const Coupling& coupling, const GridMeasure& m, double horizon,
                        const std::vector<PhaseTestFunction>& tests, double dt_ode = 1e-3);

/// CSV with columns t,x,u,p,H_m.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace ckam
