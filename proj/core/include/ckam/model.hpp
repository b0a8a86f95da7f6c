#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ckam/expression.hpp"
#include "ckam/grid.hpp"

namespace ckam {

/// Smooth periodic profile on the circle together with its derivative.
struct Profile {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::string label;

  double operator()(double x) const { return value(x); }

  static Profile constant(double c);
  static Profile from_expression(const Expression& e);
};

/// u-dependence theta(u) of the Hamiltonian with declared bounds on theta'.
class Theta {
 public:
  enum class Kind {
    Linear,      ///< slope * u
    LinearTanh,  ///< slope * u + amplitude * tanh(u)
    Arctan,      ///< arctan(u); theta' decays to 0, so the monotonicity bound fails
  };

  static Theta linear(double slope = 1.0);
  static Theta linear_tanh(double slope, double amplitude);
  static Theta arctan();

  double operator()(double u) const;
  double derivative(double u) const;
  /// Solves theta(u) = y (theta is strictly increasing for every kind).
  double inverse(double y) const;

  /// Declared global bounds delta <= theta' <= lambda.
  double delta() const noexcept { return delta_; }
  double lambda() const noexcept { return lambda_; }
  Kind kind() const noexcept { return kind_; }
  double slope() const noexcept { return slope_; }
  double amplitude() const noexcept { return amplitude_; }
  std::string name() const;

 private:
  Theta(Kind kind, double slope, double amplitude, double delta, double lambda)
      : kind_(kind), slope_(slope), amplitude_(amplitude), delta_(delta), lambda_(lambda) {}

  Kind kind_;
  double slope_;
  double amplitude_;
  double delta_;
  double lambda_;
};

struct Partials {
  double hx = 0.0;
  double hu = 0.0;
  double hp = 0.0;
};

/// H(x, u, p) = theta(u) + a(x) p^2 / 2 + V(x); reversible by construction.
class ContactModel {
 public:
  ContactModel(Theta theta, Profile kinetic, Profile potential);

  double H(double x, double u, double p) const {
    return theta_(u) + 0.5 * kinetic_(x) * p * p + potential_(x);
  }
  Partials partials(double x, double u, double p) const {
    return {0.5 * kinetic_.slope(x) * p * p + potential_.slope(x), theta_.derivative(u),
            kinetic_(x) * p};
  }
  /// Closed-form Legendre transform v^2 / (2 a(x)) - theta(u) - V(x).
  double L(double x, double u, double v) const {
    return v * v / (2.0 * kinetic_(x)) - theta_(u) - potential_(x);
  }

  const Theta& theta() const noexcept { return theta_; }
  const Profile& kinetic() const noexcept { return kinetic_; }
  const Profile& potential() const noexcept { return potential_; }
  bool reversible() const noexcept { return true; }

 private:
  Theta theta_;
  Profile kinetic_;
  Profile potential_;
};

double eval_H(const ContactModel& model, double x, double u, double p);
Partials eval_partials(const ContactModel& model, double x, double u, double p);
double eval_L(const ContactModel& model, double x, double u, double v);

/// Smooth periodic interaction kernel of unit mass.
class Kernel {
 public:
  enum class Kind { WrappedGaussian, Cosine };

  static Kernel wrapped_gaussian(double eps);
  static Kernel cosine();

  double operator()(double z) const;
  double slope(double z) const;
  double max_value() const noexcept { return max_value_; }
  double max_abs_slope() const noexcept { return max_abs_slope_; }
  Kind kind() const noexcept { return kind_; }
  double eps() const noexcept { return eps_; }

 private:
  Kernel(Kind kind, double eps);
  Kind kind_;
  double eps_;
  int images_ = 0;
  double max_value_ = 0.0;
  double max_abs_slope_ = 0.0;
};

/// F(x, m) = g(x) + beta * (K * m)(x).
class Coupling {
 public:
  Coupling(Profile base, double strength, Kernel kernel);
  static Coupling none();

  double F(double x, const GridMeasure& m) const;
  double F_x(double x, const GridMeasure& m) const;
  /// F(x_i, m) at every node of m's grid.
  std::vector<double> on_grid(const GridMeasure& m) const;
  std::vector<double> slope_on_grid(const GridMeasure& m) const;

  const Profile& base() const noexcept { return base_; }
  double strength() const noexcept { return strength_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  /// Declared bound on sup_m (|F| + |F_x|).
  double f_infinity() const noexcept { return f_infinity_; }
  /// Declared Lipschitz constant of m -> F(x, m) in d_1.
  double lip_in_m() const noexcept { return lip_in_m_; }
  double sup_abs() const noexcept { return sup_abs_; }

 private:
  Profile base_;
  double strength_;
  Kernel kernel_;
  double f_infinity_ = 0.0;
  double lip_in_m_ = 0.0;
  double sup_abs_ = 0.0;
};

struct AssumptionCheck {
  std::string name;  ///< "H1".."H4", "F1", "F2"
  bool passed = false;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  double a_min = 0.0;
  double a_max = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double theta_slope_min = 0.0;  ///< sampled over the working interval
  double theta_slope_max = 0.0;
  double f_infinity_estimate = 0.0;
  double lip_in_m_estimate = 0.0;

  bool all_passed() const;
  const AssumptionCheck& find(const std::string& name) const;
};

/// Samples H and F to confirm (H1)-(H4), (F1), (F2). Never throws on a
/// failing assumption; call require_assumptions for that.
AssumptionReport check_assumptions(const ContactModel& model, const Coupling& coupling,
                                   const PeriodicGrid& grid, int sample_budget,
                                   std::uint64_t seed = 0);

/// Throws AssumptionViolation naming the first failed assumption and its witness.
void require_assumptions(const AssumptionReport& report);

/// Positivity of a(x) on the grid; throws AssumptionViolation("kinetic_coeff not positive").
void validate_kinetic(const Profile& kinetic, const PeriodicGrid& grid);

struct Bounds {
  double d1_bound = 0.0;   ///< |a_m| <= D1
  double d2_lip = 0.0;     ///< Lipschitz constant of frozen-level solutions w_m
  double d3_sup = 0.0;     ///< ||u_m||_inf <= D3
  double e_t = 0.0;        ///< action bound E_t at horizon t0
  double e_tilde = 0.0;    ///< E_t / t0
  double horizon = 0.0;    ///< t0
  double b_const = 0.0;    ///< B + c(K) for the level-0 uncoupled Hamiltonian
};

/// Geodesic diameter of the unit circle.
inline constexpr double kCircleDiameter = 0.5;

struct GridExtrema {
  double a_min, a_max, v_min, v_max, v_abs, v_lip;
};
GridExtrema sample_extrema(const ContactModel& model, const PeriodicGrid& grid);

/// sup over |u| <= D1, |v| <= speed of L(x, u, v) + F_inf, maximised over the grid.
double lagrangian_sup(const ContactModel& model, const Coupling& coupling,
                      const PeriodicGrid& grid, double d1, double speed);

Bounds compute_bounds(const ContactModel& model, const Coupling& coupling,
                      const PeriodicGrid& grid, double horizon = 1.0);

/// E_t for an arbitrary horizon given D1.
double action_bound(const ContactModel& model, const Coupling& coupling,
                    const PeriodicGrid& grid, double d1, double t);

/// The admissible level a_m: sup_x (H(x, a, 0) - F(x, m)) = 0, by bisection.
double solve_a_m(const ContactModel& model, const Coupling& coupling, const GridMeasure& m,
                 double tol = 1e-13);

}  // namespace ckam
