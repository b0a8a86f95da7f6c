#include "ckam/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ckam/error.hpp"

namespace ckam {

namespace {

constexpr int kDenseSamples = 4096;

std::string describe(double v) { return format_double(v); }

}  // namespace

Profile Profile::constant(double c) {
  return Profile{[c](double) { return c; }, [](double) { return 0.0; }, format_double(c)};
}

Profile Profile::from_expression(const Expression& e) {
  return Profile{[e](double x) { return e(x); }, [e](double x) { return e.derivative(x); },
                 e.source()};
}

Theta Theta::linear(double slope) {
  if (!(slope > 0.0)) throw Error("Theta::linear: slope must be positive");
  return Theta(Kind::Linear, slope, 0.0, slope, slope);
}

Theta Theta::linear_tanh(double slope, double amplitude) {
  if (!(slope > 0.0) || !(amplitude >= 0.0)) {
    throw Error("Theta::linear_tanh: need slope > 0 and amplitude >= 0");
  }
  return Theta(Kind::LinearTanh, slope, amplitude, slope, slope + amplitude);
}

Theta Theta::arctan() { return Theta(Kind::Arctan, 0.0, 0.0, 0.0, 1.0); }

double Theta::operator()(double u) const {
  switch (kind_) {
    case Kind::Linear:
      return slope_ * u;
    case Kind::LinearTanh:
      return slope_ * u + amplitude_ * std::tanh(u);
    case Kind::Arctan:
      return std::atan(u);
  }
  return 0.0;
}

double Theta::derivative(double u) const {
  switch (kind_) {
    case Kind::Linear:
      return slope_;
    case Kind::LinearTanh: {
      const double c = std::cosh(u);
      return slope_ + amplitude_ / (c * c);
    }
    case Kind::Arctan:
      return 1.0 / (1.0 + u * u);
  }
  return 0.0;
}

double Theta::inverse(double y) const {
  switch (kind_) {
    case Kind::Linear:
      return y / slope_;
    case Kind::Arctan:
      if (std::abs(y) >= std::numbers::pi / 2) throw Error("Theta::inverse: outside arctan range");
      return std::tan(y);
    case Kind::LinearTanh: {
      // |theta(u) - slope * u| <= amplitude brackets the root
      double lo = (y - amplitude_) / slope_;
      double hi = (y + amplitude_) / slope_;
      double u = y / (slope_ + amplitude_);
      for (int it = 0; it < 200; ++it) {
        const double r = (*this)(u)-y;
        if (r > 0.0) {
          hi = u;
        } else {
          lo = u;
        }
        if (r == 0.0 || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(u))) {
          break;
        }
        double next = u - r / derivative(u);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        u = next;
      }
      return u;
    }
  }
  return 0.0;
}

std::string Theta::name() const {
  switch (kind_) {
    case Kind::Linear:
      return "linear";
    case Kind::LinearTanh:
      return "linear_tanh";
    case Kind::Arctan:
      return "arctan";
  }
  return "?";
}

ContactModel::ContactModel(Theta theta, Profile kinetic, Profile potential)
    : theta_(theta), kinetic_(std::move(kinetic)), potential_(std::move(potential)) {}

double eval_H(const ContactModel& model, double x, double u, double p) { return model.H(x, u, p); }
Partials eval_partials(const ContactModel& model, double x, double u, double p) {
  return model.partials(x, u, p);
}
double eval_L(const ContactModel& model, double x, double u, double v) { return model.L(x, u, v); }

Kernel::Kernel(Kind kind, double eps) : kind_(kind), eps_(eps) {
  if (kind_ == Kind::WrappedGaussian) {
    if (!(eps_ > 0.0)) throw Error("Kernel: bandwidth eps must be positive");
    images_ = 1 + static_cast<int>(std::ceil(8.0 * eps_));
    max_value_ = (*this)(0.0);
    // |K'| peaks near z = eps; dense scan then a local refinement
    double best_z = 0.0;
    for (int i = 0; i <= kDenseSamples; ++i) {
      const double z = 0.5 * i / kDenseSamples;
      const double s = std::abs(slope(z));
      if (s > max_abs_slope_) {
        max_abs_slope_ = s;
        best_z = z;
      }
    }
    double lo = std::max(0.0, best_z - 0.5 / kDenseSamples);
    double hi = std::min(0.5, best_z + 0.5 / kDenseSamples);
    for (int it = 0; it < 80; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (std::abs(slope(m1)) < std::abs(slope(m2))) {
        lo = m1;
      } else {
        hi = m2;
      }
    }
    max_abs_slope_ = std::max(max_abs_slope_, std::abs(slope(0.5 * (lo + hi))));
  } else {
    max_value_ = 2.0;
    max_abs_slope_ = 2.0 * std::numbers::pi;
  }
}

Kernel Kernel::wrapped_gaussian(double eps) { return Kernel(Kind::WrappedGaussian, eps); }
Kernel Kernel::cosine() { return Kernel(Kind::Cosine, 0.0); }

double Kernel::operator()(double z) const {
  if (kind_ == Kind::Cosine) return 1.0 + std::cos(2.0 * std::numbers::pi * z);
  const double r = circle_displacement(0.0, z);
  const double norm = 1.0 / (eps_ * std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  for (int k = -images_; k <= images_; ++k) {
    const double y = (r + k) / eps_;
    s += std::exp(-0.5 * y * y);
  }
  return norm * s;
}

double Kernel::slope(double z) const {
  if (kind_ == Kind::Cosine) return -2.0 * std::numbers::pi * std::sin(2.0 * std::numbers::pi * z);
  const double r = circle_displacement(0.0, z);
  const double norm = 1.0 / (eps_ * std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  for (int k = -images_; k <= images_; ++k) {
    const double y = (r + k) / eps_;
    s += -y / eps_ * std::exp(-0.5 * y * y);
  }
  return norm * s;
}

Coupling::Coupling(Profile base, double strength, Kernel kernel)
    : base_(std::move(base)), strength_(strength), kernel_(kernel) {
  double g_abs = 0.0, g_slope = 0.0;
  for (int i = 0; i < kDenseSamples; ++i) {
    const double x = static_cast<double>(i) / kDenseSamples;
    g_abs = std::max(g_abs, std::abs(base_(x)));
    g_slope = std::max(g_slope, std::abs(base_.slope(x)));
  }
  const double b = std::abs(strength_);
  sup_abs_ = g_abs + b * kernel_.max_value();
  f_infinity_ = g_abs + g_slope + b * (kernel_.max_value() + kernel_.max_abs_slope());
  lip_in_m_ = b * kernel_.max_abs_slope();
}

Coupling Coupling::none() {
  return Coupling(Profile::constant(0.0), 0.0, Kernel::wrapped_gaussian(0.1));
}

double Coupling::F(double x, const GridMeasure& m) const {
  double v = base_(x);
  if (strength_ == 0.0) return v;
  const auto& grid = m.grid();
  double conv = 0.0;
  auto w = m.weights();
  for (int j = 0; j < grid.size(); ++j) {
    const double wj = w[static_cast<std::size_t>(j)];
    if (wj != 0.0) conv += wj * kernel_(x - grid.node(j));
  }
  return v + strength_ * conv;
}

double Coupling::F_x(double x, const GridMeasure& m) const {
  double v = base_.slope(x);
  if (strength_ == 0.0) return v;
  const auto& grid = m.grid();
  double conv = 0.0;
  auto w = m.weights();
  for (int j = 0; j < grid.size(); ++j) {
    const double wj = w[static_cast<std::size_t>(j)];
    if (wj != 0.0) conv += wj * kernel_.slope(x - grid.node(j));
  }
  return v + strength_ * conv;
}

namespace {

std::vector<double> convolve_on_grid(const GridMeasure& m, const std::vector<double>& table) {
  const auto& grid = m.grid();
  const int n = grid.size();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  auto w = m.weights();
  for (int j = 0; j < n; ++j) {
    const double wj = w[static_cast<std::size_t>(j)];
    if (wj == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] += wj * table[static_cast<std::size_t>(grid.wrap(i - j))];
    }
  }
  return out;
}

}  // namespace

std::vector<double> Coupling::on_grid(const GridMeasure& m) const {
  const auto& grid = m.grid();
  const int n = grid.size();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = base_(grid.node(i));
  if (strength_ == 0.0) return out;
  std::vector<double> table(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) table[static_cast<std::size_t>(k)] = kernel_(grid.node(k));
  const auto conv = convolve_on_grid(m, table);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] += strength_ * conv[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<double> Coupling::slope_on_grid(const GridMeasure& m) const {
  const auto& grid = m.grid();
  const int n = grid.size();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = base_.slope(grid.node(i));
  if (strength_ == 0.0) return out;
  std::vector<double> table(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) table[static_cast<std::size_t>(k)] = kernel_.slope(grid.node(k));
  const auto conv = convolve_on_grid(m, table);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] += strength_ * conv[static_cast<std::size_t>(i)];
  }
  return out;
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck& AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error("AssumptionReport: no check named " + name);
}

GridExtrema sample_extrema(const ContactModel& model, const PeriodicGrid& grid) {
  GridExtrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                0.0, 0.0};
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double a = model.kinetic()(x);
    const double v = model.potential()(x);
    e.a_min = std::min(e.a_min, a);
    e.a_max = std::max(e.a_max, a);
    e.v_min = std::min(e.v_min, v);
    e.v_max = std::max(e.v_max, v);
    e.v_abs = std::max(e.v_abs, std::abs(v));
    e.v_lip = std::max(e.v_lip, std::abs(model.potential().slope(x)));
  }
  return e;
}

void validate_kinetic(const Profile& kinetic, const PeriodicGrid& grid) {
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double a = kinetic(x);
    if (!(a > 0.0)) {
      throw AssumptionViolation("kinetic_coeff not positive",
                                "at x=" + describe(x) + ", a(x) = " + describe(a));
    }
  }
}

namespace {

GridMeasure random_measure(const PeriodicGrid& grid, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_int_distribution<int> node(0, grid.size() - 1);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<double> w(static_cast<std::size_t>(grid.size()), 0.0);
  const int k = count(rng);
  for (int a = 0; a < k; ++a) w[static_cast<std::size_t>(node(rng))] += weight(rng);
  return GridMeasure::normalized(grid, std::move(w));
}

}  // namespace

AssumptionReport check_assumptions(const ContactModel& model, const Coupling& coupling,
                                   const PeriodicGrid& grid, int sample_budget,
                                   std::uint64_t seed) {
  if (sample_budget < 1) throw Error("check_assumptions: sample budget must be >= 1");
  std::mt19937_64 rng(seed);
  AssumptionReport rep;
  const auto ext = sample_extrema(model, grid);
  rep.a_min = ext.a_min;
  rep.a_max = ext.a_max;
  rep.delta = model.theta().delta();
  rep.lambda = model.theta().lambda();

  double a_min_x = 0.0;
  for (int i = grid.size() - 1; i >= 0; --i) {
    if (model.kinetic()(grid.node(i)) == ext.a_min) a_min_x = grid.node(i);
  }
  const bool a_pos = ext.a_min > 0.0;
  const std::string a_detail = "a_min = " + describe(ext.a_min) + " at x = " + describe(a_min_x);
  rep.checks.push_back({"H1", a_pos, a_detail});
  rep.checks.push_back({"H2", a_pos, "quadratic growth in p; " + a_detail});

  // (H3): declared bounds, then sampled theta' over the working interval
  const Theta& th = model.theta();
  if (!(th.delta() > 0.0) || !std::isfinite(th.lambda())) {
    const double u_far = 1e8;
    rep.theta_slope_min = th.derivative(u_far);
    rep.theta_slope_max = th.derivative(0.0);
    rep.checks.push_back({"H3", false,
                          "inf theta' = " + describe(th.delta()) + " (theta'(" + describe(u_far) +
                              ") = " + describe(th.derivative(u_far)) + ")"});
  } else {
    const double d3 = a_pos ? compute_bounds(model, coupling, grid).d3_sup : 1.0;
    const double half = 10.0 * d3;
    std::uniform_real_distribution<double> us(-half, half);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, witness = 0.0;
    bool ok = true;
    for (int s = 0; s < sample_budget + 2; ++s) {
      const double u = s == 0 ? -half : (s == 1 ? half : us(rng));
      const double d = th.derivative(u);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      if (d < th.delta() || d > th.lambda()) {
        ok = false;
        witness = u;
      }
    }
    rep.theta_slope_min = lo;
    rep.theta_slope_max = hi;
    std::string detail = "delta = " + describe(th.delta()) + ", lambda = " + describe(th.lambda()) +
                         ", sampled theta' in [" + describe(lo) + ", " + describe(hi) +
                         "] over |u| <= " + describe(half);
    if (!ok) detail += "; bound broken at u = " + describe(witness);
    rep.checks.push_back({"H3", ok, detail});
  }

  // (H4): exact evenness in p
  {
    std::uniform_real_distribution<double> xs(0.0, 1.0), us(-10.0, 10.0), ps(-10.0, 10.0);
    bool ok = true;
    std::string detail = "H(x,u,p) == H(x,u,-p) on " + std::to_string(sample_budget) + " samples";
    for (int s = 0; s < sample_budget; ++s) {
      const double x = xs(rng), u = us(rng), p = ps(rng);
      if (model.H(x, u, p) != model.H(x, u, -p)) {
        ok = false;
        detail = "asymmetry at (x,u,p) = (" + describe(x) + ", " + describe(u) + ", " +
                 describe(p) + ")";
        break;
      }
    }
    rep.checks.push_back({"H4", ok, detail});
  }

  // (F1), (F2): sampled estimates must stay below the declared constants
  std::vector<GridMeasure> samples;
  samples.push_back(GridMeasure::uniform(grid));
  for (int s = 0; s < sample_budget; ++s) samples.push_back(random_measure(grid, rng));
  {
    double est = 0.0;
    for (const auto& m : samples) {
      const auto f = coupling.on_grid(m);
      const auto fx = coupling.slope_on_grid(m);
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        a = std::max(a, std::abs(f[i]));
        b = std::max(b, std::abs(fx[i]));
      }
      est = std::max(est, a + b);
    }
    rep.f_infinity_estimate = est;
    const bool ok = std::isfinite(coupling.f_infinity()) &&
                    est <= coupling.f_infinity() * (1.0 + 1e-9) + 1e-12;
    rep.checks.push_back({"F1", ok,
                          "sampled sup(|F|+|F_x|) = " + describe(est) + ", declared F_inf = " +
                              describe(coupling.f_infinity())});
  }
  {
    double est = 0.0;
    std::uniform_int_distribution<int> node(0, grid.size() - 1);
    auto ratio = [&](const GridMeasure& m1, const GridMeasure& m2) {
      const double d = d1_distance(m1, m2);
      if (d <= 0.0) return 0.0;
      const auto f1 = coupling.on_grid(m1);
      const auto f2 = coupling.on_grid(m2);
      double diff = 0.0;
      for (std::size_t i = 0; i < f1.size(); ++i) diff = std::max(diff, std::abs(f1[i] - f2[i]));
      return diff / d;
    };
    for (int s = 0; s < sample_budget; ++s) {
      est = std::max(est, ratio(samples[static_cast<std::size_t>(s)],
                                samples[static_cast<std::size_t>(s) + 1]));
      const int j = node(rng);
      est = std::max(est, ratio(GridMeasure::dirac(grid, j), GridMeasure::dirac(grid, j + 1)));
    }
    rep.lip_in_m_estimate = est;
    const bool ok = est <= coupling.lip_in_m() * (1.0 + 1e-9) + 1e-12;
    rep.checks.push_back({"F2", ok,
                          "sampled Lipschitz ratio = " + describe(est) + ", declared = " +
                              describe(coupling.lip_in_m())});
  }
  return rep;
}

void require_assumptions(const AssumptionReport& report) {
  for (const auto& c : report.checks) {
    if (!c.passed) throw AssumptionViolation(c.name, c.detail);
  }
}

double lagrangian_sup(const ContactModel& model, const Coupling& coupling,
                      const PeriodicGrid& grid, double d1, double speed) {
  const auto ext = sample_extrema(model, grid);
  const Theta& th = model.theta();
  const double neg_theta = std::max(-th(-d1), -th(d1));
  return speed * speed / (2.0 * ext.a_min) + neg_theta - ext.v_min + coupling.f_infinity();
}

double action_bound(const ContactModel& model, const Coupling& coupling,
                    const PeriodicGrid& grid, double d1, double t) {
  return t * lagrangian_sup(model, coupling, grid, d1, kCircleDiameter / t);
}

Bounds compute_bounds(const ContactModel& model, const Coupling& coupling,
                      const PeriodicGrid& grid, double horizon) {
  if (!(horizon > 0.0)) throw Error("compute_bounds: horizon must be positive");
  const Theta& th = model.theta();
  if (!(th.delta() > 0.0)) {
    throw AssumptionViolation("H3", "delta = " + describe(th.delta()) + " is not positive");
  }
  const auto ext = sample_extrema(model, grid);
  if (!(ext.a_min > 0.0)) throw AssumptionViolation("H1", "a_min = " + describe(ext.a_min));

  Bounds b;
  b.horizon = horizon;
  // theta(a_m) = -max(V - F) and |theta(a) - theta(0)| >= delta |a|
  b.d1_bound = (std::abs(th(0.0)) + ext.v_abs + coupling.f_infinity()) / th.delta();
  b.d2_lip = lagrangian_sup(model, coupling, grid, b.d1_bound, 1.0);
  b.e_tilde = lagrangian_sup(model, coupling, grid, b.d1_bound, kCircleDiameter / horizon);
  b.e_t = horizon * b.e_tilde;
  b.d3_sup = 2.0 * b.d1_bound + b.e_t + 3.0 * b.d2_lip * kCircleDiameter;

  double l_unit = -std::numeric_limits<double>::infinity();
  double crit = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    l_unit = std::max(l_unit, model.L(x, 0.0, 1.0));
    crit = std::max(crit, model.H(x, 0.0, 0.0));
  }
  b.b_const = l_unit + crit;
  return b;
}

double solve_a_m(const ContactModel& model, const Coupling& coupling, const GridMeasure& m,
                 double tol) {
  if (!(tol > 0.0)) throw Error("solve_a_m: tol must be positive");
  const auto& grid = m.grid();
  const auto f = coupling.on_grid(m);
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    shift = std::max(shift, model.potential()(grid.node(i)) - f[static_cast<std::size_t>(i)]);
  }
  const Theta& th = model.theta();
  auto level = [&](double a) { return th(a) + shift; };

  const double d1 = compute_bounds(model, coupling, grid).d1_bound;
  double lo = -(d1 + 1.0), hi = d1 + 1.0;
  if (!(level(lo) < 0.0 && level(hi) > 0.0)) {
    throw AssumptionViolation("H3", "level map does not change sign on [" + describe(lo) + ", " +
                                        describe(hi) + "]");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double g = level(mid);
    if (std::abs(g) <= tol) return mid;
    if (g > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= std::numeric_limits<double>::epsilon() * (1.0 + std::abs(mid))) break;
  }
  return mid;
}

}  // namespace ckam
