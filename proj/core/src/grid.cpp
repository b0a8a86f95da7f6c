#include "ckam/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ckam/error.hpp"

namespace ckam {

PeriodicGrid::PeriodicGrid(int n) : n_(n), h_(1.0 / static_cast<double>(n)) {
  if (n < 8) throw Error("PeriodicGrid: node count must be >= 8, got " + std::to_string(n));
}

int PeriodicGrid::nearest(double x) const noexcept {
  const double t = wrap_unit(x) * static_cast<double>(n_);
  const double lo = std::floor(t);
  int i = static_cast<int>(lo);
  if (t - lo > 0.5) ++i;
  return wrap(i);
}

GridFunction::GridFunction(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.size())) {
    throw Error("GridFunction: expected " + std::to_string(grid_.size()) + " values, got " +
                std::to_string(values_.size()));
  }
}

GridFunction GridFunction::constant(PeriodicGrid grid, double c) {
  return GridFunction(grid, std::vector<double>(static_cast<std::size_t>(grid.size()), c));
}

double GridFunction::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw Error("sup_distance: grid mismatch");
  double m = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
  return m;
}

GridMeasure::GridMeasure(PeriodicGrid grid, std::vector<double> weights)
    : grid_(grid), weights_(std::move(weights)) {
  if (weights_.size() != static_cast<std::size_t>(grid_.size())) {
    throw Error("GridMeasure: expected " + std::to_string(grid_.size()) + " weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0)) {
      throw Error("GridMeasure: negative or non-finite weight at node " + std::to_string(i));
    }
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error("GridMeasure: weights sum to " + format_double(total) + ", not 1");
  }
}

GridMeasure GridMeasure::uniform(PeriodicGrid grid) {
  return GridMeasure(grid, std::vector<double>(static_cast<std::size_t>(grid.size()),
                                               1.0 / static_cast<double>(grid.size())));
}

GridMeasure GridMeasure::dirac(PeriodicGrid grid, int node) {
  std::vector<double> w(static_cast<std::size_t>(grid.size()), 0.0);
  w[static_cast<std::size_t>(grid.wrap(node))] = 1.0;
  return GridMeasure(grid, std::move(w));
}

GridMeasure GridMeasure::normalized(PeriodicGrid grid, std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw Error("GridMeasure::normalized: total mass must be positive");
  for (double& w : weights) w /= total;
  return GridMeasure(grid, std::move(weights));
}

GridMeasure GridMeasure::blend(const GridMeasure& other, double alpha) const {
  if (!(grid_ == other.grid_)) throw Error("GridMeasure::blend: grid mismatch");
  std::vector<double> w(weights_.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = (1.0 - alpha) * weights_[i] + alpha * other.weights_[i];
  }
  return normalized(grid_, std::move(w));
}

std::vector<int> GridMeasure::support() const {
  std::vector<int> s;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] > 0.0) s.push_back(static_cast<int>(i));
  }
  return s;
}

PhaseMeasure::PhaseMeasure(std::vector<PhaseAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error("PhaseMeasure: no atoms");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.weight >= 0.0)) throw Error("PhaseMeasure: negative atom weight");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error("PhaseMeasure: weights do not sum to 1");
}

double forward_difference(const GridFunction& f, int i) {
  return (f[i + 1] - f[i]) / f.grid().spacing();
}

double backward_difference(const GridFunction& f, int i) {
  return (f[i] - f[i - 1]) / f.grid().spacing();
}

GridFunction gradient(const GridFunction& f, DiffMode mode) {
  const int n = f.grid().size();
  const double h = f.grid().spacing();
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    switch (mode) {
      case DiffMode::Centered:
        d[static_cast<std::size_t>(i)] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        break;
      case DiffMode::Forward:
        d[static_cast<std::size_t>(i)] = (f[i + 1] - f[i]) / h;
        break;
      case DiffMode::Backward:
        d[static_cast<std::size_t>(i)] = (f[i] - f[i - 1]) / h;
        break;
    }
  }
  return GridFunction(f.grid(), std::move(d));
}

double interpolate(const GridFunction& f, double x) {
  const int n = f.grid().size();
  const double t = wrap_unit(x) * static_cast<double>(n);
  const double lo = std::floor(t);
  const double frac = t - lo;
  const int i = static_cast<int>(lo);
  if (frac == 0.0) return f[i];
  return (1.0 - frac) * f[i] + frac * f[i + 1];
}

namespace {

double absolute_deviation(std::span<const double> g, double c) {
  double s = 0.0;
  for (double v : g) s += std::abs(v - c);
  return s;
}

}  // namespace

double d1_distance(const GridMeasure& a, const GridMeasure& b) {
  if (!(a.grid() == b.grid())) throw Error("d1_distance: grid mismatch");
  const std::size_t n = static_cast<std::size_t>(a.grid().size());
  std::vector<double> g(n);
  double run = 0.0;
  auto wa = a.weights();
  auto wb = b.weights();
  for (std::size_t i = 0; i < n; ++i) {
    run += wa[i] - wb[i];
    g[i] = run;
  }
  // the optimal offset is any median of the cumulative differences; trying both
  // middle order statistics keeps the result exactly symmetric in (a, b)
  std::vector<double> sorted = g;
  const std::size_t lo = (n - 1) / 2;
  const std::size_t hi = n / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(lo), sorted.end());
  const double c_lo = sorted[lo];
  double best = absolute_deviation(g, c_lo);
  if (hi != lo) {
    const double c_hi =
        *std::min_element(sorted.begin() + static_cast<std::ptrdiff_t>(hi), sorted.end());
    best = std::min(best, absolute_deviation(g, c_hi));
  }
  return best * a.grid().spacing();
}

GridMeasure pushforward(const PhaseMeasure& eta, const PeriodicGrid& grid) {
  std::vector<double> w(static_cast<std::size_t>(grid.size()), 0.0);
  for (const auto& atom : eta.atoms()) {
    w[static_cast<std::size_t>(grid.nearest(atom.state.x))] += atom.weight;
  }
  return GridMeasure(grid, std::move(w));
}

double quadrature(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().spacing();
}

double measure_integral(const GridFunction& f, const GridMeasure& m) {
  if (!(f.grid() == m.grid())) throw Error("measure_integral: grid mismatch");
  double s = 0.0;
  auto fv = f.values();
  auto w = m.weights();
  for (std::size_t i = 0; i < fv.size(); ++i) s += fv[i] * w[i];
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

void write_rows(std::ostream& os, const PeriodicGrid& grid, std::span<const double> values) {
  os << "x,value\n";
  for (int i = 0; i < grid.size(); ++i) {
    os << format_double(grid.node(i)) << ',' << format_double(values[static_cast<std::size_t>(i)])
       << '\n';
  }
}

std::vector<double> read_rows(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,value") throw Error("CSV: expected header 'x,value', got '" + line + "'");
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("CSV: malformed row '" + line + "'");
    double x = 0.0, v = 0.0;
    auto r1 = std::from_chars(line.data(), line.data() + comma, x);
    auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
    if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
      throw Error("CSV: malformed number in row '" + line + "'");
    }
    xs.push_back(x);
    vs.push_back(v);
  }
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - static_cast<double>(i) / n) > 1e-12) {
      throw Error("CSV: row " + std::to_string(i) + " is not on the uniform grid");
    }
  }
  return vs;
}

}  // namespace

void write_csv(std::ostream& os, const GridFunction& f) { write_rows(os, f.grid(), f.values()); }
void write_csv(std::ostream& os, const GridMeasure& m) { write_rows(os, m.grid(), m.weights()); }

void write_csv(const std::string& path, const GridFunction& f) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_csv(os, f);
}

void write_csv(const std::string& path, const GridMeasure& m) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_csv(os, m);
}

GridFunction read_grid_function_csv(std::istream& is) {
  auto v = read_rows(is);
  const int n = static_cast<int>(v.size());
  return GridFunction(PeriodicGrid(n), std::move(v));
}

GridFunction read_grid_function_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  return read_grid_function_csv(is);
}

GridMeasure read_grid_measure_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  auto v = read_rows(is);
  const int n = static_cast<int>(v.size());
  return GridMeasure(PeriodicGrid(n), std::move(v));
}

}  // namespace ckam
