#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ckam/state.hpp"

namespace ckam {

/// Uniform periodic grid x_i = i / n on the unit circle.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(int n);

  int size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double node(int i) const noexcept { return h_ * static_cast<double>(wrap(i)); }
  int wrap(int i) const noexcept {
    int r = i % n_;
    return r < 0 ? r + n_ : r;
  }
  /// Index of the node closest to x; exact ties resolve to the lower index.
  int nearest(double x) const noexcept;

  bool operator==(const PeriodicGrid&) const = default;

 private:
  int n_;
  double h_;
};

class GridFunction {
 public:
  GridFunction(PeriodicGrid grid, std::vector<double> values);
  static GridFunction constant(PeriodicGrid grid, double c);

  template <class F>
  static GridFunction sample(PeriodicGrid grid, F&& f) {
    std::vector<double> v(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i) v[static_cast<std::size_t>(i)] = f(grid.node(i));
    return GridFunction(grid, std::move(v));
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double operator[](int i) const noexcept { return values_[static_cast<std::size_t>(grid_.wrap(i))]; }

  double sup_norm() const noexcept;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

double sup_distance(const GridFunction& a, const GridFunction& b);

/// Probability weights on the grid nodes.
class GridMeasure {
 public:
  /// Validates nonnegativity and unit mass (within 1e-12).
  GridMeasure(PeriodicGrid grid, std::vector<double> weights);

  static GridMeasure uniform(PeriodicGrid grid);
  static GridMeasure dirac(PeriodicGrid grid, int node);
  /// Rescales nonnegative weights to unit mass.
  static GridMeasure normalized(PeriodicGrid grid, std::vector<double> weights);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](int i) const noexcept { return weights_[static_cast<std::size_t>(grid_.wrap(i))]; }

  /// (1 - alpha) * this + alpha * other.
  GridMeasure blend(const GridMeasure& other, double alpha) const;
  /// Indices carrying strictly positive mass.
  std::vector<int> support() const;

 private:
  PeriodicGrid grid_;
  std::vector<double> weights_;
};

struct PhaseAtom {
  ContactState state;
  double weight = 0.0;
};

/// Finitely supported probability measure on T*M x R.
class PhaseMeasure {
 public:
  explicit PhaseMeasure(std::vector<PhaseAtom> atoms);
  std::span<const PhaseAtom> atoms() const noexcept { return atoms_; }

 private:
  std::vector<PhaseAtom> atoms_;
};

enum class DiffMode { Centered, Forward, Backward };

GridFunction gradient(const GridFunction& f, DiffMode mode = DiffMode::Centered);
double forward_difference(const GridFunction& f, int i);
double backward_difference(const GridFunction& f, int i);

/// Periodic piecewise-linear interpolation.
double interpolate(const GridFunction& f, double x);

/// Exact Wasserstein-1 distance on the circle (geodesic cost).
double d1_distance(const GridMeasure& a, const GridMeasure& b);

/// Projection to x followed by nearest-node deposition.
GridMeasure pushforward(const PhaseMeasure& eta, const PeriodicGrid& grid);

/// h * sum_i f_i.
double quadrature(const GridFunction& f);
/// sum_i f_i w_i.
double measure_integral(const GridFunction& f, const GridMeasure& m);

/// CSV with header `x,value`, shortest round-trip decimals.
void write_csv(std::ostream& os, const GridFunction& f);
void write_csv(std::ostream& os, const GridMeasure& m);
void write_csv(const std::string& path, const GridFunction& f);
void write_csv(const std::string& path, const GridMeasure& m);
GridFunction read_grid_function_csv(std::istream& is);
GridFunction read_grid_function_csv(const std::string& path);
GridMeasure read_grid_measure_csv(const std::string& path);

std::string format_double(double v);

}  // namespace ckam
