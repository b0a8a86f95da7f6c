#pragma once

#include <cmath>

namespace ckam {

/// Wraps a position onto the unit circle [0, 1).
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// Signed shortest displacement from `from` to `to` on the unit circle, in [-1/2, 1/2).
inline double circle_displacement(double from, double to) {
  double d = to - from;
  d -= std::floor(d + 0.5);
  return d;
}

inline double circle_distance(double a, double b) { return std::abs(circle_displacement(a, b)); }

/// A point (x, u, p) of T*M x R; x is kept in [0, 1).
struct ContactState {
  double x = 0.0;
  double u = 0.0;
  double p = 0.0;
};

}  // namespace ckam
