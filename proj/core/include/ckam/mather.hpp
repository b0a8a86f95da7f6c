#pragma once

#include <vector>

#include "ckam/grid.hpp"
#include "ckam/model.hpp"
#include "ckam/weak_kam.hpp"

namespace ckam {

struct KSetTolerances {
  double tol_h = 0.0;  ///< bound on |H(x, u, 0) - F(x, m)|
  double tol_g = 0.0;  ///< bound on |centered gradient|

  /// tol_h = 1e-3 h^2 + 10 lambda tol_conv, tol_g = 5 sqrt(h).
  static KSetTolerances defaults(const ContactModel& model, const PeriodicGrid& grid,
                                 double tol_conv = 1e-9);
};

struct KSet {
  std::vector<int> nodes;
  std::vector<double> positions;
  std::vector<double> u_values;
  std::vector<double> h_residual;  ///< per member
  std::vector<double> g_residual;  ///< per member

  std::size_t size() const noexcept { return nodes.size(); }
  bool contains(int node) const;
};

/// |H(x_i, u_i, 0) - F(x_i, m)| and |centered gradient| at every node.
struct NodeResiduals {
  std::vector<double> h;
  std::vector<double> g;
};
NodeResiduals kset_residuals(const GridFunction& u, const FrozenData& data);

/// Throws EmptyKSetError when no node passes both tests.
KSet extract_kset(const GridFunction& u_minus, const FrozenData& data, const KSetTolerances& tol);
KSet extract_kset(const GridFunction& u_minus, const ContactModel& model, const Coupling& coupling,
                  const GridMeasure& m, const KSetTolerances& tol);

/// Nodes where |u_minus - u_plus| <= tol.
std::vector<int> aubry_proxy(const GridFunction& u_minus, const GridFunction& u_plus, double tol);

/// Atoms (x_i, u_minus(x_i), 0) with uniform weights.
PhaseMeasure build_mather_measure(const KSet& kset, const GridFunction& u_minus);
/// Custom weights, one per K-set member, nonnegative with unit sum.
PhaseMeasure build_mather_measure(const KSet& kset, const GridFunction& u_minus,
                                  const std::vector<double>& weights);

}  // namespace ckam
