#include "ckam/mather.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ckam/error.hpp"

namespace ckam {

KSetTolerances KSetTolerances::defaults(const ContactModel& model, const PeriodicGrid& grid,
                                        double tol_conv) {
  const double h = grid.spacing();
  return {1e-3 * h * h + 10.0 * model.theta().lambda() * tol_conv, 5.0 * std::sqrt(h)};
}

bool KSet::contains(int node) const {
  return std::find(nodes.begin(), nodes.end(), node) != nodes.end();
}

NodeResiduals kset_residuals(const GridFunction& u, const FrozenData& data) {
  if (!(u.grid() == data.grid)) throw Error("kset_residuals: grid mismatch");
  const int n = data.size();
  NodeResiduals r{std::vector<double>(static_cast<std::size_t>(n)),
                  std::vector<double>(static_cast<std::size_t>(n))};
  const double h = data.grid.spacing();
  for (int i = 0; i < n; ++i) {
    r.h[static_cast<std::size_t>(i)] = std::abs(data.hamiltonian(i, u[i], 0.0));
    r.g[static_cast<std::size_t>(i)] = std::abs(u[i + 1] - u[i - 1]) / (2.0 * h);
  }
  return r;
}

KSet extract_kset(const GridFunction& u_minus, const FrozenData& data, const KSetTolerances& tol) {
  const auto r = kset_residuals(u_minus, data);
  KSet k;
  double min_h = std::numeric_limits<double>::infinity(), min_g = min_h;
  for (int i = 0; i < data.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    min_h = std::min(min_h, r.h[j]);
    min_g = std::min(min_g, r.g[j]);
    if (r.h[j] <= tol.tol_h && r.g[j] <= tol.tol_g) {
      k.nodes.push_back(i);
      k.positions.push_back(data.grid.node(i));
      k.u_values.push_back(u_minus[i]);
      k.h_residual.push_back(r.h[j]);
      k.g_residual.push_back(r.g[j]);
    }
  }
  if (k.nodes.empty()) throw EmptyKSetError(min_h, min_g);
  return k;
}

KSet extract_kset(const GridFunction& u_minus, const ContactModel& model, const Coupling& coupling,
                  const GridMeasure& m, const KSetTolerances& tol) {
  return extract_kset(u_minus, FrozenData::build(model, coupling, m), tol);
}

std::vector<int> aubry_proxy(const GridFunction& u_minus, const GridFunction& u_plus, double tol) {
  if (!(u_minus.grid() == u_plus.grid())) throw Error("aubry_proxy: grid mismatch");
  std::vector<int> out;
  for (int i = 0; i < u_minus.grid().size(); ++i) {
    if (std::abs(u_minus[i] - u_plus[i]) <= tol) out.push_back(i);
  }
  return out;
}

PhaseMeasure build_mather_measure(const KSet& kset, const GridFunction& u_minus) {
  if (kset.nodes.empty()) throw Error("build_mather_measure: empty K-set");
  return build_mather_measure(
      kset, u_minus, std::vector<double>(kset.size(), 1.0 / static_cast<double>(kset.size())));
}

PhaseMeasure build_mather_measure(const KSet& kset, const GridFunction& u_minus,
                                  const std::vector<double>& weights) {
  if (kset.nodes.empty()) throw Error("build_mather_measure: empty K-set");
  if (weights.size() != kset.size()) {
    throw Error("build_mather_measure: " + std::to_string(weights.size()) + " weights for " +
                std::to_string(kset.size()) + " K-set nodes");
  }
  std::vector<PhaseAtom> atoms;
  for (std::size_t i = 0; i < kset.size(); ++i) {
    const int node = kset.nodes[i];
    atoms.push_back({{u_minus.grid().node(node), u_minus[node], 0.0}, weights[i]});
  }
  return PhaseMeasure(std::move(atoms));
}

}  // namespace ckam
