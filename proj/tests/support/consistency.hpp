#pragma once

// Exhaustive single-atom consistency search: node j is a candidate
// equilibrium when the Mather set of the Hamiltonian shifted by F(., delta_j)
// contains j itself. Every node is tried independently, with no iteration.

#include <vector>

#include "ckam/mather.hpp"
#include "ckam/weak_kam.hpp"

namespace oracle {

inline std::vector<int> consistent_single_atoms(const ckam::ContactModel& model,
                                                const ckam::Coupling& coupling,
                                                const ckam::PeriodicGrid& grid,
                                                const ckam::SemigroupConfig& cfg,
                                                const ckam::KSetTolerances& tol) {
  std::vector<int> out;
  for (int j = 0; j < grid.size(); ++j) {
    const auto m = ckam::GridMeasure::dirac(grid, j);
    const auto data = ckam::FrozenData::build(model, coupling, m);
    const auto sol = ckam::solve_u_minus(data, ckam::GridFunction::constant(grid, 0.0), cfg);
    if (!sol.converged) continue;
    try {
      if (ckam::extract_kset(sol.u, data, tol).contains(j)) out.push_back(j);
    } catch (const ckam::EmptyKSetError&) {
    }
  }
  return out;
}

inline bool within_cells(int node, const std::vector<int>& set, int n, int cells) {
  for (int j : set) {
    const int d = std::abs(node - j) % n;
    if (std::min(d, n - d) <= cells) return true;
  }
  return false;
}

}  // namespace oracle
