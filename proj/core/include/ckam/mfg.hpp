#pragma once

#include <string>
#include <vector>

#include "ckam/grid.hpp"
#include "ckam/mather.hpp"
#include "ckam/model.hpp"
#include "ckam/weak_kam.hpp"

namespace ckam {

enum class Selection { Uniform, ResidualWeighted };
enum class Damping { Averaging, Fixed };

std::string to_string(Selection s);
std::string to_string(Damping d);

struct EquilibriumConfig {
  Selection selection = Selection::Uniform;
  Damping damping = Damping::Averaging;
  double alpha = 1.0;  ///< used when damping == Fixed
  double tol_m = 1e-6;
  double tol_mass = 1e-3;
  int max_outer = 200;
  int continuity_modes = 8;
  SemigroupConfig solver;
  KSetTolerances kset;

  /// tol_m = max(1e-6, h / 10) and solver/K-set defaults for the grid.
  static EquilibriumConfig defaults(const ContactModel& model, const Coupling& coupling,
                                    const PeriodicGrid& grid);
  void validate() const;
};

struct BestResponse {
  GridMeasure measure;
  WeakKamSolution solution;
  KSet kset;
};

/// One selection from the best-response set: the pushforward of a Mather
/// measure of H_m built on the K-set of u_m. `warm` seeds the HJ solve.
BestResponse best_response(const GridMeasure& m, const ContactModel& model,
                           const Coupling& coupling, const EquilibriumConfig& cfg,
                           const GridFunction* warm = nullptr);

struct TraceEntry {
  int k = 0;
  double d1_gap = 0.0;
  int support_size = 0;
  double support_leak = 0.0;
};

struct EquilibriumResult {
  GridFunction u;
  GridMeasure m;
  KSet kset;
  double hj_residual = 0.0;
  double continuity_residual = 0.0;
  double d1_gap = 0.0;
  double support_leak = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

EquilibriumResult iterate_equilibrium(const GridMeasure& m0, const ContactModel& model,
                                      const Coupling& coupling, const EquilibriumConfig& cfg);

/// Mass of m outside the given node set.
double support_leak(const GridMeasure& m, const KSet& kset);

/// Kink-aware residual of H(x, u, Du) = F(x, m) combined with the one-sided
/// subsolution test max(0, min(H(D-u), H(D+u)) - F).
double hj_residual(const GridFunction& u, const ContactModel& model, const Coupling& coupling,
                   const GridMeasure& m);

/// max over phi in {sin 2 pi k x, cos 2 pi k x : k <= modes} of
/// |sum_i w_i phi'(x_i) H_p(x_i, u_i, Du_i)|.
double continuity_residual(const GridFunction& u, const GridMeasure& m, const ContactModel& model,
                           const Coupling& coupling, int modes);

}  // namespace ckam
