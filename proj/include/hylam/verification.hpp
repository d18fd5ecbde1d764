// Independent residual checks: everything here is computed from exported
// state/trace data through the assembly interface, never from solver
// internals.

#pragma once

#include <cstdint>

#include "hylam/evolution.hpp"

namespace hylam {

// The zero-history set {gamma = 0} at finite precision: nodes with
// gamma <= cutoff_scale * (delta_bar if finite, else 1).
inline constexpr double kZeroHistoryCutoff = 1e-12;

struct EnergyBalanceReport {
  std::vector<double> per_step;   // |(E+D+K)(t_k) - (E+D+K)(0) - W(t_k)|
  double max_residual = 0.0;
  // signed excess over the one-sided incremental bound
  // (E+D+K)(t_k) - (E+D+K)(0) - W_rect(t_k) - R_rect(t_k); nonpositive when
  // every increment beat its affinely shifted warm start
  double max_one_sided_excess = 0.0;
};

EnergyBalanceReport energy_balance_residual(const EvolutionTrace& trace);

/// Max elementwise deviation of sigma1 + sigma2 from its spatial mean.
double stress_constancy_residual(const Mesh& mesh, const SystemState& state,
                                 const LayerMaterials& materials);

struct KktTriple {
  double min_dalpha = 0.0;       // must never be negative
  double grad_violation = 0.0;   // most negative operator value on {alpha<1}
  double complementarity = 0.0;  // max |operator * dalpha| on {alpha<1}
};

/// Discrete Karush-Kuhn-Tucker residuals per step, recomputed from stored
/// states with the assembly quadrature. Requires a trace recorded with
/// keep_all_states.
std::vector<KktTriple> kkt_residuals(const Mesh& mesh,
                                     const EvolutionTrace& trace,
                                     const CohesiveLaw& law,
                                     const LayerMaterials& materials);

/// Worst positive excess of the displacement stability inequality
///   |int sum sigma_i v_i' + int_{delta>0} dphi_dy sgn(u1-u2)(v1-v2)|
///     <= psi'(0) int_{gamma=0} |v1 - v2|
/// over n_test_fields random boundary-zero unit test pairs plus the
/// deterministic hat-function basis.
double stability_residual(const Mesh& mesh, const SystemState& state,
                          const CohesiveLaw& law,
                          const LayerMaterials& materials, int n_test_fields,
                          std::uint64_t seed = 12345);

struct OracleResult {
  SystemState state;
  double energy = 0.0;
  int free_coordinates = 0;
  int starts = 0;
};

/// Dense multi-start search for the incremental global minimum on tiny
/// problems (coordinate cap 8). Uses only energy evaluations: seeded random
/// starts followed by cyclic coordinate line searches.
OracleResult brute_force_increment_oracle(const Mesh& mesh,
                                          const SystemState& prev,
                                          double boundary_value,
                                          const CohesiveLaw& law,
                                          const LayerMaterials& materials,
                                          int n_starts = 10000,
                                          std::uint64_t seed = 2024);

struct HistoryGapSummary {
  int n_steps = 0;
  // max over steps/nodes of |gamma ^ delta_bar - delta_h ^ delta_bar|
  double max_gap = 0.0;
  // sup distance of the truncated delta_h path to the finest level's at
  // shared times (the observable surrogate for the limit identification)
  double cross_level_gap = 0.0;
  bool preconditions_met = true;
};

std::vector<HistoryGapSummary> history_equivalence_study(
    const EvolutionSetup& setup, const std::vector<int>& partitions);

/// A-priori constants from the coercivity estimate: energy bound from the
/// (affine lift, full damage) competitor, the resulting H1 bounds, and the
/// spatial Hoelder constant of the history slip.
struct TheoryBounds {
  double energy_bound = 0.0;
  double u_h1_bound = 0.0;      // on the two-layer displacement vector
  double alpha_h1_bound = 0.0;  // on the two-layer damage vector
  double holder_constant = 0.0;
  double eps = 0.0;
};

TheoryBounds theory_bounds(const EvolutionSetup& setup);

// Discrete norms of the two-layer fields of a state.
double state_u_h1_norm(const Mesh& mesh, const SystemState& state);
double state_alpha_h1_norm(const Mesh& mesh, const SystemState& state);

}  // namespace hylam
