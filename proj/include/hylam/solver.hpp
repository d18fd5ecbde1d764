// One step of the incremental scheme: minimize the total energy over
// displacements with prescribed end values and damage fields boxed between
// the previous damage and 1, the cohesive history frozen at its previous
// value and lifted by the current slip.

#pragma once

#include <cstdint>

#include "hylam/assembly.hpp"

namespace hylam {

struct InvalidBound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  int max_outer_iters = 100;   // alternate-minimization sweeps
  double tol_energy = 1e-13;   // absolute sweep energy-decrease stop
  double tol_grad = 1e-10;     // componentwise optimality violation stop
  int n_restarts = 0;          // multi-start polish
  double restart_amplitude = 0.1;
  double step_init = 1.0;  // backtracking: first trial step
  double step_shrink = 0.5;
  double step_decrease = 1e-4;  // sufficient-decrease constant
  std::uint64_t rng_seed = 0;
  int max_inner_iters = 200000;

  void validate() const;
};

struct SubsolveResult {
  int iterations = 0;
  double violation = 0.0;  // worst componentwise optimality violation
  bool converged = false;
};

struct IncrementResult {
  SystemState state;
  double energy = 0.0;
  int outer_iters = 0;
  bool converged = false;
  int restarts_improved = 0;
  double grad_residual = 0.0;  // worst sub-block violation at exit
};

/// Displacement block: monotone proximal-gradient descent with backtracking
/// (an accelerated trial step is used when it keeps the energy decreasing).
/// The slip kinks are handled by soft-thresholding, so a node with no
/// history sticks at zero slip until the elastic pull exceeds psi'(0) times
/// its node weight. alpha is frozen.
SubsolveResult minimize_u(const Mesh& mesh, NodalField& u1, NodalField& u2,
                          const NodalField& alpha1, const NodalField& alpha2,
                          const NodalField& gamma_floor, const CohesiveLaw& law,
                          const LayerMaterials& materials,
                          const SolverOptions& opts);

/// Damage block: projected-gradient descent with backtracking on the box
/// [lower, 1]; u is frozen. The subproblem is convex under the hardening
/// assumptions, so the exit test is the componentwise box optimality
/// violation (gradient at interior nodes, one-sided at the bounds).
SubsolveResult minimize_alpha(const Mesh& mesh, const NodalField& u1,
                              const NodalField& u2, NodalField& alpha1,
                              NodalField& alpha2, const NodalField& lower1,
                              const NodalField& lower2,
                              const LayerMaterials& materials,
                              const SolverOptions& opts);

/// Full increment: affine warm start from the previous state (so the result
/// never exceeds the shifted-competitor energy), alternate minimization to a
/// joint fixed point, history update delta_h^k = delta_h^(k-1) v delta^k.
/// Throws InvalidBound when the previous damage leaves [0,1]; an exhausted
/// iteration budget is reported through converged = false, never thrown.
IncrementResult solve_increment(const Mesh& mesh, const SystemState& prev,
                                double boundary_value, const CohesiveLaw& law,
                                const LayerMaterials& materials,
                                const SolverOptions& opts);

/// Multi-start polish: n_restarts random admissible perturbations of the
/// converged state, each re-minimized; returns the lowest-energy result
/// (ties keep the earlier candidate). Deterministic given rng_seed.
IncrementResult global_polish(const Mesh& mesh, IncrementResult result,
                              const SystemState& prev, const CohesiveLaw& law,
                              const LayerMaterials& materials,
                              const SolverOptions& opts);

}  // namespace hylam
