// Quasi-static driver: time partition, one incremental solve per step,
// history update, work accumulation and the per-step ledger.

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "hylam/solver.hpp"

namespace hylam {

/// Prescribed end displacement, piecewise linear in time (absolutely
/// continuous by construction). rate() takes the right derivative at kinks.
class LoadProgram {
 public:
  static LoadProgram linear_ramp(double rate, double T);
  static LoadProgram triangle(double peak_time, double peak_value,
                              double end_value, double T);
  static LoadProgram tabulated(std::vector<double> times,
                               std::vector<double> values);

  double T() const { return times_.back(); }
  double value(double t) const;
  double rate(double t) const;
  // Total variation of the prescribed displacement on [s, t].
  double total_variation(double s, double t) const;
  // Integral over [s, t] of |rate(tau)| * |value(tau) - c|, exact for the
  // piecewise-linear families.
  double weighted_abs_integral(double s, double t, double c) const;

  const std::vector<double>& breakpoints() const { return times_; }

 private:
  LoadProgram() = default;
  std::vector<double> times_, values_;
};

struct TimePartition {
  std::vector<double> times;  // 0 = t_0 < ... < t_n = T

  static TimePartition uniform(int n_steps, double T);
  static TimePartition from_times(std::vector<double> times);
  int n_steps() const { return int(times.size()) - 1; }
};

struct TraceRow {
  int k = 0;
  double t = 0.0;
  double ubar = 0.0;
  double elastic = 0.0, damage = 0.0, cohesive = 0.0;
  double work = 0.0;  // trapezoid-in-time accumulation
  double eb_residual = 0.0;
  double stress_residual = 0.0;
  double kkt_min_dalpha = 0.0;
  double kkt_grad_violation = 0.0;   // most negative operator value, negated
  double kkt_complementarity = 0.0;  // max |operator * dalpha| on {alpha<1}
  double max_gamma_minus_dh = 0.0;   // truncated at delta_bar
  int solver_iters = 0;
  bool converged = true;
  double grad_residual = 0.0;
  // work bookkeeping for the incremental energy inequality
  double sum_stress = 0.0;      // integral of sigma1 + sigma2
  double modulus_int = 0.0;     // integral of E1(a1) + E2(a2)
  double work_rect = 0.0;       // rectangle-rule work (competitor bound)
  double remainder_rect = 0.0;  // cumulative quadratic competitor remainder
  double energy_total = 0.0;
  double warm_energy = 0.0;  // energy of the affinely shifted previous state
};

struct EvolutionTrace {
  std::vector<TraceRow> rows;
  std::map<int, SystemState> snapshots;
  std::vector<SystemState> states;  // every step, when requested
  double L = 0.0;
  int n_elems = 0;
};

struct EvolutionSetup {
  Mesh mesh;
  LayerMaterials materials;
  CohesiveLaw law;
  LoadProgram load;
  TimePartition partition;
  SolverOptions solver;
  SystemState initial;
  std::vector<int> snapshot_steps;
  bool keep_all_states = false;
};

struct InitReport {
  SystemState state;
  bool stable = true;     // initial data survive one minimization at t = 0
  double energy_drop = 0.0;
};

/// Validates the initial data, seeds the history fields from the initial
/// slip, and probes global stability of the data by one solve at t = 0.
InitReport initialize(const EvolutionSetup& setup);

EvolutionTrace run_evolution(const EvolutionSetup& setup);

/// Measured remainder of the incremental energy inequality: the exact
/// time-quadrature defect of the piecewise-constant interpolants.
double measured_remainder(const EvolutionTrace& trace, const LoadProgram& load);

struct RefineSummary {
  int n_steps = 0;
  double max_eb_residual = 0.0;
  double remainder = 0.0;
  double max_stress_residual = 0.0;
  double final_work = 0.0;
  double final_energy = 0.0;
  bool all_converged = true;
  // empirical Lipschitz-in-load modulus of the state path (finite when the
  // convexity margin is positive)
  double load_lipschitz_modulus = 0.0;
};

/// Same physical problem at each partition size; witnesses the decay of the
/// energy-balance defect and of the measured remainder.
std::vector<RefineSummary> refine_study(const EvolutionSetup& setup,
                                        const std::vector<int>& partitions);

/// Ratio of state distance to load variation over all step pairs; the
/// temporal-regularity certificate when the convexity condition holds.
double load_lipschitz_modulus(const EvolutionTrace& trace,
                              const LoadProgram& load, const Mesh& mesh);

}  // namespace hylam
