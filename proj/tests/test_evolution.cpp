#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hylam/evolution.hpp"
#include "hylam/verification.hpp"

using namespace hylam;

namespace {

LayerMaterials power_materials(double a1, double a2, double b = 0.5,
                               double wscale = 1.0) {
  return LayerMaterials{power_modulus(a1, b), power_modulus(a2, b),
                        quadratic_dissipation(wscale),
                        quadratic_dissipation(wscale)};
}

// identical stiff layers, strong interface, load below the damage threshold
EvolutionSetup homogeneous_setup(int n_elems, int n_steps) {
  EvolutionSetup s{make_mesh(1.0, n_elems),
                   power_materials(96.0, 96.0),
                   make_quadratic_unloading(parabolic_capped_profile(5.0, 1.0)),
                   LoadProgram::linear_ramp(0.12, 1.0),
                   TimePartition::uniform(n_steps, 1.0),
                   SolverOptions{},
                   SystemState{},
                   {},
                   false};
  s.solver.tol_grad = 1e-11;
  s.initial = make_state(s.mesh);
  return s;
}

// a mild damage notch in layer 1 engages damage growth and interface slip
EvolutionSetup notched_setup(int n_elems, int n_steps, double rate = 0.5) {
  EvolutionSetup s{make_mesh(1.0, n_elems),
                   power_materials(96.0, 96.0),
                   make_quadratic_unloading(parabolic_capped_profile(1.0, 1.0)),
                   LoadProgram::linear_ramp(rate, 1.0),
                   TimePartition::uniform(n_steps, 1.0),
                   SolverOptions{},
                   SystemState{},
                   {},
                   false};
  s.solver.tol_grad = 1e-10;
  s.initial = make_state(s.mesh);
  for (int j = 0; j <= n_elems; ++j) {
    const double x = s.mesh.nodes[j] / s.mesh.L;
    s.initial.alpha1[j] = 0.35 * std::exp(-60.0 * (x - 0.5) * (x - 0.5));
  }
  return s;
}

}  // namespace

TEST_CASE("load programs evaluate their closed forms") {
  const LoadProgram ramp = LoadProgram::linear_ramp(2.0, 3.0);
  CHECK(ramp.value(0.0) == 0.0);
  CHECK(ramp.value(1.5) == doctest::Approx(3.0));
  CHECK(ramp.rate(2.9) == doctest::Approx(2.0));
  CHECK(ramp.total_variation(0.5, 2.5) == doctest::Approx(4.0));

  const LoadProgram tri = LoadProgram::triangle(1.0, 2.0, 0.5, 3.0);
  CHECK(tri.value(1.0) == doctest::Approx(2.0));
  CHECK(tri.value(3.0) == doctest::Approx(0.5));
  CHECK(tri.rate(0.5) == doctest::Approx(2.0));
  CHECK(tri.rate(2.0) == doctest::Approx(-0.75));
  CHECK(tri.total_variation(0.0, 3.0) == doctest::Approx(3.5));
  // integral of |rate| |value - c| on the rising flank: rate 2, value 2t:
  // int_0^1 2 |2t - 1| dt = 1
  CHECK(tri.weighted_abs_integral(0.0, 1.0, 1.0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(LoadProgram::triangle(2.0, 1.0, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(LoadProgram::tabulated({0.0, 1.0}, {0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TimePartition::from_times({0.0, 0.5, 0.4}),
                  std::invalid_argument);
}

TEST_CASE("initialize validates data and probes stability") {
  EvolutionSetup s = homogeneous_setup(16, 10);
  const InitReport rep = initialize(s);
  CHECK(rep.stable);
  CHECK(std::abs(rep.energy_drop) <= 1e-9);

  EvolutionSetup bad = s;
  bad.initial.alpha1[3] = 1.2;
  CHECK_THROWS_AS(initialize(bad), IncompatibleData);

  // affine initial data matching a nonzero starting load
  EvolutionSetup shifted = homogeneous_setup(16, 10);
  shifted.load = LoadProgram::tabulated({0.0, 1.0}, {0.1, 0.22});
  shifted.initial = make_state(shifted.mesh, 0.1);
  const InitReport rep2 = initialize(shifted);
  CHECK(rep2.stable);
}

TEST_CASE("zero load gives a constant trace with vanishing residuals") {
  EvolutionSetup s = homogeneous_setup(12, 8);
  s.load = LoadProgram::tabulated({0.0, 1.0}, {0.0, 0.0});
  const EvolutionTrace trace = run_evolution(s);
  REQUIRE(trace.rows.size() == 9);
  for (const TraceRow& row : trace.rows) {
    CHECK(row.eb_residual <= 1e-14);
    CHECK(row.work == 0.0);
    CHECK(row.energy_total == trace.rows.front().energy_total);
    CHECK(row.converged);
  }
}

TEST_CASE("homogeneous ramp reproduces the closed-form work") {
  EvolutionSetup s = homogeneous_setup(32, 50);
  const EvolutionTrace trace = run_evolution(s);
  const double E0 = 96.0;
  for (const TraceRow& row : trace.rows) {
    CHECK(row.eb_residual <= 1e-10);
    CHECK(std::abs(row.work - E0 * row.ubar * row.ubar / s.mesh.L) <= 1e-10);
    CHECK(row.max_gamma_minus_dh == 0.0);
    CHECK(row.converged);
  }
  // no slip, no damage anywhere along the way
  CHECK(trace.rows.back().damage == 0.0);
  CHECK(trace.rows.back().cohesive == 0.0);
}

TEST_CASE("damaging evolution keeps the ledger invariants") {
  EvolutionSetup s = notched_setup(24, 30);
  s.keep_all_states = true;
  const EvolutionTrace trace = run_evolution(s);
  const double scale = 1.0 + std::abs(trace.rows.back().energy_total);

  // damage actually activates
  CHECK(trace.rows.back().damage > trace.rows.front().damage + 1e-3);

  for (size_t k = 1; k < trace.rows.size(); ++k) {
    const TraceRow& row = trace.rows[k];
    CHECK(row.converged);
    CHECK(row.elastic >= 0.0);
    CHECK(row.damage >= 0.0);
    CHECK(row.cohesive >= 0.0);
    // exact irreversibility and monotone history
    CHECK(row.kkt_min_dalpha >= 0.0);
    for (int j = 0; j <= s.mesh.n_elems; ++j) {
      CHECK(trace.states[k].alpha1[j] >= trace.states[k - 1].alpha1[j]);
      CHECK(trace.states[k].alpha2[j] >= trace.states[k - 1].alpha2[j]);
      CHECK(trace.states[k].delta_h[j] >= trace.states[k - 1].delta_h[j]);
    }
    // one-sided incremental energy inequality (warm-start dominance)
    CHECK(row.energy_total - trace.rows.front().energy_total - row.work_rect -
              row.remainder_rect <=
          1e-9 * scale);
    // the computed trajectory identifies the history fields
    CHECK(row.max_gamma_minus_dh == 0.0);
    // work accumulates under monotone loading with nonnegative stresses
    CHECK(row.work >= trace.rows[k - 1].work - 1e-12 * scale);
  }
}

TEST_CASE("uniform bounds and the history Hoelder estimate hold with slack") {
  EvolutionSetup s = notched_setup(24, 20);
  s.keep_all_states = true;
  const EvolutionTrace trace = run_evolution(s);
  const TheoryBounds tb = theory_bounds(s);

  for (const SystemState& state : trace.states) {
    CHECK(state_u_h1_norm(s.mesh, state) <= 2.0 * tb.u_h1_bound);
    CHECK(state_alpha_h1_norm(s.mesh, state) <= 2.0 * tb.alpha_h1_bound);
    for (int i = 0; i <= s.mesh.n_elems; ++i)
      for (int j = i + 1; j <= s.mesh.n_elems; ++j) {
        const double gap = std::abs(state.delta_h[i] - state.delta_h[j]);
        const double dist = std::abs(s.mesh.nodes[i] - s.mesh.nodes[j]);
        CHECK(gap <= 2.0 * tb.holder_constant * std::sqrt(dist));
      }
  }
}

TEST_CASE("triangle loading: history persists through unloading") {
  EvolutionSetup s = notched_setup(24, 40);
  s.load = LoadProgram::triangle(0.6, 0.55, 0.05, 1.0);
  s.keep_all_states = true;
  const EvolutionTrace trace = run_evolution(s);

  double max_dh = 0.0;
  for (double v : trace.states.back().delta_h) max_dh = std::max(max_dh, v);
  REQUIRE(max_dh > 1e-4);  // the interface actually opened

  const NodalField d_last = slip(trace.states.back());
  double max_d_last = 0.0;
  for (double v : d_last) max_d_last = std::max(max_d_last, v);
  CHECK(max_d_last < max_dh - 1e-6);  // unloaded below the peak slip

  for (size_t k = 1; k < trace.states.size(); ++k)
    for (int j = 0; j <= s.mesh.n_elems; ++j)
      CHECK(trace.states[k].delta_h[j] >= trace.states[k - 1].delta_h[j]);
  for (const TraceRow& row : trace.rows)
    CHECK(row.max_gamma_minus_dh <= 1e-12);
}

TEST_CASE("refinement study: residuals decay and the single step dominates") {
  EvolutionSetup s = notched_setup(16, 1);
  const std::vector<RefineSummary> sums = refine_study(s, {1, 8, 16, 32, 64});
  for (const RefineSummary& sum : sums) CHECK(sum.all_converged);
  // energy-balance defect decreases under refinement
  CHECK(sums[0].max_eb_residual > sums[4].max_eb_residual);
  CHECK(sums[1].max_eb_residual >= sums[2].max_eb_residual * 0.9);
  CHECK(sums[2].max_eb_residual >= sums[3].max_eb_residual * 0.9);
  // the measured remainder decreases monotonically
  for (size_t i = 1; i < sums.size(); ++i)
    CHECK(sums[i].remainder < sums[i - 1].remainder);
}

TEST_CASE("constant load: residuals collapse at every partition") {
  EvolutionSetup s = homogeneous_setup(12, 1);
  s.load = LoadProgram::tabulated({0.0, 1.0}, {0.0, 0.0});
  const std::vector<RefineSummary> sums = refine_study(s, {2, 8, 32});
  for (const RefineSummary& sum : sums) {
    CHECK(sum.max_eb_residual <= 1e-12);
    CHECK(sum.remainder <= 1e-12);
  }
}

TEST_CASE("temporal regularity: load-Lipschitz modulus stable under refinement") {
  EvolutionSetup s = notched_setup(16, 1);
  // margin > 0 for these parameters: m/M = 2, lambda L^2/pi^2 = 2/pi^2
  const ConvexityBudget budget =
      check_regularity_condition(s.materials, s.law, s.mesh.L);
  REQUIRE(budget.holds());
  const std::vector<RefineSummary> sums = refine_study(s, {20, 40});
  CHECK(sums[0].load_lipschitz_modulus > 0.0);
  CHECK(std::isfinite(sums[0].load_lipschitz_modulus));
  CHECK(sums[1].load_lipschitz_modulus <=
        1.5 * sums[0].load_lipschitz_modulus);
}

TEST_CASE("measured remainder matches its hand-computed value on a ramp") {
  // For a linear ramp and piecewise-constant interpolants the first part of
  // the remainder is sum_k A_{k-1} rate^2 dt^2 / (2 L^2) and the second is
  // max_k |S_{k-1}| rate dt / L.
  EvolutionSetup s = homogeneous_setup(8, 4);
  s.keep_all_states = true;
  const EvolutionTrace trace = run_evolution(s);
  const double rate = 0.12, dt = 0.25, L = 1.0;
  double first = 0.0, second = 0.0;
  for (size_t k = 1; k < trace.rows.size(); ++k) {
    first += trace.rows[k - 1].modulus_int * rate * rate * dt * dt /
             (2.0 * L * L);
    second = std::max(second,
                      std::abs(trace.rows[k - 1].sum_stress) * rate * dt / L);
  }
  CHECK(measured_remainder(trace, s.load) ==
        doctest::Approx(first + second).epsilon(1e-12));
}
