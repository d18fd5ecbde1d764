#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hylam/verification.hpp"

using namespace hylam;

namespace {

LayerMaterials power_materials(double a1, double a2, double b = 0.5,
                               double wscale = 1.0) {
  return LayerMaterials{power_modulus(a1, b), power_modulus(a2, b),
                        quadratic_dissipation(wscale),
                        quadratic_dissipation(wscale)};
}

EvolutionSetup homogeneous_setup(int n_elems, int n_steps) {
  EvolutionSetup s{make_mesh(1.0, n_elems),
                   power_materials(96.0, 96.0),
                   make_quadratic_unloading(parabolic_capped_profile(5.0, 1.0)),
                   LoadProgram::linear_ramp(0.12, 1.0),
                   TimePartition::uniform(n_steps, 1.0),
                   SolverOptions{},
                   SystemState{},
                   {},
                   true};
  s.solver.tol_grad = 1e-11;
  s.initial = make_state(s.mesh);
  return s;
}

EvolutionSetup notched_setup(int n_elems, int n_steps, double rate = 0.5) {
  EvolutionSetup s{make_mesh(1.0, n_elems),
                   power_materials(96.0, 96.0),
                   make_quadratic_unloading(parabolic_capped_profile(1.0, 1.0)),
                   LoadProgram::linear_ramp(rate, 1.0),
                   TimePartition::uniform(n_steps, 1.0),
                   SolverOptions{},
                   SystemState{},
                   {},
                   true};
  s.solver.tol_grad = 1e-10;
  s.initial = make_state(s.mesh);
  for (int j = 0; j <= n_elems; ++j) {
    const double x = s.mesh.nodes[j] / s.mesh.L;
    s.initial.alpha1[j] = 0.35 * std::exp(-60.0 * (x - 0.5) * (x - 0.5));
  }
  return s;
}

}  // namespace

TEST_CASE("energy balance report on the homogeneous ramp") {
  EvolutionSetup s = homogeneous_setup(16, 20);
  const EvolutionTrace trace = run_evolution(s);
  const EnergyBalanceReport rep = energy_balance_residual(trace);
  CHECK(rep.max_residual <= 1e-10);
  CHECK(rep.max_one_sided_excess <= 1e-10);
  CHECK(rep.per_step.size() == trace.rows.size());
}

TEST_CASE("stress constancy: homogeneous exact, unconverged worse") {
  EvolutionSetup s = notched_setup(24, 10);
  const EvolutionTrace conv_trace = run_evolution(s);
  const double conv_dev = stress_constancy_residual(
      s.mesh, conv_trace.states.back(), s.materials);

  // homogeneous state: deviation at rounding level
  EvolutionSetup h = homogeneous_setup(24, 4);
  const EvolutionTrace htrace = run_evolution(h);
  const double hdev = stress_constancy_residual(s.mesh, htrace.states.back(),
                                                h.materials);
  CHECK(hdev <= 1e-10);

  // a starved solve leaves a visibly worse residual
  EvolutionSetup starved = notched_setup(24, 10);
  starved.solver.max_outer_iters = 1;
  starved.solver.max_inner_iters = 3;
  starved.solver.tol_grad = 1e-16;
  const EvolutionTrace rough = run_evolution(starved);
  const double rough_dev = stress_constancy_residual(
      s.mesh, rough.states.back(), s.materials);
  CHECK(rough_dev > conv_dev);
}

TEST_CASE("kkt residuals: elastic phase clean, damaging phase within tolerance") {
  EvolutionSetup s = notched_setup(20, 20);
  const EvolutionTrace trace = run_evolution(s);
  const std::vector<KktTriple> kkt =
      kkt_residuals(s.mesh, trace, s.law, s.materials);
  REQUIRE(kkt.size() == trace.rows.size() - 1);
  bool damaged_somewhere = false;
  for (const KktTriple& t : kkt) {
    CHECK(t.min_dalpha >= 0.0);
    CHECK(t.grad_violation <= s.solver.tol_grad);
    double max_da = 0.0;
    damaged_somewhere = damaged_somewhere || t.complementarity > 0.0;
    (void)max_da;
  }
  CHECK(damaged_somewhere);

  // pinned damage: empty active set, all entries zero
  EvolutionSetup pinned = homogeneous_setup(10, 3);
  std::fill(pinned.initial.alpha1.begin(), pinned.initial.alpha1.end(), 1.0);
  std::fill(pinned.initial.alpha2.begin(), pinned.initial.alpha2.end(), 1.0);
  const EvolutionTrace ptrace = run_evolution(pinned);
  for (const KktTriple& t :
       kkt_residuals(pinned.mesh, ptrace, pinned.law, pinned.materials)) {
    CHECK(t.min_dalpha == 0.0);
    CHECK(t.grad_violation == 0.0);
    CHECK(t.complementarity == 0.0);
  }
}

TEST_CASE("complementarity is bounded by tolerance times the damage increment") {
  EvolutionSetup s = notched_setup(20, 20);
  const EvolutionTrace trace = run_evolution(s);
  const std::vector<KktTriple> kkt =
      kkt_residuals(s.mesh, trace, s.law, s.materials);
  for (size_t k = 0; k < kkt.size(); ++k) {
    double max_da = 0.0;
    for (int j = 0; j <= s.mesh.n_elems; ++j) {
      max_da = std::max(max_da, trace.states[k + 1].alpha1[j] -
                                    trace.states[k].alpha1[j]);
      max_da = std::max(max_da, trace.states[k + 1].alpha2[j] -
                                    trace.states[k].alpha2[j]);
    }
    CHECK(kkt[k].complementarity <= s.solver.tol_grad * std::max(max_da, 1e-30) +
                                        1e-18);
  }
}

TEST_CASE("stability inequality holds at converged states") {
  EvolutionSetup s = notched_setup(20, 12);
  const EvolutionTrace trace = run_evolution(s);
  // stick regime early, sliding regime late; both must satisfy the bound
  const double early = stability_residual(s.mesh, trace.states[2], s.law,
                                          s.materials, 64);
  const double late = stability_residual(s.mesh, trace.states.back(), s.law,
                                         s.materials, 64);
  CHECK(early <= 1e-6);
  CHECK(late <= 1e-6);

  // strict stick: the homogeneous state satisfies it with room to spare
  EvolutionSetup h = homogeneous_setup(16, 4);
  const EvolutionTrace htrace = run_evolution(h);
  CHECK(stability_residual(h.mesh, htrace.states.back(), h.law, h.materials,
                           64) <= 0.0);

  // a tampered state violates the inequality visibly
  SystemState bad = trace.states.back();
  for (int j = 1; j < s.mesh.n_elems; ++j) bad.u1[j] += 0.01 * j;
  CHECK(stability_residual(s.mesh, bad, s.law, s.materials, 64) > 1e-3);
}

TEST_CASE("oracle reproduces the analytic tiny homogeneous step") {
  const Mesh mesh = make_mesh(1.0, 2);
  const LayerMaterials mats = power_materials(40.0, 40.0);
  const CohesiveLaw law =
      make_quadratic_unloading(parabolic_capped_profile(5.0, 1.0));
  SystemState prev = make_state(mesh, 0.0);
  std::fill(prev.alpha1.begin(), prev.alpha1.end(), 1.0);
  std::fill(prev.alpha2.begin(), prev.alpha2.end(), 1.0);
  const double ubar = 0.3;
  const OracleResult oracle =
      brute_force_increment_oracle(mesh, prev, ubar, law, mats, 2000, 7);
  CHECK(oracle.free_coordinates == 2);
  // analytic: both layers affine, damage pinned at 1
  const double elastic = mats.E1.E(1.0) * ubar * ubar / mesh.L;
  const double dissip = 2.0 * mesh.L * mats.w1.w(1.0);
  CHECK(oracle.energy == doctest::Approx(elastic + dissip).epsilon(1e-8));
  for (int j = 0; j <= 2; ++j) {
    CHECK(std::abs(oracle.state.u1[j] - ubar * mesh.nodes[j]) <= 1e-5);
    CHECK(std::abs(oracle.state.u2[j] - ubar * mesh.nodes[j]) <= 1e-5);
  }
}

TEST_CASE("oracle: zero free coordinates returns the lifted input") {
  const Mesh mesh = make_mesh(1.0, 1);  // both displacement nodes pinned
  const LayerMaterials mats = power_materials(10.0, 10.0);
  const CohesiveLaw law =
      make_quadratic_unloading(parabolic_capped_profile(1.0, 1.0));
  SystemState prev = make_state(mesh, 0.0);
  std::fill(prev.alpha1.begin(), prev.alpha1.end(), 1.0);
  std::fill(prev.alpha2.begin(), prev.alpha2.end(), 1.0);
  const OracleResult oracle =
      brute_force_increment_oracle(mesh, prev, 0.2, law, mats, 10, 1);
  CHECK(oracle.free_coordinates == 0);
  CHECK(oracle.state.u1.back() == 0.2);
  CHECK(oracle.state.u1.front() == 0.0);
}

TEST_CASE("oracle rejects problems above the coordinate cap") {
  const Mesh mesh = make_mesh(1.0, 4);
  const LayerMaterials mats = power_materials(10.0, 10.0);
  const CohesiveLaw law =
      make_quadratic_unloading(parabolic_capped_profile(1.0, 1.0));
  const SystemState prev = make_state(mesh, 0.0);  // 6 u + 10 alpha coords
  CHECK_THROWS_AS(
      brute_force_increment_oracle(mesh, prev, 0.1, law, mats, 10, 1),
      std::invalid_argument);
}

TEST_CASE("solver matches the oracle on a convex tiny instance") {
  const Mesh mesh = make_mesh(1.0, 2);
  const LayerMaterials mats = power_materials(96.0, 96.0);
  const CohesiveLaw law =
      make_quadratic_unloading(parabolic_capped_profile(0.25, 1.0));
  REQUIRE(check_regularity_condition(mats, law, mesh.L).holds());
  SystemState prev = make_state(mesh, 0.0);
  prev.alpha2 = {1.0, 1.0, 1.0};
  prev.alpha1 = {1.0, 0.1, 1.0};  // 2 u + 1 alpha free coordinates
  SolverOptions opts;
  opts.tol_grad = 1e-11;
  const IncrementResult inc = solve_increment(mesh, prev, 0.6, law, mats, opts);
  const OracleResult oracle =
      brute_force_increment_oracle(mesh, prev, 0.6, law, mats, 4000, 3);
  CHECK(std::abs(inc.energy - oracle.energy) <= 1e-6);
}

TEST_CASE("history study: monotone ramp has identically zero gap") {
  EvolutionSetup s = notched_setup(12, 1);
  const std::vector<HistoryGapSummary> sums =
      history_equivalence_study(s, {5, 10, 20});
  for (const HistoryGapSummary& sum : sums) {
    CHECK(sum.preconditions_met);
    CHECK(sum.max_gap == 0.0);
  }
  // the coarse history paths approach the finest one
  CHECK(sums[0].cross_level_gap >= sums[1].cross_level_gap - 1e-12);
  CHECK(sums[1].cross_level_gap <= sums[0].cross_level_gap + 1e-12);
}

TEST_CASE("theory bounds are finite and positive") {
  EvolutionSetup s = notched_setup(12, 4);
  const TheoryBounds tb = theory_bounds(s);
  CHECK(tb.energy_bound > 0.0);
  CHECK(std::isfinite(tb.energy_bound));
  CHECK(tb.u_h1_bound > 0.0);
  CHECK(tb.alpha_h1_bound > 0.0);
  CHECK(tb.holder_constant > 0.0);
  CHECK(tb.eps == doctest::Approx(96.0 / std::sqrt(2.0)));
}
