#include "hylam/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace hylam {

namespace {

// Exact integral of |affine| over [a, b] given endpoint values.
double abs_affine_integral(double a, double b, double fa, double fb) {
  if (b <= a) return 0.0;
  if (fa * fb >= 0.0) return 0.5 * (std::abs(fa) + std::abs(fb)) * (b - a);
  const double x0 = a + (b - a) * fa / (fa - fb);
  return 0.5 * (std::abs(fa) * (x0 - a) + std::abs(fb) * (b - x0));
}

}  // namespace

LoadProgram LoadProgram::linear_ramp(double rate, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("final time must be positive");
  LoadProgram p;
  p.times_ = {0.0, T};
  p.values_ = {0.0, rate * T};
  return p;
}

LoadProgram LoadProgram::triangle(double peak_time, double peak_value,
                                  double end_value, double T) {
  if (!(T > 0.0) || !(peak_time > 0.0) || !(peak_time < T))
    throw std::invalid_argument("triangle program needs 0 < peak_time < T");
  LoadProgram p;
  p.times_ = {0.0, peak_time, T};
  p.values_ = {0.0, peak_value, end_value};
  return p;
}

LoadProgram LoadProgram::tabulated(std::vector<double> times,
                                   std::vector<double> values) {
  if (times.size() < 2 || times.size() != values.size())
    throw std::invalid_argument("tabulated program needs matching samples");
  if (times.front() != 0.0)
    throw std::invalid_argument("tabulated program must start at t = 0");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("tabulated times must increase");
  LoadProgram p;
  p.times_ = std::move(times);
  p.values_ = std::move(values);
  return p;
}

double LoadProgram::value(double t) const {
  t = std::clamp(t, times_.front(), times_.back());
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const size_t i = std::min(times_.size() - 1,
                            size_t(std::max<std::ptrdiff_t>(
                                1, it - times_.begin())));
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double LoadProgram::rate(double t) const {
  t = std::clamp(t, times_.front(), times_.back());
  size_t i = 1;
  while (i + 1 < times_.size() && t >= times_[i]) ++i;
  return (values_[i] - values_[i - 1]) / (times_[i] - times_[i - 1]);
}

double LoadProgram::total_variation(double s, double t) const {
  if (t <= s) return 0.0;
  double tv = 0.0;
  double cursor = s, vcur = value(s);
  for (size_t i = 1; i < times_.size(); ++i) {
    const double seg_end = std::min(times_[i], t);
    if (seg_end <= cursor) continue;
    const double vend = value(seg_end);
    tv += std::abs(vend - vcur);
    cursor = seg_end;
    vcur = vend;
    if (cursor >= t) break;
  }
  return tv;
}

double LoadProgram::weighted_abs_integral(double s, double t, double c) const {
  if (t <= s) return 0.0;
  double sum = 0.0;
  double cursor = s;
  for (size_t i = 1; i < times_.size() && cursor < t; ++i) {
    const double seg_end = std::min(times_[i], t);
    if (seg_end <= cursor) continue;
    const double r = (values_[i] - values_[i - 1]) / (times_[i] - times_[i - 1]);
    sum += std::abs(r) * abs_affine_integral(cursor, seg_end, value(cursor) - c,
                                             value(seg_end) - c);
    cursor = seg_end;
  }
  return sum;
}

TimePartition TimePartition::uniform(int n_steps, double T) {
  if (n_steps < 1 || !(T > 0.0))
    throw std::invalid_argument("partition needs n >= 1 and T > 0");
  TimePartition p;
  p.times.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) p.times[k] = T * k / n_steps;
  p.times.back() = T;
  return p;
}

TimePartition TimePartition::from_times(std::vector<double> times) {
  if (times.size() < 2 || times.front() != 0.0)
    throw std::invalid_argument("partition must start at 0");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("partition times must increase");
  TimePartition p;
  p.times = std::move(times);
  return p;
}

namespace {

double stress_deviation(const Mesh& mesh, const SystemState& state,
                        const LayerMaterials& materials) {
  const StressField f = stress_field(mesh, state, materials);
  double mean = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e) mean += f.sigma1[e] + f.sigma2[e];
  mean /= mesh.n_elems;
  double dev = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e)
    dev = std::max(dev, std::abs(f.sigma1[e] + f.sigma2[e] - mean));
  return dev;
}

struct KktEntries {
  double min_dalpha = 0.0;
  double grad_violation = 0.0;
  double complementarity = 0.0;
};

KktEntries kkt_entries(const Mesh& mesh, const SystemState& state,
                       const SystemState& prev, const CohesiveLaw& law,
                       const LayerMaterials& materials) {
  const Gradient g =
      total_gradient(mesh, state.u1, state.u2, state.alpha1, state.alpha2,
                     prev.delta_h, law, materials);
  KktEntries out;
  out.min_dalpha = kInf;
  for (int layer = 0; layer < 2; ++layer) {
    const NodalField& a = state.alpha(layer);
    const NodalField& a0 = prev.alpha(layer);
    const NodalField& ga = layer == 0 ? g.alpha1 : g.alpha2;
    for (int j = 0; j <= mesh.n_elems; ++j) {
      const double da = a[j] - a0[j];
      out.min_dalpha = std::min(out.min_dalpha, da);
      if (a[j] < 1.0) {
        out.grad_violation = std::max(out.grad_violation, -ga[j]);
        out.complementarity =
            std::max(out.complementarity, std::abs(ga[j] * da));
      }
    }
  }
  if (!std::isfinite(out.min_dalpha)) out.min_dalpha = 0.0;
  return out;
}

double truncated_history_gap(const SystemState& state, double delta_bar) {
  double gap = 0.0;
  for (size_t j = 0; j < state.gamma.size(); ++j)
    gap = std::max(gap, std::abs(std::min(state.gamma[j], delta_bar) -
                                 std::min(state.delta_h[j], delta_bar)));
  return gap;
}

TraceRow ledger_row(int k, double t, const EvolutionSetup& setup,
                    const SystemState& state, const SystemState& prev,
                    double initial_total, const TraceRow& prev_row,
                    const IncrementResult* inc, double warm_energy) {
  const Mesh& mesh = setup.mesh;
  TraceRow row;
  row.k = k;
  row.t = t;
  row.ubar = setup.load.value(t);
  row.elastic = elastic_energy(mesh, state, setup.materials);
  row.damage = damage_energy(mesh, state, setup.materials);
  row.cohesive = cohesive_energy(mesh, slip(state), state.gamma, setup.law);
  row.sum_stress = sum_stress_integral(mesh, state, setup.materials);
  row.modulus_int = modulus_integral(mesh, state, setup.materials);
  row.energy_total = row.elastic + row.damage + row.cohesive;
  row.warm_energy = warm_energy;

  if (k == 0) {
    row.work = row.work_rect = row.remainder_rect = 0.0;
  } else {
    const double du = row.ubar - prev_row.ubar;
    const double L = mesh.L;
    row.work = prev_row.work +
               du / L * 0.5 * (prev_row.sum_stress + row.sum_stress);
    row.work_rect = prev_row.work_rect + du / L * prev_row.sum_stress;
    row.remainder_rect = prev_row.remainder_rect +
                         du * du / (2.0 * L * L) * prev_row.modulus_int;
  }
  row.eb_residual = std::abs(row.energy_total - initial_total - row.work);
  row.stress_residual = stress_deviation(mesh, state, setup.materials);
  const KktEntries kkt = kkt_entries(mesh, state, prev, setup.law,
                                     setup.materials);
  row.kkt_min_dalpha = kkt.min_dalpha;
  row.kkt_grad_violation = kkt.grad_violation;
  row.kkt_complementarity = kkt.complementarity;
  row.max_gamma_minus_dh = truncated_history_gap(state, setup.law.delta_bar());
  if (inc) {
    row.solver_iters = inc->outer_iters;
    row.converged = inc->converged;
    row.grad_residual = inc->grad_residual;
  }
  return row;
}

}  // namespace

InitReport initialize(const EvolutionSetup& setup) {
  const Mesh& mesh = setup.mesh;
  const double u0 = setup.load.value(0.0);
  InitReport rep;
  rep.state = setup.initial;
  rep.state.t = 0.0;
  const NodalField d = slip(rep.state);
  rep.state.delta_h = d;
  rep.state.gamma = d;
  validate_state(mesh, rep.state, u0);

  const double e0 = total_energy(mesh, rep.state, setup.law, setup.materials);
  const IncrementResult probe =
      solve_increment(mesh, rep.state, u0, setup.law, setup.materials,
                      setup.solver);
  rep.energy_drop = e0 - probe.energy;
  rep.stable = rep.energy_drop <= 1e-9 * (1.0 + std::abs(e0));
  return rep;
}

EvolutionTrace run_evolution(const EvolutionSetup& setup) {
  const InitReport init = initialize(setup);
  const Mesh& mesh = setup.mesh;
  EvolutionTrace trace;
  trace.L = mesh.L;
  trace.n_elems = mesh.n_elems;

  SystemState state = init.state;
  const double initial_total =
      total_energy(mesh, state, setup.law, setup.materials);

  auto want_snapshot = [&](int k) {
    return std::find(setup.snapshot_steps.begin(), setup.snapshot_steps.end(),
                     k) != setup.snapshot_steps.end();
  };

  TraceRow row0 = ledger_row(0, setup.partition.times[0], setup, state, state,
                             initial_total, TraceRow{}, nullptr,
                             initial_total);
  trace.rows.push_back(row0);
  if (want_snapshot(0)) trace.snapshots.emplace(0, state);
  if (setup.keep_all_states) trace.states.push_back(state);

  for (int k = 1; k <= setup.partition.n_steps(); ++k) {
    const double t = setup.partition.times[k];
    const double ubar = setup.load.value(t);

    // warm-start competitor energy (affinely shifted previous state)
    SystemState shifted = state;
    const double dshift = ubar - state.u1.back();
    for (int j = 0; j <= mesh.n_elems; ++j) {
      const double lift = dshift * mesh.nodes[j] / mesh.L;
      shifted.u1[j] += lift;
      shifted.u2[j] += lift;
    }
    const double warm =
        incremental_energy(mesh, shifted.u1, shifted.u2, shifted.alpha1,
                           shifted.alpha2, state.delta_h, setup.law,
                           setup.materials);

    IncrementResult inc = solve_increment(mesh, state, ubar, setup.law,
                                          setup.materials, setup.solver);
    inc.state.t = t;
    TraceRow row = ledger_row(k, t, setup, inc.state, state, initial_total,
                              trace.rows.back(), &inc, warm);
    trace.rows.push_back(row);
    state = std::move(inc.state);
    if (want_snapshot(k)) trace.snapshots.emplace(k, state);
    if (setup.keep_all_states) trace.states.push_back(state);
  }
  return trace;
}

double measured_remainder(const EvolutionTrace& trace,
                          const LoadProgram& load) {
  double first = 0.0, second = 0.0;
  const double L = trace.L;
  for (size_t k = 1; k < trace.rows.size(); ++k) {
    const TraceRow& lo = trace.rows[k - 1];
    const TraceRow& hi = trace.rows[k];
    first += lo.modulus_int / (L * L) *
             load.weighted_abs_integral(lo.t, hi.t, lo.ubar);
    second = std::max(second, std::abs(lo.sum_stress) / L *
                                  load.total_variation(lo.t, hi.t));
  }
  return first + second;
}

double load_lipschitz_modulus(const EvolutionTrace& trace,
                              const LoadProgram& load, const Mesh& mesh) {
  if (trace.states.size() < 2) return 0.0;
  const size_t n = trace.states.size();
  // shifted displacement: subtract the affine lift of the boundary value
  auto state_dist = [&](const SystemState& a, const SystemState& b) {
    NodalField da1(mesh.n_nodes()), da2(mesh.n_nodes());
    NodalField dv1(mesh.n_nodes()), dv2(mesh.n_nodes());
    const double ua = a.u1.back(), ub = b.u1.back();
    for (int j = 0; j <= mesh.n_elems; ++j) {
      const double lift = (ua - ub) * mesh.nodes[j] / mesh.L;
      dv1[j] = a.u1[j] - b.u1[j] - lift;
      dv2[j] = a.u2[j] - b.u2[j] - lift;
      da1[j] = a.alpha1[j] - b.alpha1[j];
      da2[j] = a.alpha2[j] - b.alpha2[j];
    }
    const double alpha_sq = h1_seminorm_sq(mesh, da1) + l2_norm_sq(mesh, da1) +
                            h1_seminorm_sq(mesh, da2) + l2_norm_sq(mesh, da2);
    const double v_sq = h1_seminorm_sq(mesh, dv1) + h1_seminorm_sq(mesh, dv2);
    return std::sqrt(alpha_sq + v_sq);
  };
  double modulus = 0.0;
  for (size_t j = 0; j + 1 < n; ++j)
    for (size_t k = j + 1; k < n; ++k) {
      const double tv =
          load.total_variation(trace.rows[j].t, trace.rows[k].t);
      const double dist = state_dist(trace.states[k], trace.states[j]);
      if (tv <= 1e-14) continue;
      modulus = std::max(modulus, dist / tv);
    }
  return modulus;
}

std::vector<RefineSummary> refine_study(const EvolutionSetup& setup,
                                        const std::vector<int>& partitions) {
  std::vector<RefineSummary> out;
  for (int n : partitions) {
    EvolutionSetup s = setup;
    s.partition = TimePartition::uniform(n, setup.load.T());
    s.keep_all_states = true;
    const EvolutionTrace trace = run_evolution(s);
    RefineSummary sum;
    sum.n_steps = n;
    for (size_t k = 1; k < trace.rows.size(); ++k) {
      sum.max_eb_residual =
          std::max(sum.max_eb_residual, trace.rows[k].eb_residual);
      sum.max_stress_residual =
          std::max(sum.max_stress_residual, trace.rows[k].stress_residual);
      sum.all_converged = sum.all_converged && trace.rows[k].converged;
    }
    sum.remainder = measured_remainder(trace, s.load);
    sum.final_work = trace.rows.back().work;
    sum.final_energy = trace.rows.back().energy_total;
    sum.load_lipschitz_modulus = load_lipschitz_modulus(trace, s.load, s.mesh);
    out.push_back(sum);
  }
  return out;
}

}  // namespace hylam
