#include "hylam/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hylam {

EnergyBalanceReport energy_balance_residual(const EvolutionTrace& trace) {
  EnergyBalanceReport rep;
  if (trace.rows.empty()) return rep;
  const double e0 = trace.rows.front().energy_total;
  rep.max_one_sided_excess = -kInf;
  for (const TraceRow& row : trace.rows) {
    const double r = std::abs(row.energy_total - e0 - row.work);
    rep.per_step.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
    rep.max_one_sided_excess =
        std::max(rep.max_one_sided_excess,
                 row.energy_total - e0 - row.work_rect - row.remainder_rect);
  }
  return rep;
}

double stress_constancy_residual(const Mesh& mesh, const SystemState& state,
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

std::vector<KktTriple> kkt_residuals(const Mesh& mesh,
                                     const EvolutionTrace& trace,
                                     const CohesiveLaw& law,
                                     const LayerMaterials& materials) {
  if (trace.states.size() != trace.rows.size())
    throw std::invalid_argument("kkt_residuals needs a trace with all states");
  std::vector<KktTriple> out;
  for (size_t k = 1; k < trace.states.size(); ++k) {
    const SystemState& prev = trace.states[k - 1];
    const SystemState& cur = trace.states[k];
    const Gradient g =
        total_gradient(mesh, cur.u1, cur.u2, cur.alpha1, cur.alpha2,
                       prev.delta_h, law, materials);
    KktTriple t;
    t.min_dalpha = kInf;
    for (int layer = 0; layer < 2; ++layer) {
      const NodalField& a = cur.alpha(layer);
      const NodalField& a0 = prev.alpha(layer);
      const NodalField& ga = layer == 0 ? g.alpha1 : g.alpha2;
      for (int j = 0; j <= mesh.n_elems; ++j) {
        const double da = a[j] - a0[j];
        t.min_dalpha = std::min(t.min_dalpha, da);
        if (a[j] < 1.0) {
          t.grad_violation = std::max(t.grad_violation, -ga[j]);
          t.complementarity =
              std::max(t.complementarity, std::abs(ga[j] * da));
        }
      }
    }
    if (!std::isfinite(t.min_dalpha)) t.min_dalpha = 0.0;
    out.push_back(t);
  }
  return out;
}

namespace {

double pair_h1_norm(const Mesh& mesh, const NodalField& v1,
                    const NodalField& v2) {
  return std::sqrt(h1_seminorm_sq(mesh, v1) + l2_norm_sq(mesh, v1) +
                   h1_seminorm_sq(mesh, v2) + l2_norm_sq(mesh, v2));
}

double stability_excess(const Mesh& mesh, const SystemState& state,
                        const StressField& sf, const CohesiveLaw& law,
                        const NodalField& v1, const NodalField& v2,
                        double cutoff) {
  double lhs = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double s1 = (v1[e + 1] - v1[e]) / mesh.h;
    const double s2 = (v2[e + 1] - v2[e]) / mesh.h;
    lhs += mesh.h * (sf.sigma1[e] * s1 + sf.sigma2[e] * s2);
  }
  double rhs = 0.0;
  for (int j = 0; j <= mesh.n_elems; ++j) {
    const double tw = node_weight(mesh, j);
    const double d = state.u1[j] - state.u2[j];
    const double ad = std::abs(d);
    const double gam = state.gamma[j];
    if (ad > cutoff) {
      const double slope = law.dphi_dy(std::min(ad, gam), gam);
      lhs += tw * slope * (d > 0.0 ? 1.0 : -1.0) * (v1[j] - v2[j]);
    }
    if (gam <= cutoff) rhs += tw * std::abs(v1[j] - v2[j]);
  }
  rhs *= law.psi_prime0();
  return std::abs(lhs) - rhs;
}

}  // namespace

double stability_residual(const Mesh& mesh, const SystemState& state,
                          const CohesiveLaw& law,
                          const LayerMaterials& materials, int n_test_fields,
                          std::uint64_t seed) {
  const StressField sf = stress_field(mesh, state, materials);
  const double db = law.delta_bar();
  const double cutoff =
      kZeroHistoryCutoff * (std::isfinite(db) ? std::max(db, 1.0) : 1.0);
  const int nn = mesh.n_nodes();

  double worst = -kInf;
  auto probe = [&](const NodalField& v1, const NodalField& v2) {
    const double norm = pair_h1_norm(mesh, v1, v2);
    if (norm <= 0.0) return;
    NodalField w1 = v1, w2 = v2;
    for (int j = 0; j < nn; ++j) {
      w1[j] /= norm;
      w2[j] /= norm;
    }
    worst = std::max(worst, stability_excess(mesh, state, sf, law, w1, w2,
                                             cutoff));
  };

  // deterministic hat basis localizes violations
  for (int j = 1; j < mesh.n_elems; ++j) {
    NodalField e1(nn, 0.0), e2(nn, 0.0);
    e1[j] = 1.0;
    probe(e1, e2);
    probe(e2, e1);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int f = 0; f < n_test_fields; ++f) {
    NodalField v1(nn, 0.0), v2(nn, 0.0);
    for (int j = 1; j < mesh.n_elems; ++j) {
      v1[j] = unit(rng);
      v2[j] = unit(rng);
    }
    probe(v1, v2);
  }
  return worst;
}

OracleResult brute_force_increment_oracle(const Mesh& mesh,
                                          const SystemState& prev,
                                          double boundary_value,
                                          const CohesiveLaw& law,
                                          const LayerMaterials& materials,
                                          int n_starts, std::uint64_t seed) {
  // Free coordinates: interior displacements of both layers and every
  // damage value not pinned at 1.
  struct Coord {
    int field;  // 0 u1, 1 u2, 2 alpha1, 3 alpha2
    int node;
    double lo, hi;
  };
  const double pad = 0.75 * (1.0 + std::abs(boundary_value));
  const double ulo = std::min(0.0, boundary_value) - pad;
  const double uhi = std::max(0.0, boundary_value) + pad;

  std::vector<Coord> coords;
  for (int j = 1; j < mesh.n_elems; ++j) {
    coords.push_back({0, j, ulo, uhi});
    coords.push_back({1, j, ulo, uhi});
  }
  for (int j = 0; j <= mesh.n_elems; ++j) {
    if (prev.alpha1[j] < 1.0) coords.push_back({2, j, prev.alpha1[j], 1.0});
    if (prev.alpha2[j] < 1.0) coords.push_back({3, j, prev.alpha2[j], 1.0});
  }
  if (coords.size() > 8)
    throw std::invalid_argument(
        "oracle limited to 8 free coordinates; problem too large");

  SystemState base = prev;
  const double shift = boundary_value - prev.u1.back();
  for (int j = 0; j <= mesh.n_elems; ++j) {
    const double lift = shift * mesh.nodes[j] / mesh.L;
    base.u1[j] += lift;
    base.u2[j] += lift;
  }
  base.u1.back() = boundary_value;
  base.u2.back() = boundary_value;

  auto field_of = [](SystemState& s, int f) -> NodalField& {
    switch (f) {
      case 0: return s.u1;
      case 1: return s.u2;
      case 2: return s.alpha1;
      default: return s.alpha2;
    }
  };
  auto energy_of = [&](const SystemState& s) {
    return incremental_energy(mesh, s.u1, s.u2, s.alpha1, s.alpha2,
                              prev.delta_h, law, materials);
  };

  OracleResult out;
  out.free_coordinates = int(coords.size());
  out.starts = n_starts;

  if (coords.empty()) {
    out.state = base;
    const NodalField d = slip(out.state);
    for (int j = 0; j <= mesh.n_elems; ++j) {
      out.state.delta_h[j] = std::max(prev.delta_h[j], d[j]);
      out.state.gamma[j] = out.state.delta_h[j];
    }
    out.energy = energy_of(out.state);
    return out;
  }

  // golden-section line search on one coordinate
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  auto line_min = [&](SystemState& s, const Coord& c, int iters) {
    NodalField& f = field_of(s, c.field);
    double a = c.lo, b = c.hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    f[c.node] = x1;
    double f1 = energy_of(s);
    f[c.node] = x2;
    double f2 = energy_of(s);
    for (int i = 0; i < iters; ++i) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f[c.node] = x1;
        f1 = energy_of(s);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f[c.node] = x2;
        f2 = energy_of(s);
      }
    }
    f[c.node] = f1 <= f2 ? x1 : x2;
    return std::min(f1, f2);
  };
  auto descend = [&](SystemState& s, int cycles, int iters) {
    double e = energy_of(s);
    for (int c = 0; c < cycles; ++c) {
      for (const Coord& coord : coords) e = line_min(s, coord, iters);
    }
    return e;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // the warm start joins the candidate pool
  SystemState best = base;
  double best_e = descend(best, 12, 60);

  struct Candidate {
    double energy;
    SystemState state;
  };
  std::vector<Candidate> top;

  for (int s = 0; s < n_starts; ++s) {
    SystemState trial = base;
    for (const Coord& c : coords)
      field_of(trial, c.field)[c.node] = c.lo + (c.hi - c.lo) * unif(rng);
    const double e = descend(trial, 3, 28);
    if (top.size() < 16) {
      top.push_back({e, trial});
      std::stable_sort(top.begin(), top.end(),
                       [](const Candidate& a, const Candidate& b) {
                         return a.energy < b.energy;
                       });
    } else if (e < top.back().energy) {
      top.back() = {e, trial};
      std::stable_sort(top.begin(), top.end(),
                       [](const Candidate& a, const Candidate& b) {
                         return a.energy < b.energy;
                       });
    }
  }
  for (Candidate& c : top) {
    const double e = descend(c.state, 12, 60);
    if (e < best_e) {
      best_e = e;
      best = c.state;
    }
  }

  out.state = best;
  const NodalField d = slip(out.state);
  for (int j = 0; j <= mesh.n_elems; ++j) {
    out.state.delta_h[j] = std::max(prev.delta_h[j], d[j]);
    out.state.gamma[j] = out.state.delta_h[j];
  }
  out.state.t = prev.t;
  out.energy = best_e;
  return out;
}

std::vector<HistoryGapSummary> history_equivalence_study(
    const EvolutionSetup& setup, const std::vector<int>& partitions) {
  bool pre_ok = true;
  {
    const AssumptionReport rep = check_law(setup.law, 64, 1e-9);
    const AssumptionCheck* mono = rep.find("strict_history_monotonicity");
    if (!mono || mono->status != CheckStatus::Pass) pre_ok = false;
    const ConvexityBudget budget =
        check_regularity_condition(setup.materials, setup.law, setup.mesh.L);
    if (!budget.holds()) pre_ok = false;
  }

  std::vector<EvolutionTrace> traces;
  for (int n : partitions) {
    EvolutionSetup s = setup;
    s.partition = TimePartition::uniform(n, setup.load.T());
    s.keep_all_states = true;
    traces.push_back(run_evolution(s));
  }

  const double db = setup.law.delta_bar();
  auto trunc = [db](double v) { return std::min(v, db); };

  const EvolutionTrace& finest = traces.back();
  std::vector<HistoryGapSummary> out;
  for (size_t i = 0; i < traces.size(); ++i) {
    HistoryGapSummary sum;
    sum.n_steps = partitions[i];
    sum.preconditions_met = pre_ok;
    for (const TraceRow& row : traces[i].rows)
      sum.max_gap = std::max(sum.max_gap, row.max_gamma_minus_dh);
    // compare the history path against the finest run at shared times
    for (size_t k = 0; k < traces[i].rows.size(); ++k) {
      const double t = traces[i].rows[k].t;
      for (size_t kf = 0; kf < finest.rows.size(); ++kf) {
        if (std::abs(finest.rows[kf].t - t) > 1e-12 * (1.0 + t)) continue;
        const SystemState& a = traces[i].states[k];
        const SystemState& b = finest.states[kf];
        for (size_t j = 0; j < a.delta_h.size(); ++j)
          sum.cross_level_gap =
              std::max(sum.cross_level_gap,
                       std::abs(trunc(a.delta_h[j]) - trunc(b.delta_h[j])));
        break;
      }
    }
    out.push_back(sum);
  }
  return out;
}

TheoryBounds theory_bounds(const EvolutionSetup& setup) {
  TheoryBounds tb;
  const Mesh& mesh = setup.mesh;
  const double L = mesh.L;
  double umax = 0.0;
  for (double t : setup.load.breakpoints())
    umax = std::max(umax, std::abs(setup.load.value(t)));

  double phi0_sup = 0.0;
  const double span = setup.law.probe_span();
  for (int j = 0; j <= 256; ++j)
    phi0_sup = std::max(phi0_sup, setup.law.phi(0.0, span * j / 256));

  tb.eps = std::min(setup.materials.E1.eps, setup.materials.E2.eps);
  tb.energy_bound =
      0.5 * (setup.materials.E1.E(1.0) + setup.materials.E2.E(1.0)) * umax *
          umax / L +
      L * (setup.materials.w1.w(1.0) + setup.materials.w2.w(1.0)) +
      L * phi0_sup;
  const double pi = std::numbers::pi;
  tb.u_h1_bound = std::sqrt(1.0 + 4.0 * L * L / (pi * pi)) *
                  std::sqrt(2.0 * tb.energy_bound / tb.eps);
  tb.alpha_h1_bound = std::sqrt(2.0 * L + 2.0 * tb.energy_bound);
  tb.holder_constant =
      std::sqrt(2.0) * std::sqrt(2.0 * tb.energy_bound / tb.eps);
  return tb;
}

double state_u_h1_norm(const Mesh& mesh, const SystemState& state) {
  return pair_h1_norm(mesh, state.u1, state.u2);
}

double state_alpha_h1_norm(const Mesh& mesh, const SystemState& state) {
  return pair_h1_norm(mesh, state.alpha1, state.alpha2);
}

}  // namespace hylam
