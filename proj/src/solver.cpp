#include "hylam/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hylam {

void SolverOptions::validate() const {
  if (!(tol_energy > 0.0) || !(tol_grad > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (!(step_shrink > 0.0) || !(step_shrink < 1.0))
    throw std::invalid_argument("step shrink factor must lie in (0,1)");
  if (!(step_init > 0.0) || !(step_decrease > 0.0))
    throw std::invalid_argument("step parameters must be positive");
  if (max_outer_iters < 1 || max_inner_iters < 1)
    throw std::invalid_argument("iteration budgets must be positive");
  if (n_restarts < 0 || restart_amplitude < 0.0)
    throw std::invalid_argument("restart settings must be nonnegative");
}

namespace {

struct Pair {
  NodalField a, b;

  void axpy(double s, const Pair& o) {
    for (size_t i = 0; i < a.size(); ++i) {
      a[i] += s * o.a[i];
      b[i] += s * o.b[i];
    }
  }
};

double dist2(const Pair& x, const Pair& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i) {
    const double da = x.a[i] - y.a[i], db = x.b[i] - y.b[i];
    s += da * da + db * db;
  }
  return s;
}

double inner(const Pair& x, const Pair& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i)
    s += x.a[i] * y.a[i] + x.b[i] * y.b[i];
  return s;
}

// ---------------------------------------------------------------------------
// displacement block

struct UBlock {
  const Mesh& mesh;
  const NodalField& alpha1;
  const NodalField& alpha2;
  const CohesiveLaw& law;
  const LayerMaterials& materials;
  SlipProxData prox;

  double elastic(const Pair& u) const {
    double sum = 0.0;
    for (int e = 0; e < mesh.n_elems; ++e) {
      const double s1 = (u.a[e + 1] - u.a[e]) / mesh.h;
      const double s2 = (u.b[e + 1] - u.b[e]) / mesh.h;
      const double a1 = 0.5 * (alpha1[e] + alpha1[e + 1]);
      const double a2 = 0.5 * (alpha2[e] + alpha2[e + 1]);
      sum += 0.5 * mesh.h *
             (materials.E1.E(a1) * s1 * s1 + materials.E2.E(a2) * s2 * s2);
    }
    return sum;
  }

  // Cohesive node term and the hinge weights it carries.
  double slip_term(int j, double d) const {
    const double ad = std::abs(d);
    return node_weight(mesh, j) *
           law.phi(ad, std::max(prox.floor_[j], ad));
  }

  double hinge(int j, double d) const {
    const double ad = std::abs(d);
    return prox.kappa0[j] * ad +
           prox.kappa1[j] * std::max(ad - prox.floor_[j], 0.0);
  }

  double full(const Pair& u) const {
    double sum = elastic(u);
    for (int j = 0; j <= mesh.n_elems; ++j) sum += slip_term(j, u.a[j] - u.b[j]);
    return sum;
  }

  double smooth(const Pair& u) const {
    double sum = elastic(u);
    for (int j = 0; j <= mesh.n_elems; ++j) {
      const double d = u.a[j] - u.b[j];
      sum += slip_term(j, d) - hinge(j, d);
    }
    return sum;
  }

  // Trapezoid-weighted slope of the smooth slip remainder at slip d.
  double smooth_slope(int j, double d) const {
    if (d == 0.0) return 0.0;
    const double ad = std::abs(d), s = d > 0.0 ? 1.0 : -1.0;
    const double gf = prox.floor_[j];
    const double tw = node_weight(mesh, j);
    double raw, kap;
    if (ad >= gf) {
      raw = tw * law.psi_prime(ad);
      kap = prox.kappa0[j] + prox.kappa1[j];
    } else {
      raw = tw * law.dphi_dy(ad, gf);
      kap = prox.kappa0[j];
    }
    return (raw - kap) * s;
  }

  void smooth_grad(const Pair& u, Pair& g) const {
    std::fill(g.a.begin(), g.a.end(), 0.0);
    std::fill(g.b.begin(), g.b.end(), 0.0);
    for (int e = 0; e < mesh.n_elems; ++e) {
      const double s1 = (u.a[e + 1] - u.a[e]) / mesh.h;
      const double s2 = (u.b[e + 1] - u.b[e]) / mesh.h;
      const double a1 = 0.5 * (alpha1[e] + alpha1[e + 1]);
      const double a2 = 0.5 * (alpha2[e] + alpha2[e + 1]);
      const double sig1 = materials.E1.E(a1) * s1;
      const double sig2 = materials.E2.E(a2) * s2;
      g.a[e] -= sig1;
      g.a[e + 1] += sig1;
      g.b[e] -= sig2;
      g.b[e + 1] += sig2;
    }
    for (int j = 0; j <= mesh.n_elems; ++j) {
      const double sl = smooth_slope(j, u.a[j] - u.b[j]);
      g.a[j] += sl;
      g.b[j] -= sl;
    }
    // clamped ends carry no descent direction
    g.a[0] = g.b[0] = 0.0;
    g.a[mesh.n_elems] = g.b[mesh.n_elems] = 0.0;
  }

  // prox of tau * (kappa0 |d| + kappa1 max(|d| - g, 0)) in the slip
  // coordinate; the mean coordinate passes through.
  void prox_step(const Pair& trial, double tau, Pair& out) const {
    const int nn = mesh.n_nodes();
    for (int j = 0; j < nn; ++j) {
      const double a1 = trial.a[j], a2 = trial.b[j];
      const double k0 = 2.0 * tau * prox.kappa0[j];
      const double k1 = 2.0 * tau * prox.kappa1[j];
      if (k0 == 0.0 && k1 == 0.0) {
        out.a[j] = a1;
        out.b[j] = a2;
        continue;
      }
      const double m = 0.5 * (a1 + a2);
      const double d = a1 - a2;
      const double g = prox.floor_[j];
      const double ad = std::abs(d), s = d >= 0.0 ? 1.0 : -1.0;
      double x;
      if (ad <= k0) {
        x = 0.0;
      } else {
        x = ad - k0;
        if (g > 0.0 && x > g) {
          const double x2 = ad - k0 - k1;
          x = x2 >= g ? x2 : g;
        }
      }
      out.a[j] = m + 0.5 * s * x;
      out.b[j] = m - 0.5 * s * x;
    }
    // boundary nodes are pinned
    out.a[0] = trial.a[0];
    out.b[0] = trial.b[0];
    out.a[mesh.n_elems] = trial.a[mesh.n_elems];
    out.b[mesh.n_elems] = trial.b[mesh.n_elems];
  }

  // Componentwise optimality violation: the mean gradient must vanish and
  // the slip gradient must sit inside the hinge subdifferential.
  double violation(const Pair& u, Pair& scratch) const {
    smooth_grad(u, scratch);
    double worst = 0.0;
    for (int j = 1; j < mesh.n_elems; ++j) {
      const double g1 = scratch.a[j], g2 = scratch.b[j];
      const double d = u.a[j] - u.b[j];
      const double vm = 0.5 * std::abs(g1 + g2);
      const double xi = 0.5 * (g2 - g1);  // required hinge multiplier
      const double gf = prox.floor_[j];
      const double k0 = prox.kappa0[j], k1 = prox.kappa1[j];
      double lo, hi;
      if (d == 0.0) {
        lo = -k0;
        hi = k0;
      } else {
        const double ad = std::abs(d);
        if (gf > 0.0 && ad == gf) {
          lo = k0;
          hi = k0 + k1;
        } else if (gf > 0.0 && ad > gf) {
          lo = hi = k0 + k1;
        } else {
          lo = hi = k0;
        }
        if (d < 0.0) {
          const double t = lo;
          lo = -hi;
          hi = -t;
        }
      }
      const double vd = xi < lo ? lo - xi : (xi > hi ? xi - hi : 0.0);
      worst = std::max(worst, std::max(vm, vd));
    }
    return worst;
  }
};

// ---------------------------------------------------------------------------
// damage block

struct AlphaBlock {
  const Mesh& mesh;
  const NodalField& u1;
  const NodalField& u2;
  const NodalField& lower1;
  const NodalField& lower2;
  const LayerMaterials& materials;

  double energy(const Pair& al) const {
    double sum = 0.0;
    for (int e = 0; e < mesh.n_elems; ++e) {
      const double s1 = (u1[e + 1] - u1[e]) / mesh.h;
      const double s2 = (u2[e + 1] - u2[e]) / mesh.h;
      const double a1 = 0.5 * (al.a[e] + al.a[e + 1]);
      const double a2 = 0.5 * (al.b[e] + al.b[e + 1]);
      sum += 0.5 * mesh.h *
             (materials.E1.E(a1) * s1 * s1 + materials.E2.E(a2) * s2 * s2);
      const double g1 = (al.a[e + 1] - al.a[e]) / mesh.h;
      const double g2 = (al.b[e + 1] - al.b[e]) / mesh.h;
      sum += 0.5 * mesh.h * (g1 * g1 + g2 * g2);
    }
    for (int j = 0; j <= mesh.n_elems; ++j)
      sum += node_weight(mesh, j) *
             (materials.w1.w(al.a[j]) + materials.w2.w(al.b[j]));
    return sum;
  }

  void grad(const Pair& al, Pair& g) const {
    std::fill(g.a.begin(), g.a.end(), 0.0);
    std::fill(g.b.begin(), g.b.end(), 0.0);
    for (int e = 0; e < mesh.n_elems; ++e) {
      const double s1 = (u1[e + 1] - u1[e]) / mesh.h;
      const double s2 = (u2[e + 1] - u2[e]) / mesh.h;
      const double a1 = 0.5 * (al.a[e] + al.a[e + 1]);
      const double a2 = 0.5 * (al.b[e] + al.b[e + 1]);
      const double c1 = 0.25 * mesh.h * materials.E1.E_prime(a1) * s1 * s1;
      const double c2 = 0.25 * mesh.h * materials.E2.E_prime(a2) * s2 * s2;
      g.a[e] += c1;
      g.a[e + 1] += c1;
      g.b[e] += c2;
      g.b[e + 1] += c2;
      const double q1 = (al.a[e + 1] - al.a[e]) / mesh.h;
      const double q2 = (al.b[e + 1] - al.b[e]) / mesh.h;
      g.a[e] -= q1;
      g.a[e + 1] += q1;
      g.b[e] -= q2;
      g.b[e + 1] += q2;
    }
    for (int j = 0; j <= mesh.n_elems; ++j) {
      const double tw = node_weight(mesh, j);
      g.a[j] += tw * materials.w1.w_prime(al.a[j]);
      g.b[j] += tw * materials.w2.w_prime(al.b[j]);
    }
  }

  void project(Pair& al) const {
    for (size_t j = 0; j < al.a.size(); ++j) {
      al.a[j] = std::min(1.0, std::max(lower1[j], al.a[j]));
      al.b[j] = std::min(1.0, std::max(lower2[j], al.b[j]));
    }
  }

  double violation(const Pair& al, Pair& scratch) const {
    grad(al, scratch);
    double worst = 0.0;
    auto comp = [&](double a, double lo, double g) {
      if (lo >= 1.0) return 0.0;  // degenerate box
      if (a >= 1.0) return std::max(0.0, g);
      if (a <= lo) return std::max(0.0, -g);
      return std::abs(g);
    };
    for (size_t j = 0; j < al.a.size(); ++j) {
      worst = std::max(worst, comp(al.a[j], lower1[j], scratch.a[j]));
      worst = std::max(worst, comp(al.b[j], lower2[j], scratch.b[j]));
    }
    return worst;
  }
};

// ---------------------------------------------------------------------------
// shared accelerated monotone descent driver
//
// Plain proximal-gradient with backtracking, plus a momentum trial that is
// kept only while it does not break monotone descent of the full objective.

template <class Block, class Prox>
SubsolveResult descend(const Block& block, Pair& x, const Prox& apply_prox,
                       double tol, const SolverOptions& opts) {
  SubsolveResult res;
  Pair grad = x, grad_prev = x, y = x, y_prev = x, z = x, x_prev = x,
       scratch = x;

  res.violation = block.violation(x, scratch);
  if (res.violation <= tol) {
    res.converged = true;
    return res;
  }

  double fx = block.full(x);
  double t_mom = 1.0;
  bool plain = true;       // base point is x itself
  bool have_secant = false;
  double curv = 0.0;       // running max of secant curvature along the path

  for (int it = 1; it <= opts.max_inner_iters; ++it) {
    block.smooth_grad(y, grad);
    if (have_secant) {
      // curvature of the smooth part along the last displacement; immune to
      // the rounding floor of energy differences
      Pair dy = y, dg = grad;
      dy.axpy(-1.0, y_prev);
      dg.axpy(-1.0, grad_prev);
      double dd = 0.0;
      for (size_t i = 0; i < dy.a.size(); ++i)
        dd += dy.a[i] * dy.a[i] + dy.b[i] * dy.b[i];
      const double c = inner(dy, dg);
      if (dd > 0.0 && c > 0.0) curv = std::max(curv, c / dd);
    }
    y_prev = y;
    grad_prev = grad;

    double tau = curv > 0.0 ? std::min(1.0 / (1.5 * curv), opts.step_init)
                            : opts.step_init;
    // backtrack while the quadratic upper model measurably fails
    const double fy_s = block.smooth(y);
    for (;;) {
      z = y;
      z.axpy(-tau, grad);
      apply_prox(z, tau);
      const double fz_s = block.smooth(z);
      const double gap = dist2(z, y);
      double lin = 0.0;
      for (size_t i = 0; i < z.a.size(); ++i)
        lin += grad.a[i] * (z.a[i] - y.a[i]) + grad.b[i] * (z.b[i] - y.b[i]);
      const double excess = fz_s - fy_s - lin - 0.5 * gap / tau;
      if (excess <= 1e-13 * (1.0 + std::abs(fy_s))) break;
      if (gap > 0.0) curv = std::max(curv, 2.0 * (fz_s - fy_s - lin) / gap);
      tau *= opts.step_shrink;
      if (tau < 1e-18) break;
    }
    have_secant = true;

    const double fz = block.full(z);
    const double resolve = 1e-9 * (1.0 + std::abs(fx));
    if (fz <= fx || (plain && fz <= fx + resolve)) {
      x_prev = x;
      x = z;
      fx = fz;
      const double t_next =
          0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
      y = x;
      Pair step = x;
      step.axpy(-1.0, x_prev);
      y.axpy((t_mom - 1.0) / t_next, step);
      t_mom = t_next;
      plain = false;
    } else if (plain) {
      // a measurable ascent from the incumbent: the curvature estimate was
      // too optimistic
      curv = curv > 0.0 ? 4.0 * curv : 1.0 / std::max(tau, 1e-18);
      y = x;
      t_mom = 1.0;
    } else {
      // momentum overshoot: restart from the incumbent
      y = x;
      t_mom = 1.0;
      plain = true;
    }

    res.iterations = it;
    res.violation = block.violation(x, scratch);
    if (res.violation <= tol) {
      res.converged = true;
      return res;
    }
    if (tau < 1e-18) return res;  // no acceptable step left
  }
  return res;
}


struct SweepOutcome {
  int sweeps = 0;
  bool converged = false;
  double residual = 0.0;
};

SweepOutcome alternate_minimize(const Mesh& mesh, SystemState& state,
                                const SystemState& prev,
                                const NodalField& gamma_floor,
                                const CohesiveLaw& law,
                                const LayerMaterials& materials,
                                const SolverOptions& opts);

}  // namespace

SubsolveResult minimize_u(const Mesh& mesh, NodalField& u1, NodalField& u2,
                          const NodalField& alpha1, const NodalField& alpha2,
                          const NodalField& gamma_floor, const CohesiveLaw& law,
                          const LayerMaterials& materials,
                          const SolverOptions& opts) {
  opts.validate();
  UBlock block{mesh, alpha1, alpha2, law, materials,
               slip_prox_data(mesh, gamma_floor, law)};
  Pair x{u1, u2};
  auto apply_prox = [&block](Pair& p, double tau) {
    Pair tmp = p;
    block.prox_step(tmp, tau, p);
  };
  // mesh-consistent tolerance: finer meshes resolve equilibrium tighter, so
  // the algebraic residual is kept below the discretization scale
  const double scaled =
      opts.tol_grad *
      std::min(1.0, std::pow(16.0 * mesh.h / mesh.L, 2.0));
  SubsolveResult res = descend(block, x, apply_prox, scaled, opts);
  u1 = std::move(x.a);
  u2 = std::move(x.b);
  return res;
}

SubsolveResult minimize_alpha(const Mesh& mesh, const NodalField& u1,
                              const NodalField& u2, NodalField& alpha1,
                              NodalField& alpha2, const NodalField& lower1,
                              const NodalField& lower2,
                              const LayerMaterials& materials,
                              const SolverOptions& opts) {
  opts.validate();
  for (size_t j = 0; j < lower1.size(); ++j)
    if (lower1[j] < 0.0 || lower1[j] > 1.0 || lower2[j] < 0.0 ||
        lower2[j] > 1.0)
      throw InvalidBound("damage floor outside [0,1]");

  struct AlphaFacade : AlphaBlock {
    double full(const Pair& p) const { return energy(p); }
    double smooth(const Pair& p) const { return energy(p); }
    void smooth_grad(const Pair& p, Pair& g) const { grad(p, g); }
  };
  AlphaFacade block{{mesh, u1, u2, lower1, lower2, materials}};
  Pair x{alpha1, alpha2};
  block.project(x);
  auto apply_prox = [&block](Pair& p, double) { block.project(p); };
  SubsolveResult res = descend(block, x, apply_prox, opts.tol_grad, opts);
  alpha1 = std::move(x.a);
  alpha2 = std::move(x.b);
  return res;
}

IncrementResult solve_increment(const Mesh& mesh, const SystemState& prev,
                                double boundary_value, const CohesiveLaw& law,
                                const LayerMaterials& materials,
                                const SolverOptions& opts) {
  opts.validate();
  if (!std::isfinite(boundary_value))
    throw std::invalid_argument("boundary value must be finite");
  for (int layer = 0; layer < 2; ++layer)
    for (double a : prev.alpha(layer))
      if (a < 0.0 || a > 1.0) throw InvalidBound("previous damage outside [0,1]");

  IncrementResult out;
  out.state = prev;
  // affine shift to the new boundary value (the competitor of the
  // incremental energy estimate); keeps the slip field unchanged
  const double shift = boundary_value - prev.u1.back();
  for (int j = 0; j <= mesh.n_elems; ++j) {
    const double lift = shift * mesh.nodes[j] / mesh.L;
    out.state.u1[j] += lift;
    out.state.u2[j] += lift;
  }
  out.state.u1.back() = boundary_value;
  out.state.u2.back() = boundary_value;

  const NodalField gamma_floor = prev.delta_h;
  const SweepOutcome sw =
      alternate_minimize(mesh, out.state, prev, gamma_floor, law, materials, opts);
  out.outer_iters = sw.sweeps;
  out.converged = sw.converged;
  out.grad_residual = sw.residual;

  const NodalField d = slip(out.state);
  for (int j = 0; j <= mesh.n_elems; ++j) {
    out.state.delta_h[j] = std::max(prev.delta_h[j], d[j]);
    out.state.gamma[j] = out.state.delta_h[j];
  }
  out.energy = total_energy(mesh, out.state, law, materials);

  if (opts.n_restarts > 0)
    out = global_polish(mesh, std::move(out), prev, law, materials, opts);
  return out;
}

IncrementResult global_polish(const Mesh& mesh, IncrementResult result,
                              const SystemState& prev, const CohesiveLaw& law,
                              const LayerMaterials& materials,
                              const SolverOptions& opts) {
  if (opts.n_restarts < 1) return result;
  std::mt19937_64 rng(opts.rng_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double boundary_value = result.state.u1.back();
  const double uscale = 1.0 + std::abs(boundary_value);
  const NodalField gamma_floor = prev.delta_h;

  SolverOptions inner = opts;
  inner.n_restarts = 0;

  for (int r = 0; r < opts.n_restarts; ++r) {
    SystemState cand = result.state;
    for (int j = 1; j < mesh.n_elems; ++j) {
      cand.u1[j] += opts.restart_amplitude * uscale * unit(rng);
      cand.u2[j] += opts.restart_amplitude * uscale * unit(rng);
    }
    for (int j = 0; j <= mesh.n_elems; ++j) {
      cand.alpha1[j] = std::min(
          1.0, std::max(prev.alpha1[j],
                        cand.alpha1[j] + opts.restart_amplitude * unit(rng)));
      cand.alpha2[j] = std::min(
          1.0, std::max(prev.alpha2[j],
                        cand.alpha2[j] + opts.restart_amplitude * unit(rng)));
    }

    alternate_minimize(mesh, cand, prev, gamma_floor, law, materials, inner);
    const NodalField d = slip(cand);
    for (int j = 0; j <= mesh.n_elems; ++j) {
      cand.delta_h[j] = std::max(prev.delta_h[j], d[j]);
      cand.gamma[j] = cand.delta_h[j];
    }
    const double energy = total_energy(mesh, cand, law, materials);
    if (energy < result.energy) {
      result.state = std::move(cand);
      result.energy = energy;
      ++result.restarts_improved;
    }
  }
  return result;
}

namespace {

SweepOutcome alternate_minimize(const Mesh& mesh, SystemState& state,
                                const SystemState& prev,
                                const NodalField& gamma_floor,
                                const CohesiveLaw& law,
                                const LayerMaterials& materials,
                                const SolverOptions& opts) {
  SweepOutcome out;
  double sweep_energy =
      incremental_energy(mesh, state.u1, state.u2, state.alpha1, state.alpha2,
                         gamma_floor, law, materials);
  for (int sweep = 1; sweep <= opts.max_outer_iters; ++sweep) {
    const SubsolveResult ru =
        minimize_u(mesh, state.u1, state.u2, state.alpha1, state.alpha2,
                   gamma_floor, law, materials, opts);
    const SubsolveResult ra =
        minimize_alpha(mesh, state.u1, state.u2, state.alpha1, state.alpha2,
                       prev.alpha1, prev.alpha2, materials, opts);
    out.sweeps = sweep;
    const double e =
        incremental_energy(mesh, state.u1, state.u2, state.alpha1,
                           state.alpha2, gamma_floor, law, materials);
    const bool fixed_point = ru.iterations == 0 && ra.iterations == 0;
    const bool stalled = sweep_energy - e <= opts.tol_energy;
    sweep_energy = e;
    out.residual = std::max(ru.violation, ra.violation);
    if (ru.converged && ra.converged && (fixed_point || stalled)) {
      if (!fixed_point) {
        // leave with the displacements equilibrated against the final damage
        const SubsolveResult polish =
            minimize_u(mesh, state.u1, state.u2, state.alpha1, state.alpha2,
                       gamma_floor, law, materials, opts);
        out.residual = std::max(polish.violation, ra.violation);
      }
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

}  // namespace hylam
