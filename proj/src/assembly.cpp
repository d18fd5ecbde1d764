#include "hylam/assembly.hpp"

#include <cmath>

namespace hylam {

namespace {

double layer_elastic(const Mesh& mesh, const NodalField& u,
                     const NodalField& alpha, const ElasticModulus& mod) {
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double s = (u[e + 1] - u[e]) / mesh.h;
    const double a = 0.5 * (alpha[e] + alpha[e + 1]);
    sum += 0.5 * mesh.h * mod.E(a) * s * s;
  }
  return sum;
}

double layer_damage(const Mesh& mesh, const NodalField& alpha,
                    const DamageDissipation& w) {
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double g = (alpha[e + 1] - alpha[e]) / mesh.h;
    sum += 0.5 * mesh.h * g * g;
  }
  for (int j = 0; j <= mesh.n_elems; ++j)
    sum += node_weight(mesh, j) * w.w(alpha[j]);
  return sum;
}

// One-sided slope at the origin of y -> phi(|y|, g v |y|): psi'(0) when the
// node has no history, the (usually vanishing) unloading slope otherwise.
double kink_slope(const CohesiveLaw& law, double gamma_floor) {
  return gamma_floor > 0.0 ? law.dphi_dy(0.0, gamma_floor) : law.psi_prime0();
}

}  // namespace

double elastic_energy(const Mesh& mesh, const SystemState& state,
                      const LayerMaterials& materials) {
  return layer_elastic(mesh, state.u1, state.alpha1, materials.E1) +
         layer_elastic(mesh, state.u2, state.alpha2, materials.E2);
}

double damage_energy(const Mesh& mesh, const SystemState& state,
                     const LayerMaterials& materials) {
  return layer_damage(mesh, state.alpha1, materials.w1) +
         layer_damage(mesh, state.alpha2, materials.w2);
}

double cohesive_energy(const Mesh& mesh, const NodalField& delta,
                       const NodalField& gamma, const CohesiveLaw& law) {
  double sum = 0.0;
  for (int j = 0; j <= mesh.n_elems; ++j) {
    if (gamma[j] < delta[j] - 1e-12)
      throw IncompatibleData("gamma: below current slip in cohesive energy");
    sum += node_weight(mesh, j) * law.phi(std::min(delta[j], gamma[j]), gamma[j]);
  }
  return sum;
}

double total_energy(const Mesh& mesh, const SystemState& state,
                    const CohesiveLaw& law, const LayerMaterials& materials) {
  return elastic_energy(mesh, state, materials) +
         damage_energy(mesh, state, materials) +
         cohesive_energy(mesh, slip(state), state.gamma, law);
}

double incremental_energy(const Mesh& mesh, const NodalField& u1,
                          const NodalField& u2, const NodalField& alpha1,
                          const NodalField& alpha2,
                          const NodalField& gamma_floor, const CohesiveLaw& law,
                          const LayerMaterials& materials) {
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double s1 = (u1[e + 1] - u1[e]) / mesh.h;
    const double s2 = (u2[e + 1] - u2[e]) / mesh.h;
    const double a1 = 0.5 * (alpha1[e] + alpha1[e + 1]);
    const double a2 = 0.5 * (alpha2[e] + alpha2[e + 1]);
    sum += 0.5 * mesh.h *
           (materials.E1.E(a1) * s1 * s1 + materials.E2.E(a2) * s2 * s2);
    const double g1 = (alpha1[e + 1] - alpha1[e]) / mesh.h;
    const double g2 = (alpha2[e + 1] - alpha2[e]) / mesh.h;
    sum += 0.5 * mesh.h * (g1 * g1 + g2 * g2);
  }
  for (int j = 0; j <= mesh.n_elems; ++j) {
    const double tw = node_weight(mesh, j);
    sum += tw * (materials.w1.w(alpha1[j]) + materials.w2.w(alpha2[j]));
    const double d = std::abs(u1[j] - u2[j]);
    sum += tw * law.phi(d, std::max(gamma_floor[j], d));
  }
  return sum;
}

Gradient total_gradient(const Mesh& mesh, const NodalField& u1,
                        const NodalField& u2, const NodalField& alpha1,
                        const NodalField& alpha2, const NodalField& gamma_floor,
                        const CohesiveLaw& law,
                        const LayerMaterials& materials) {
  const int nn = mesh.n_nodes();
  Gradient g;
  g.u1.assign(nn, 0.0);
  g.u2.assign(nn, 0.0);
  g.alpha1.assign(nn, 0.0);
  g.alpha2.assign(nn, 0.0);
  g.kappa.assign(nn, 0.0);
  g.nonsmooth.assign(nn, 0);

  for (int layer = 0; layer < 2; ++layer) {
    const NodalField& u = layer == 0 ? u1 : u2;
    const NodalField& alpha = layer == 0 ? alpha1 : alpha2;
    NodalField& gu = layer == 0 ? g.u1 : g.u2;
    NodalField& ga = layer == 0 ? g.alpha1 : g.alpha2;
    const ElasticModulus& mod = materials.E(layer);
    const DamageDissipation& w = materials.w(layer);

    for (int e = 0; e < mesh.n_elems; ++e) {
      const double s = (u[e + 1] - u[e]) / mesh.h;
      const double am = 0.5 * (alpha[e] + alpha[e + 1]);
      const double sigma = mod.E(am) * s;
      gu[e] -= sigma;
      gu[e + 1] += sigma;
      const double coup = 0.25 * mesh.h * mod.E_prime(am) * s * s;
      ga[e] += coup;
      ga[e + 1] += coup;
      const double gslope = (alpha[e + 1] - alpha[e]) / mesh.h;
      ga[e] -= gslope;
      ga[e + 1] += gslope;
    }
    for (int j = 0; j < nn; ++j)
      ga[j] += node_weight(mesh, j) * w.w_prime(alpha[j]);
  }

  for (int j = 0; j < nn; ++j) {
    const double tw = node_weight(mesh, j);
    const double d = u1[j] - u2[j];
    const double ad = std::abs(d);
    const double gf = std::max(gamma_floor[j], 0.0);
    const double kink = kink_slope(law, gf);
    g.kappa[j] = tw * kink;
    if (ad > 0.0) {
      const double slope = (ad >= gf ? law.psi_prime(ad)
                                     : law.dphi_dy(ad, gf)) *
                           (d > 0.0 ? 1.0 : -1.0);
      g.u1[j] += tw * slope;
      g.u2[j] -= tw * slope;
    } else if (kink > 0.0) {
      g.nonsmooth[j] = 1;
      // slope of the smooth remainder at zero slip is zero
    }
  }
  return g;
}

SlipProxData slip_prox_data(const Mesh& mesh, const NodalField& gamma_floor,
                            const CohesiveLaw& law) {
  const int nn = mesh.n_nodes();
  SlipProxData p;
  p.kappa0.assign(nn, 0.0);
  p.kappa1.assign(nn, 0.0);
  p.floor_.assign(nn, 0.0);
  for (int j = 0; j < nn; ++j) {
    const double tw = node_weight(mesh, j);
    const double gf = std::max(gamma_floor[j], 0.0);
    p.floor_[j] = gf;
    p.kappa0[j] = tw * kink_slope(law, gf);
    if (gf > 0.0)
      p.kappa1[j] =
          tw * std::max(0.0, law.psi_prime(gf) - law.dphi_dy(gf, gf));
  }
  return p;
}

StressField stress_field(const Mesh& mesh, const SystemState& state,
                         const LayerMaterials& materials) {
  StressField f;
  f.sigma1.resize(mesh.n_elems);
  f.sigma2.resize(mesh.n_elems);
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double a1 = 0.5 * (state.alpha1[e] + state.alpha1[e + 1]);
    const double a2 = 0.5 * (state.alpha2[e] + state.alpha2[e + 1]);
    f.sigma1[e] = materials.E1.E(a1) * (state.u1[e + 1] - state.u1[e]) / mesh.h;
    f.sigma2[e] = materials.E2.E(a2) * (state.u2[e + 1] - state.u2[e]) / mesh.h;
  }
  return f;
}

double sum_stress_integral(const Mesh& mesh, const SystemState& state,
                           const LayerMaterials& materials) {
  const StressField f = stress_field(mesh, state, materials);
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e)
    sum += mesh.h * (f.sigma1[e] + f.sigma2[e]);
  return sum;
}

double modulus_integral(const Mesh& mesh, const SystemState& state,
                        const LayerMaterials& materials) {
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double a1 = 0.5 * (state.alpha1[e] + state.alpha1[e + 1]);
    const double a2 = 0.5 * (state.alpha2[e] + state.alpha2[e + 1]);
    sum += mesh.h * (materials.E1.E(a1) + materials.E2.E(a2));
  }
  return sum;
}

}  // namespace hylam
