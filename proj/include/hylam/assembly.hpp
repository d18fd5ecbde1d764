// Assembly of the stored, dissipated and cohesive energies, their nodal
// gradients, and the elementwise stress fields.
//
// Quadrature: elementwise midpoint for the damage-dependent modulus (the
// damage value entering an element is the average of its two nodal values),
// exact elementwise slopes for the gradient terms, nodal trapezoid for the
// dissipation and the interface density. These choices keep the gradients
// analytic and make the constant/affine reference cases exact.

#pragma once

#include "hylam/cohesive_law.hpp"
#include "hylam/materials.hpp"
#include "hylam/mesh.hpp"

namespace hylam {

double elastic_energy(const Mesh& mesh, const SystemState& state,
                      const LayerMaterials& materials);

double damage_energy(const Mesh& mesh, const SystemState& state,
                     const LayerMaterials& materials);

/// Trapezoid of phi(delta_j, gamma_j). Requires gamma >= delta - 1e-12
/// nodewise.
double cohesive_energy(const Mesh& mesh, const NodalField& delta,
                       const NodalField& gamma, const CohesiveLaw& law);

/// Total energy of a state against its own history field.
double total_energy(const Mesh& mesh, const SystemState& state,
                    const CohesiveLaw& law, const LayerMaterials& materials);

/// Objective of one incremental minimization: the history entering the
/// cohesive term is gamma_floor lifted by the current slip,
///   K[|u1-u2|, gamma_floor v |u1-u2|].
double incremental_energy(const Mesh& mesh, const NodalField& u1,
                          const NodalField& u2, const NodalField& alpha1,
                          const NodalField& alpha2,
                          const NodalField& gamma_floor, const CohesiveLaw& law,
                          const LayerMaterials& materials);

/// Nodal gradient of the incremental energy. Displacement components carry
/// the full one-sided slope of y -> phi(|y|, gamma_floor v |y|); at nodes
/// where that map has a kink (zero slip on zero history) the entry is the
/// smooth part and the node is flagged, with the kink weight in kappa.
struct Gradient {
  NodalField u1, u2;
  NodalField alpha1, alpha2;
  // Trapezoid-weighted threshold of the slip kink at each node (zero at
  // smooth nodes). The solver treats the term kappa_j |u1_j - u2_j| by
  // soft-thresholding instead of smoothing.
  NodalField kappa;
  std::vector<char> nonsmooth;
};

Gradient total_gradient(const Mesh& mesh, const NodalField& u1,
                        const NodalField& u2, const NodalField& alpha1,
                        const NodalField& alpha2, const NodalField& gamma_floor,
                        const CohesiveLaw& law,
                        const LayerMaterials& materials);

/// Nonsmooth structure of the slip terms for one increment. At node j the
/// map d -> phi(|d|, floor_j v |d|) can kink at d = 0 (weight kappa0, the
/// stick threshold) and at |d| = floor_j where the loading branch takes over
/// (weight kappa1, zero for laws whose unloading slope matches the diagonal
/// slope there). Both weights carry the trapezoid node weight.
struct SlipProxData {
  NodalField kappa0;
  NodalField kappa1;
  NodalField floor_;
};

SlipProxData slip_prox_data(const Mesh& mesh, const NodalField& gamma_floor,
                            const CohesiveLaw& law);

/// Elementwise stresses sigma_i = E_i(alpha at midpoint) u_i'.
struct StressField {
  std::vector<double> sigma1, sigma2;
};

StressField stress_field(const Mesh& mesh, const SystemState& state,
                         const LayerMaterials& materials);

// Integral over the bar of sigma1 + sigma2 (enters the external work).
double sum_stress_integral(const Mesh& mesh, const SystemState& state,
                           const LayerMaterials& materials);

// Integral over the bar of E1(alpha1) + E2(alpha2), with the same
// elementwise midpoint rule as the elastic energy.
double modulus_integral(const Mesh& mesh, const SystemState& state,
                        const LayerMaterials& materials);

}  // namespace hylam
