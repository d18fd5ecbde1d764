// Layer constitutive data: damage-dependent elastic moduli, dissipation
// densities, and the convexity bookkeeping that decides whether the total
// energy is effectively convex (hardening stronger than interface concavity).

#pragma once

#include <functional>
#include <stdexcept>

#include "hylam/cohesive_law.hpp"

namespace hylam {

enum class ModulusFamily { Power, Custom };

/// Elastic modulus E(damage) on [0,1] with derivatives and the hardening
/// constants m = min(E''E/2 - E'^2), M = max E'', eps = min E.
struct ElasticModulus {
  std::function<double(double)> E;
  std::function<double(double)> E_prime;
  std::function<double(double)> E_second;
  double eps = 0.0;
  double m = 0.0;
  double M = 0.0;
  ModulusFamily family = ModulusFamily::Custom;
  double a = 0.0;
  double b = 0.0;
};

// E(y) = a (1 + y)^(-b) with a > 0, 0 < b < 1 (hardening family).
ElasticModulus power_modulus(double a, double b);

// Derivatives by central differences with step 1e-5 kept inside [0,1];
// hardening constants from a grid scan.
ElasticModulus custom_modulus(std::function<double(double)> E,
                              int grid_res = 256);

struct HardeningParams {
  double m = 0.0;
  double M = 0.0;
  double eps = 0.0;
  // Set when the grid minimum of E''E/2 - E'^2 sits within 1e-8 of zero;
  // the strict hardening inequality is then not trustworthy.
  bool conservative = false;
};

/// Closed forms for the power family, grid extrema otherwise.
/// Throws if E fails to stay positive on the probe grid.
HardeningParams hardening_params(const ElasticModulus& modulus, int grid_res);

struct DamageDissipation {
  std::function<double(double)> w;
  std::function<double(double)> w_prime;
  double mu = 0.0;  // uniform convexity parameter
};

// w(y) = scale (y^2 + y)/2, uniformly convex with mu = scale.
DamageDissipation quadratic_dissipation(double scale = 1.0);
// w(y) = scale y, convex but not uniformly (mu = 0).
DamageDissipation linear_dissipation(double scale = 1.0);
DamageDissipation custom_dissipation(std::function<double(double)> w,
                                     std::function<double(double)> w_prime,
                                     double mu);

struct LayerMaterials {
  ElasticModulus E1, E2;
  DamageDissipation w1, w2;

  const ElasticModulus& E(int layer) const { return layer == 0 ? E1 : E2; }
  const DamageDissipation& w(int layer) const { return layer == 0 ? w1 : w2; }
};

/// Balance between layer hardening and interface concavity. The internal
/// energy is uniformly convex exactly when margin > 0, with the sharp
/// Poincare constant L^2/pi^2 mediating the slip coupling.
struct ConvexityBudget {
  double m_over_M = 0.0;  // min over layers of m_i / M_i
  double mu = 0.0;        // min over layers of the dissipation convexity
  double lambda = 0.0;    // interface semiconvexity
  double L = 0.0;
  double margin = 0.0;  // m_over_M - lambda L^2 / pi^2

  bool holds() const { return margin > 0.0; }
};

ConvexityBudget check_regularity_condition(const LayerMaterials& materials,
                                           const CohesiveLaw& law, double L);

}  // namespace hylam
