#include "hylam/materials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hylam {

namespace {
constexpr double kFdStep = 1e-5;
}

ElasticModulus power_modulus(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !(b < 1.0))
    throw std::invalid_argument("power modulus requires a > 0 and 0 < b < 1");
  ElasticModulus mod;
  mod.family = ModulusFamily::Power;
  mod.a = a;
  mod.b = b;
  mod.E = [a, b](double y) { return a * std::pow(1.0 + y, -b); };
  mod.E_prime = [a, b](double y) {
    return -a * b * std::pow(1.0 + y, -b - 1.0);
  };
  mod.E_second = [a, b](double y) {
    return a * b * (b + 1.0) * std::pow(1.0 + y, -b - 2.0);
  };
  mod.eps = a * std::pow(2.0, -b);
  mod.m = 0.5 * a * a * b * (1.0 - b) * std::pow(4.0, -(1.0 + b));
  mod.M = a * b * (1.0 + b);
  return mod;
}

ElasticModulus custom_modulus(std::function<double(double)> E, int grid_res) {
  if (!E) throw std::invalid_argument("custom modulus requires E");
  ElasticModulus mod;
  mod.family = ModulusFamily::Custom;
  mod.E_prime = [E](double y) {
    const double lo = std::max(0.0, y - kFdStep);
    const double hi = std::min(1.0, y + kFdStep);
    return (E(hi) - E(lo)) / (hi - lo);
  };
  mod.E_second = [E](double y) {
    const double c = std::clamp(y, kFdStep, 1.0 - kFdStep);
    return (E(c + kFdStep) - 2.0 * E(c) + E(c - kFdStep)) / (kFdStep * kFdStep);
  };
  mod.E = std::move(E);
  const auto hp = hardening_params(mod, grid_res);
  mod.eps = hp.eps;
  mod.m = hp.m;
  mod.M = hp.M;
  return mod;
}

HardeningParams hardening_params(const ElasticModulus& modulus, int grid_res) {
  if (grid_res < 2) throw std::invalid_argument("grid_res must be >= 2");
  HardeningParams hp;
  if (modulus.family == ModulusFamily::Power) {
    hp.m = modulus.m;
    hp.M = modulus.M;
    hp.eps = modulus.eps;
    return hp;
  }
  double m = kInf, M = -kInf, eps = kInf;
  for (int j = 0; j <= grid_res; ++j) {
    const double y = double(j) / grid_res;
    const double e = modulus.E(y);
    if (!(e > 0.0)) throw std::invalid_argument("modulus not positive on [0,1]");
    const double e1 = modulus.E_prime(y);
    const double e2 = modulus.E_second(y);
    m = std::min(m, 0.5 * e2 * e - e1 * e1);
    M = std::max(M, e2);
    eps = std::min(eps, e);
  }
  hp.m = m;
  hp.M = M;
  hp.eps = eps;
  hp.conservative = std::abs(m) < 1e-8;
  return hp;
}

DamageDissipation quadratic_dissipation(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  DamageDissipation d;
  d.w = [scale](double y) { return 0.5 * scale * (y * y + y); };
  d.w_prime = [scale](double y) { return scale * (y + 0.5); };
  d.mu = scale;
  return d;
}

DamageDissipation linear_dissipation(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  DamageDissipation d;
  d.w = [scale](double y) { return scale * y; };
  d.w_prime = [scale](double) { return scale; };
  d.mu = 0.0;
  return d;
}

DamageDissipation custom_dissipation(std::function<double(double)> w,
                                     std::function<double(double)> w_prime,
                                     double mu) {
  if (!w || !w_prime) throw std::invalid_argument("dissipation incomplete");
  if (mu < 0.0) throw std::invalid_argument("mu must be nonnegative");
  DamageDissipation d;
  d.w = std::move(w);
  d.w_prime = std::move(w_prime);
  d.mu = mu;
  return d;
}

ConvexityBudget check_regularity_condition(const LayerMaterials& materials,
                                           const CohesiveLaw& law, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("bar length must be positive");
  for (const auto* mod : {&materials.E1, &materials.E2})
    if (!(mod->M > 0.0))
      throw std::invalid_argument("hardening constants missing or degenerate");
  ConvexityBudget budget;
  budget.m_over_M =
      std::min(materials.E1.m / materials.E1.M, materials.E2.m / materials.E2.M);
  budget.mu = std::min(materials.w1.mu, materials.w2.mu);
  budget.lambda = law.lambda();
  budget.L = L;
  const double pi = std::numbers::pi;
  budget.margin = budget.m_over_M - budget.lambda * L * L / (pi * pi);
  return budget;
}

}  // namespace hylam
