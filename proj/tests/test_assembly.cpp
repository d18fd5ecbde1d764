#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hylam/assembly.hpp"

using namespace hylam;

namespace {

LayerMaterials power_materials(double a1, double a2, double b = 0.5,
                               double wscale = 1.0) {
  return LayerMaterials{power_modulus(a1, b), power_modulus(a2, b),
                        quadratic_dissipation(wscale),
                        quadratic_dissipation(wscale)};
}

CohesiveLaw parabolic_law(double c, double k) {
  return make_quadratic_unloading(parabolic_capped_profile(c, k));
}

SystemState ramp_state(const Mesh& mesh, double ubar) {
  SystemState s = make_state(mesh, ubar);
  return s;
}

// independent central-difference oracle for the incremental gradient
double fd_component(const Mesh& mesh, SystemState s, const NodalField& floor_,
                    const CohesiveLaw& law, const LayerMaterials& mats,
                    int field, int node) {
  auto pick = [&](SystemState& st) -> NodalField& {
    switch (field) {
      case 0: return st.u1;
      case 1: return st.u2;
      case 2: return st.alpha1;
      default: return st.alpha2;
    }
  };
  const double x0 = pick(s)[node];
  const double h = 6e-6 * (1.0 + std::abs(x0));
  pick(s)[node] = x0 + h;
  const double fp = incremental_energy(mesh, s.u1, s.u2, s.alpha1, s.alpha2,
                                       floor_, law, mats);
  pick(s)[node] = x0 - h;
  const double fm = incremental_energy(mesh, s.u1, s.u2, s.alpha1, s.alpha2,
                                       floor_, law, mats);
  return (fp - fm) / (2.0 * h);
}

}  // namespace

TEST_CASE("mesh construction") {
  const Mesh mesh = make_mesh(2.0, 5);
  CHECK(mesh.h == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(mesh.nodes.size() == 6);
  CHECK(mesh.nodes.back() == 2.0);
  for (int j = 0; j < 5; ++j) CHECK(mesh.nodes[j + 1] > mesh.nodes[j]);
  CHECK_THROWS_AS(make_mesh(-1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_mesh(1.0, 0), std::invalid_argument);
}

TEST_CASE("elastic energy of the affine ramp") {
  const Mesh mesh = make_mesh(2.0, 16);
  const LayerMaterials mats = power_materials(96.0, 96.0);
  const double ubar = 0.3;
  SystemState s = ramp_state(mesh, ubar);
  // both layers together: E(0) ubar^2 / L
  CHECK(elastic_energy(mesh, s, mats) ==
        doctest::Approx(96.0 * ubar * ubar / mesh.L).epsilon(1e-12));

  SystemState zero = make_state(mesh, 0.0);
  CHECK(elastic_energy(mesh, zero, mats) == 0.0);

  SystemState damaged = ramp_state(mesh, ubar);
  std::fill(damaged.alpha1.begin(), damaged.alpha1.end(), 1.0);
  std::fill(damaged.alpha2.begin(), damaged.alpha2.end(), 1.0);
  const double e1 = mats.E1.E(1.0);
  CHECK(elastic_energy(mesh, damaged, mats) ==
        doctest::Approx(e1 * ubar * ubar / mesh.L).epsilon(1e-12));
}

TEST_CASE("damage energy closed forms") {
  const Mesh mesh = make_mesh(3.0, 24);
  const LayerMaterials mats = power_materials(10.0, 10.0);
  SystemState s = make_state(mesh, 0.0);
  CHECK(damage_energy(mesh, s, mats) == 0.0);

  const double c = 0.4;
  std::fill(s.alpha1.begin(), s.alpha1.end(), c);
  CHECK(damage_energy(mesh, s, mats) ==
        doctest::Approx(mesh.L * (c * c + c) / 2.0).epsilon(1e-12));

  SystemState lin = make_state(mesh, 0.0);
  for (int j = 0; j <= mesh.n_elems; ++j)
    lin.alpha1[j] = mesh.nodes[j] / mesh.L;
  const double grad_term = 1.0 / (2.0 * mesh.L);
  const double diss = [&] {
    // trapezoid of w(x/L) for w(y) = (y^2+y)/2
    double sum = 0.0;
    for (int j = 0; j <= mesh.n_elems; ++j) {
      const double y = mesh.nodes[j] / mesh.L;
      sum += node_weight(mesh, j) * 0.5 * (y * y + y);
    }
    return sum;
  }();
  CHECK(damage_energy(mesh, lin, mats) ==
        doctest::Approx(grad_term + diss).epsilon(1e-12));
}

TEST_CASE("cohesive energy closed forms and the history guard") {
  const Mesh mesh = make_mesh(2.0, 10);
  const CohesiveLaw law = parabolic_law(1.0, 1.0);
  const int nn = mesh.n_nodes();

  NodalField zero(nn, 0.0);
  CHECK(cohesive_energy(mesh, zero, zero, law) == 0.0);

  NodalField d(nn, 0.3), g(nn, 0.3);
  CHECK(cohesive_energy(mesh, d, g, law) ==
        doctest::Approx(mesh.L * law.phi(0.3, 0.3)).epsilon(1e-12));

  NodalField d2(nn, 0.25), g2(nn, 0.5);
  CHECK(cohesive_energy(mesh, d2, g2, law) ==
        doctest::Approx(mesh.L * 0.5625).epsilon(1e-12));

  NodalField bad(nn, 0.6);
  CHECK_THROWS_AS(cohesive_energy(mesh, bad, g2, law), IncompatibleData);
}

TEST_CASE("stress field of the ramp is constant") {
  const Mesh mesh = make_mesh(1.0, 8);
  const LayerMaterials mats = power_materials(50.0, 30.0);
  const double ubar = 0.2;
  const SystemState s = ramp_state(mesh, ubar);
  const StressField f = stress_field(mesh, s, mats);
  for (int e = 0; e < mesh.n_elems; ++e) {
    CHECK(f.sigma1[e] == doctest::Approx(50.0 * ubar / mesh.L).epsilon(1e-12));
    CHECK(f.sigma2[e] == doctest::Approx(30.0 * ubar / mesh.L).epsilon(1e-12));
  }
  CHECK(sum_stress_integral(mesh, s, mats) ==
        doctest::Approx(80.0 * ubar).epsilon(1e-12));

  const SystemState z = make_state(mesh, 0.0);
  const StressField fz = stress_field(mesh, z, mats);
  for (int e = 0; e < mesh.n_elems; ++e) {
    CHECK(fz.sigma1[e] == 0.0);
    CHECK(fz.sigma2[e] == 0.0);
  }
}

TEST_CASE("assembled gradient matches finite differences") {
  const Mesh mesh = make_mesh(1.0, 16);
  const LayerMaterials mats = power_materials(96.0, 48.0);
  const CohesiveLaw law = parabolic_law(1.0, 1.0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int trial = 0; trial < 10; ++trial) {
    const double ubar = 0.6 * unif(rng);
    SystemState s = make_state(mesh, ubar);
    NodalField floor_(mesh.n_nodes(), 0.0);
    for (int j = 1; j < mesh.n_elems; ++j) {
      s.u1[j] += 0.2 * (unif(rng) - 0.5);
      s.u2[j] += 0.2 * (unif(rng) - 0.5);
    }
    for (int j = 0; j <= mesh.n_elems; ++j) {
      s.alpha1[j] = 0.9 * unif(rng);
      s.alpha2[j] = 0.9 * unif(rng);
      floor_[j] = unif(rng) < 0.3 ? 0.0 : 0.5 * unif(rng);
    }
    const Gradient g = total_gradient(mesh, s.u1, s.u2, s.alpha1, s.alpha2,
                                      floor_, law, mats);
    double worst = 0.0, scale = 1.0;
    for (int j = 1; j < mesh.n_elems; ++j) {
      if (g.nonsmooth[j]) continue;
      worst = std::max(worst, std::abs(g.u1[j] - fd_component(mesh, s, floor_,
                                                              law, mats, 0, j)));
      worst = std::max(worst, std::abs(g.u2[j] - fd_component(mesh, s, floor_,
                                                              law, mats, 1, j)));
      scale = std::max({scale, std::abs(g.u1[j]), std::abs(g.u2[j])});
    }
    for (int j = 0; j <= mesh.n_elems; ++j) {
      worst = std::max(worst, std::abs(g.alpha1[j] - fd_component(
                                           mesh, s, floor_, law, mats, 2, j)));
      worst = std::max(worst, std::abs(g.alpha2[j] - fd_component(
                                           mesh, s, floor_, law, mats, 3, j)));
      scale = std::max({scale, std::abs(g.alpha1[j]), std::abs(g.alpha2[j])});
    }
    CHECK(worst / scale <= 1e-6);
  }
}

TEST_CASE("no-slip states carry no interface gradient") {
  const Mesh mesh = make_mesh(1.0, 12);
  const LayerMaterials mats = power_materials(20.0, 20.0);
  const CohesiveLaw law = parabolic_law(2.0, 1.0);
  const CohesiveLaw none = make_separable([](double) { return 0.0; },
                                          [](double) { return 0.0; });
  SystemState s = make_state(mesh, 0.4);
  NodalField floor_(mesh.n_nodes(), 0.7);  // positive history everywhere
  const Gradient with = total_gradient(mesh, s.u1, s.u2, s.alpha1, s.alpha2,
                                       floor_, law, mats);
  const Gradient without = total_gradient(mesh, s.u1, s.u2, s.alpha1,
                                          s.alpha2, floor_, none, mats);
  for (int j = 0; j <= mesh.n_elems; ++j) {
    CHECK(with.u1[j] == without.u1[j]);
    CHECK(with.u2[j] == without.u2[j]);
    CHECK(with.nonsmooth[j] == 0);
  }
}

TEST_CASE("zero-history stuck nodes are flagged with the stick threshold") {
  const Mesh mesh = make_mesh(1.0, 4);
  const LayerMaterials mats = power_materials(10.0, 10.0);
  const CohesiveLaw law = parabolic_law(1.5, 1.0);  // psi'(0) = 3
  SystemState s = make_state(mesh, 0.1);
  NodalField floor_(mesh.n_nodes(), 0.0);
  const Gradient g = total_gradient(mesh, s.u1, s.u2, s.alpha1, s.alpha2,
                                    floor_, law, mats);
  for (int j = 1; j < mesh.n_elems; ++j) {
    CHECK(g.nonsmooth[j] == 1);
    CHECK(g.kappa[j] == doctest::Approx(mesh.h * 3.0));
  }
}

TEST_CASE("energies are coercive in the displacement slope") {
  const Mesh mesh = make_mesh(1.0, 8);
  const LayerMaterials mats = power_materials(96.0, 48.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  const double eps = std::min(mats.E1.eps, mats.E2.eps);
  for (int t = 0; t < 50; ++t) {
    SystemState s = make_state(mesh, unif(rng));
    for (int j = 1; j < mesh.n_elems; ++j) {
      s.u1[j] += unif(rng);
      s.u2[j] += unif(rng);
    }
    for (int j = 0; j <= mesh.n_elems; ++j) {
      s.alpha1[j] = 0.5 + unif(rng);
      s.alpha2[j] = 0.5 + unif(rng);
    }
    const double lower =
        0.5 * eps *
        (h1_seminorm_sq(mesh, s.u1) + h1_seminorm_sq(mesh, s.u2));
    CHECK(elastic_energy(mesh, s, mats) >= lower - 1e-12);
  }
}

TEST_CASE("energy assembly converges at second order on smooth fields") {
  const LayerMaterials mats = power_materials(12.0, 7.0);
  const CohesiveLaw law = parabolic_law(1.0, 2.0);
  const double L = 1.0, ubar = 0.3;
  const double pi = 3.14159265358979323846;

  auto assemble = [&](int n) {
    const Mesh mesh = make_mesh(L, n);
    SystemState s = make_state(mesh, ubar);
    for (int j = 0; j <= mesh.n_elems; ++j) {
      const double x = mesh.nodes[j] / L;
      s.u1[j] = ubar * x + 0.05 * std::sin(pi * x);
      s.u2[j] = ubar * x - 0.04 * std::sin(pi * x);
      s.alpha1[j] = 0.3 + 0.2 * std::sin(pi * x);
      s.alpha2[j] = 0.2 + 0.1 * std::sin(pi * x);
    }
    const NodalField d = slip(s);
    s.delta_h = d;
    s.gamma = d;
    return total_energy(mesh, s, law, mats);
  };

  const double ref = assemble(2048);
  const double e64 = std::abs(assemble(64) - ref);
  const double e128 = std::abs(assemble(128) - ref);
  CHECK(e64 / e128 > 3.0);
  CHECK(e64 / e128 < 5.0);
}
