#include "hylam/mesh.hpp"

#include <cmath>
#include <string>

namespace hylam {

Mesh make_mesh(double L, int n_elems) {
  if (!(L > 0.0)) throw std::invalid_argument("bar length must be positive");
  if (n_elems < 1) throw std::invalid_argument("need at least one element");
  Mesh mesh;
  mesh.L = L;
  mesh.n_elems = n_elems;
  mesh.h = L / n_elems;
  mesh.nodes.resize(n_elems + 1);
  for (int j = 0; j <= n_elems; ++j) mesh.nodes[j] = L * j / n_elems;
  mesh.nodes.back() = L;
  return mesh;
}

NodalField slip(const SystemState& state) {
  NodalField d(state.u1.size());
  for (size_t j = 0; j < d.size(); ++j)
    d[j] = std::abs(state.u1[j] - state.u2[j]);
  return d;
}

SystemState make_state(const Mesh& mesh, double boundary_value) {
  SystemState s;
  const int n = mesh.n_nodes();
  s.u1.assign(n, 0.0);
  s.u2.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double v = boundary_value * mesh.nodes[j] / mesh.L;
    s.u1[j] = v;
    s.u2[j] = v;
  }
  s.u1.back() = boundary_value;
  s.u2.back() = boundary_value;
  s.alpha1.assign(n, 0.0);
  s.alpha2.assign(n, 0.0);
  s.delta_h.assign(n, 0.0);
  s.gamma.assign(n, 0.0);
  return s;
}

void validate_state(const Mesh& mesh, const SystemState& state,
                    double boundary_value) {
  const size_t n = size_t(mesh.n_nodes());
  auto need = [n](const NodalField& f, const char* name) {
    if (f.size() != n)
      throw IncompatibleData(std::string(name) + ": wrong field length");
  };
  need(state.u1, "u1");
  need(state.u2, "u2");
  need(state.alpha1, "alpha1");
  need(state.alpha2, "alpha2");
  need(state.delta_h, "delta_h");
  need(state.gamma, "gamma");

  const double tol = 1e-12 * (1.0 + std::abs(boundary_value));
  for (int layer = 0; layer < 2; ++layer) {
    const auto& u = state.u(layer);
    if (std::abs(u.front()) > tol)
      throw IncompatibleData("u: left boundary value must vanish");
    if (std::abs(u.back() - boundary_value) > tol)
      throw IncompatibleData("u: right boundary value mismatch");
    for (double a : state.alpha(layer))
      if (a < -1e-14 || a > 1.0 + 1e-14)
        throw IncompatibleData("alpha: value outside [0,1]");
  }
  for (size_t j = 0; j < n; ++j) {
    const double d = std::abs(state.u1[j] - state.u2[j]);
    if (state.delta_h[j] < d - 1e-12)
      throw IncompatibleData("delta_h: below current slip");
    if (state.gamma[j] < state.delta_h[j] - 1e-12)
      throw IncompatibleData("gamma: below delta_h");
  }
  if (state.delta_h.front() > 1e-12 || state.delta_h.back() > 1e-12)
    throw IncompatibleData("delta_h: must vanish at the clamped ends");
}

double trapezoid(const Mesh& mesh, const NodalField& values) {
  double sum = 0.0;
  for (int j = 0; j <= mesh.n_elems; ++j)
    sum += node_weight(mesh, j) * values[j];
  return sum;
}

double h1_seminorm_sq(const Mesh& mesh, const NodalField& v) {
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double s = (v[e + 1] - v[e]) / mesh.h;
    sum += mesh.h * s * s;
  }
  return sum;
}

double l2_norm_sq(const Mesh& mesh, const NodalField& v) {
  NodalField sq(v.size());
  for (size_t j = 0; j < v.size(); ++j) sq[j] = v[j] * v[j];
  return trapezoid(mesh, sq);
}

}  // namespace hylam
