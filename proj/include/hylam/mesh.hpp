// Uniform 1D mesh, piecewise-linear nodal fields, and the coupled system
// state (two displacement fields, two damage fields, interface history).

#pragma once

#include <stdexcept>
#include <vector>

namespace hylam {

using NodalField = std::vector<double>;

struct IncompatibleData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Mesh {
  double L = 1.0;
  int n_elems = 1;
  double h = 1.0;
  std::vector<double> nodes;

  int n_nodes() const { return n_elems + 1; }
};

Mesh make_mesh(double L, int n_elems);

/// Nodal snapshot of the coupled system. delta_h is the running maximum of
/// the slip |u1 - u2|; gamma is the history field entering the cohesive
/// energy (equal to delta_h along computed trajectories).
struct SystemState {
  NodalField u1, u2;
  NodalField alpha1, alpha2;
  NodalField delta_h;
  NodalField gamma;
  double t = 0.0;

  const NodalField& u(int layer) const { return layer == 0 ? u1 : u2; }
  NodalField& u(int layer) { return layer == 0 ? u1 : u2; }
  const NodalField& alpha(int layer) const {
    return layer == 0 ? alpha1 : alpha2;
  }
  NodalField& alpha(int layer) { return layer == 0 ? alpha1 : alpha2; }
};

NodalField slip(const SystemState& state);

SystemState make_state(const Mesh& mesh, double boundary_value = 0.0);

/// Boundary, box and history-ordering checks; throws IncompatibleData
/// with the offending field named.
void validate_state(const Mesh& mesh, const SystemState& state,
                    double boundary_value);

// Trapezoidal node weight (h inside, h/2 at the ends).
inline double node_weight(const Mesh& mesh, int j) {
  return (j == 0 || j == mesh.n_elems) ? 0.5 * mesh.h : mesh.h;
}

double trapezoid(const Mesh& mesh, const NodalField& values);

// Discrete norms of piecewise-linear interpolants.
double h1_seminorm_sq(const Mesh& mesh, const NodalField& v);
double l2_norm_sq(const Mesh& mesh, const NodalField& v);

}  // namespace hylam
