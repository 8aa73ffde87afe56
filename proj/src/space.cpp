#include "stokeshape/space.hpp"

#include <algorithm>
#include <cmath>

namespace stokeshape {

void BCAssignment::validate() const {
  std::array<int, 4> tags = {wall, inflow, outflow, symmetry};
  std::array<int, 4> sorted = tags;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != std::array<int, 4>{0, 1, 2, 3})
    throw InvalidInput("boundary assignment must use each of tags 0..3 once");
}

namespace {

// Lattice coordinates (jx, jy) in {0..2n} of a P2 node.
struct Lattice {
  int jx, jy;
};

int side_normal_component(int tag) {
  // Gamma0/Gamma2 are horizontal (normal = y), Gamma1/Gamma3 vertical.
  return (tag == Gamma0 || tag == Gamma2) ? 1 : 0;
}

}  // namespace

TaylorHoodSpace build_space(const Mesh& mesh, const BCAssignment& bc) {
  bc.validate();
  TaylorHoodSpace sp;
  sp.mesh = mesh;
  sp.n = mesh.n;
  sp.bc = bc;
  const int n = mesh.n;
  const int side = 2 * n + 1;

  sp.num_p2_nodes = side * side;
  sp.num_vel_dofs = 2 * sp.num_p2_nodes;
  sp.num_pressure_dofs = static_cast<int>(mesh.vertices.size());

  sp.p2_coords.resize(sp.num_p2_nodes);
  sp.p2_side_mask.assign(sp.num_p2_nodes, 0);
  for (int jy = 0; jy < side; ++jy) {
    for (int jx = 0; jx < side; ++jx) {
      const int node = sp.p2_node_at(jx, jy);
      sp.p2_coords[node] =
          Vec2(0.5 * jx / n, 0.5 * jy / n);
      uint8_t mask = 0;
      if (jy == 0) mask |= 1 << Gamma0;
      if (jx == 2 * n) mask |= 1 << Gamma1;
      if (jy == 2 * n) mask |= 1 << Gamma2;
      if (jx == 0) mask |= 1 << Gamma3;
      sp.p2_side_mask[node] = mask;
    }
  }

  sp.element_p2.resize(mesh.triangles.size());
  sp.element_p1.resize(mesh.triangles.size());
  for (size_t e = 0; e < mesh.triangles.size(); ++e) {
    const auto& tri = mesh.triangles[e];
    std::array<Lattice, 3> lat;
    for (int v = 0; v < 3; ++v) {
      const int ix = tri[v] % (n + 1);
      const int iy = tri[v] / (n + 1);
      lat[v] = {2 * ix, 2 * iy};
      sp.element_p1[e][v] = tri[v];
    }
    auto node_of = [&](Lattice l) { return sp.p2_node_at(l.jx, l.jy); };
    auto midpoint = [&](Lattice a, Lattice b) {
      return Lattice{(a.jx + b.jx) / 2, (a.jy + b.jy) / 2};
    };
    sp.element_p2[e] = {node_of(lat[0]),
                        node_of(lat[1]),
                        node_of(lat[2]),
                        node_of(midpoint(lat[0], lat[1])),
                        node_of(midpoint(lat[1], lat[2])),
                        node_of(midpoint(lat[2], lat[0]))};
  }

  // Velocity constraints.  Priority: wall (no slip, both components), then
  // inflow (both components carry Dirichlet data), then symmetry (normal
  // component only).  The outflow side stays free.
  sp.vel_bc.assign(sp.num_vel_dofs, TaylorHoodSpace::VelBC::Free);
  for (int node = 0; node < sp.num_p2_nodes; ++node) {
    const uint8_t mask = sp.p2_side_mask[node];
    if (mask == 0) continue;
    auto on = [&](int tag) { return (mask >> tag) & 1; };
    if (on(bc.wall)) {
      sp.vel_bc[sp.vel_dof(node, 0)] = TaylorHoodSpace::VelBC::Zero;
      sp.vel_bc[sp.vel_dof(node, 1)] = TaylorHoodSpace::VelBC::Zero;
      continue;
    }
    if (on(bc.inflow)) {
      sp.vel_bc[sp.vel_dof(node, 0)] = TaylorHoodSpace::VelBC::Inflow;
      sp.vel_bc[sp.vel_dof(node, 1)] = TaylorHoodSpace::VelBC::Inflow;
    }
    if (on(bc.symmetry)) {
      const int comp = side_normal_component(bc.symmetry);
      sp.vel_bc[sp.vel_dof(node, comp)] = TaylorHoodSpace::VelBC::Zero;
    }
  }
  return sp;
}

void p2_shapes(double r, double s, double val[6], double grad[6][2]) {
  const double l0 = 1.0 - r - s, l1 = r, l2 = s;
  val[0] = l0 * (2.0 * l0 - 1.0);
  val[1] = l1 * (2.0 * l1 - 1.0);
  val[2] = l2 * (2.0 * l2 - 1.0);
  val[3] = 4.0 * l0 * l1;
  val[4] = 4.0 * l1 * l2;
  val[5] = 4.0 * l2 * l0;

  const double g0[2] = {-1.0, -1.0}, g1[2] = {1.0, 0.0}, g2[2] = {0.0, 1.0};
  for (int d = 0; d < 2; ++d) {
    grad[0][d] = (4.0 * l0 - 1.0) * g0[d];
    grad[1][d] = (4.0 * l1 - 1.0) * g1[d];
    grad[2][d] = (4.0 * l2 - 1.0) * g2[d];
    grad[3][d] = 4.0 * (l0 * g1[d] + l1 * g0[d]);
    grad[4][d] = 4.0 * (l1 * g2[d] + l2 * g1[d]);
    grad[5][d] = 4.0 * (l2 * g0[d] + l0 * g2[d]);
  }
}

void p1_shapes(double r, double s, double val[3], double grad[3][2]) {
  val[0] = 1.0 - r - s;
  val[1] = r;
  val[2] = s;
  grad[0][0] = -1.0;
  grad[0][1] = -1.0;
  grad[1][0] = 1.0;
  grad[1][1] = 0.0;
  grad[2][0] = 0.0;
  grad[2][1] = 1.0;
}

double eval_scalar_on_gamma0(const TaylorHoodSpace& space, const Vec& coeffs,
                             double x) {
  if (coeffs.size() != space.num_p2_nodes)
    throw InvalidInput("scalar field size mismatch in gamma0 trace");
  const int n = space.n;
  const double xs = std::clamp(x, 0.0, 1.0);
  int cell = std::min(static_cast<int>(xs * n), n - 1);
  // Quadratic trace through the three bottom-edge nodes of the cell.
  const double a = static_cast<double>(cell) / n;
  const double t = (xs - a) * n;  // in [0,1]
  const double v0 = coeffs[space.p2_node_at(2 * cell, 0)];
  const double vm = coeffs[space.p2_node_at(2 * cell + 1, 0)];
  const double v1 = coeffs[space.p2_node_at(2 * cell + 2, 0)];
  return v0 * (1.0 - t) * (1.0 - 2.0 * t) + 4.0 * vm * t * (1.0 - t) +
         v1 * t * (2.0 * t - 1.0);
}

}  // namespace stokeshape
