#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stokeshape/mesh.hpp"
#include "stokeshape/types.hpp"

namespace stokeshape {

// Which boundary side plays which physical role.  Defaults follow the domain
// convention; overriding is allowed but the wall must remain Gamma0 whenever
// shape gradients are computed (the control parametrizes that side).
struct BCAssignment {
  int wall = Gamma0;
  int inflow = Gamma3;
  int outflow = Gamma1;
  int symmetry = Gamma2;
  void validate() const;
};

// Taylor-Hood P2-P1 pair on the structured triangulation.  Scalar P2 nodes
// form the (2n+1)^2 lattice of half-grid points; pressure nodes are the mesh
// vertices.  Velocity dofs interleave components: dof = 2*node + comp.
struct TaylorHoodSpace {
  Mesh mesh;
  int n = 0;

  std::vector<Vec2> p2_coords;
  std::vector<std::array<int, 6>> element_p2;  // v0 v1 v2 m01 m12 m20
  std::vector<std::array<int, 3>> element_p1;  // = triangle vertices

  int num_p2_nodes = 0;
  int num_vel_dofs = 0;
  int num_pressure_dofs = 0;

  // Bitmask of boundary sides through each P2 node (bit tag set if on side).
  std::vector<uint8_t> p2_side_mask;

  enum class VelBC : uint8_t { Free = 0, Zero = 1, Inflow = 2 };
  std::vector<VelBC> vel_bc;

  BCAssignment bc;

  int vel_dof(int node, int comp) const { return 2 * node + comp; }
  bool vel_constrained(int dof) const { return vel_bc[dof] != VelBC::Free; }
  int p2_node_at(int jx, int jy) const { return jy * (2 * n + 1) + jx; }
  bool node_on_side(int node, int tag) const {
    return (p2_side_mask[node] >> tag) & 1;
  }

  // Triangle adjacent to the k-th bottom-edge cell (the unique one whose
  // edge lies on Gamma0).
  int gamma0_triangle(int cell) const { return 2 * cell; }
};

TaylorHoodSpace build_space(const Mesh& mesh, const BCAssignment& bc = {});

// P2 and P1 shape values / reference gradients at a reference-triangle point.
void p2_shapes(double r, double s, double val[6], double grad[6][2]);
void p1_shapes(double r, double s, double val[3], double grad[3][2]);

// Scalar P2 trace on the bottom edge: evaluate the field with the given
// coefficient vector (one scalar per P2 node) at (x, 0).
double eval_scalar_on_gamma0(const TaylorHoodSpace& space, const Vec& coeffs,
                             double x);

}  // namespace stokeshape
