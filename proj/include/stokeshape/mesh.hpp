#pragma once

#include <array>
#include <string>
#include <vector>

#include "stokeshape/types.hpp"

namespace stokeshape {

// Boundary tags of the reference unit square.
//   Gamma0: y=0 (control boundary, no slip)
//   Gamma1: x=1 (outflow, natural)
//   Gamma2: y=1 (symmetry axis)
//   Gamma3: x=0 (inflow, Dirichlet)
enum BoundaryTag : int { Gamma0 = 0, Gamma1 = 1, Gamma2 = 2, Gamma3 = 3 };

// Uniform triangulation of the unit square: n x n cells, each square split
// along its main diagonal into two triangles (2 n^2 triangles in total).
struct Mesh {
  int n = 0;
  std::vector<Vec2> vertices;                  // (n+1)^2, lexicographic by row
  std::vector<std::array<int, 3>> triangles;   // CCW vertex indices

  struct BoundaryEdge {
    int a, b;   // vertex indices, ordered along the boundary parameter
    int tag;    // BoundaryTag
  };
  std::vector<BoundaryEdge> boundary_edges;

  double h() const;  // max element diameter: sqrt(2)/n
  int vertex_index(int ix, int iy) const { return iy * (n + 1) + ix; }
  double total_area() const;
};

Mesh build_mesh(int n);

// Plain-text export: vertex count + coordinates, triangle count + indices,
// boundary edge count + (a, b, tag) rows.
void export_mesh(const Mesh& mesh, const std::string& path);

}  // namespace stokeshape
