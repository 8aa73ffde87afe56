#pragma once

#include <vector>

#include "stokeshape/types.hpp"

namespace stokeshape {

// Quadrature on the reference triangle {(r,s): r,s >= 0, r+s <= 1}.
// Weights sum to 1 and must be scaled by the physical element area.
struct TriangleRule {
  struct Point {
    double r, s, w;
  };
  std::vector<Point> points;
};

// Six-point rule, exact through polynomial degree 4.
const TriangleRule& triangle_rule_deg4();

// Gauss-Legendre rule on [0,1], weights summing to 1.
struct EdgeRule {
  struct Point {
    double t, w;
  };
  std::vector<Point> points;
};

// Four points, exact through degree 7.
const EdgeRule& edge_rule_deg7();

}  // namespace stokeshape
