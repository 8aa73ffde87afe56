#pragma once

#include <memory>

#include "stokeshape/functional.hpp"
#include "stokeshape/stokes.hpp"

namespace stokeshape {

struct AdjointSolution {
  Variant variant = Variant::PerimeterEnergy;
  Vec z;  // velocity-sized dual field, zero at every constrained dof
  Vec s;  // pressure-sized dual field
  double solve_residual = 0.0;
  double divergence_residual = 0.0;
};

// Solves the pulled-back adjoint problem reusing the state factorization:
// find (z, s), homogeneous at all constrained velocity dofs, with
//   a(q)(v, z) + b(q)(v, s) = 2 int grad(w) . A_q grad(v)   for all free v
//   b(q)(z, pi) = 0                                         for all pi
// where w = u for the energy variants and w = u - u_d for tracking.  The
// saddle matrix is the state matrix (a symmetric, same b), so the state
// factorization solves it.
AdjointSolution solve_adjoint(
    const ControlFunction& q, const StateSolution& state,
    const FunctionalSpec& spec, const TaylorHoodSpace& space,
    Policy policy = Policy::Parallel,
    std::shared_ptr<const AssembledOperator> gram = nullptr);

}  // namespace stokeshape
