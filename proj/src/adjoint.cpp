#include "stokeshape/adjoint.hpp"

#include <cmath>

namespace stokeshape {

AdjointSolution solve_adjoint(const ControlFunction& q,
                              const StateSolution& state,
                              const FunctionalSpec& spec,
                              const TaylorHoodSpace& space, Policy policy,
                              std::shared_ptr<const AssembledOperator> gram) {
  if (!state.system || !state.op)
    throw InvalidInput("adjoint requires a solved state");
  if (state.velocity.size() != space.num_vel_dofs)
    throw InvalidInput("state does not match the given space");
  if (state.q.grid().nodes != q.grid().nodes ||
      state.q.values() != q.values())
    throw InvalidInput("adjoint requires the state solved at the same control");
  spec.validate(space.num_vel_dofs);

  Vec w = state.velocity;
  if (spec.variant == Variant::PerimeterTracking) w -= *spec.target;

  if (!gram) gram = assemble_gradient_gram(q, space, policy);

  AdjointSolution adj;
  adj.variant = spec.variant;

  const Vec vel_load = 2.0 * (gram->A * w);
  const Vec p_load = Vec::Zero(space.num_pressure_dofs);
  const Vec rhs =
      state.system->constrained_rhs(vel_load, p_load, /*zero_dirichlet=*/true);
  const Vec x = state.system->solve(rhs);
  adj.solve_residual = state.system->last_residual();

  adj.z = x.head(space.num_vel_dofs);
  adj.s = x.tail(space.num_pressure_dofs);

  const double znorm = std::max(1.0, adj.z.lpNorm<Eigen::Infinity>());
  adj.divergence_residual =
      (state.op->B * adj.z).lpNorm<Eigen::Infinity>() / znorm;
  if (!(adj.divergence_residual <= 1e-9))
    throw NumericalFailure("adjoint divergence identity violated: " +
                           std::to_string(adj.divergence_residual));
  return adj;
}

}  // namespace stokeshape
