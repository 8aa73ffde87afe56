#include "stokeshape/sensitivity.hpp"

#include "stokeshape/geometry.hpp"

namespace stokeshape {

namespace {

void check_state(const ControlFunction& q, const StateSolution& state,
                 const TaylorHoodSpace& space) {
  if (!state.system || !state.op)
    throw InvalidInput("sensitivity requires a solved state");
  if (state.velocity.size() != space.num_vel_dofs)
    throw InvalidInput("state does not match the given space");
  if (state.q.grid().nodes != q.grid().nodes ||
      state.q.values() != q.values())
    throw InvalidInput(
        "sensitivity requires the state solved at the same control");
}

}  // namespace

CoefficientFn first_variation_coefficients(const ControlFunction& q,
                                           const ControlFunction& dq,
                                           const ProblemData& data) {
  return [&q, &dq, &data](double x, double y) {
    const MapFirstVariation var = map_first_variation(q, dq, x, y);
    const MapQuantities m = map_quantities(q, x, y);
    const double d = dq.eval(x);
    const double oy = 1.0 - y;
    const double yt = y + oy * q.eval(x);

    FormCoefficients fc;
    fc.mass = m.gamma * oy * d * data.eta.at_dy(x, yt) - d * data.eta.at(x, yt);
    fc.K = data.nu.at(x, yt) * var.A_dot +
           oy * d * data.nu.at_dy(x, yt) * m.A;
    fc.C = var.cof_DV;
    return fc;
  };
}

CoefficientFn second_variation_coefficients(const ControlFunction& q,
                                            const ControlFunction& dq,
                                            const ControlFunction& tq,
                                            const ProblemData& data) {
  return [&q, &dq, &tq, &data](double x, double y) {
    const MapQuantities m = map_quantities(q, x, y);
    const MapFirstVariation var_d = map_first_variation(q, dq, x, y);
    const MapFirstVariation var_t = map_first_variation(q, tq, x, y);
    const MapSecondVariation var2 = map_second_variation(q, dq, tq, x, y);
    const double d = dq.eval(x);
    const double t = tq.eval(x);
    const double oy = 1.0 - y;
    const double yt = y + oy * q.eval(x);

    FormCoefficients fc;
    fc.mass = m.gamma * oy * oy * d * t * data.eta.at_dyy(x, yt) -
              2.0 * oy * d * t * data.eta.at_dy(x, yt);
    fc.K = data.nu.at(x, yt) * var2.A_ddot +
           oy * data.nu.at_dy(x, yt) * (d * var_t.A_dot + t * var_d.A_dot) +
           oy * oy * d * t * data.nu.at_dyy(x, yt) * m.A;
    // cof(DT) is linear in the control: no second-variation coupling.
    return fc;
  };
}

Vec first_variation_load(const ControlFunction& q, const ControlFunction& dq,
                         const ProblemData& data, const TaylorHoodSpace& space,
                         Policy policy) {
  if (!data.force.value) return Vec::Zero(space.num_vel_dofs);
  auto field = [&q, &dq, &data](double x, double y) -> Vec2 {
    const double gamma = 1.0 - q.eval(x);
    const double oy = 1.0 - y;
    const double yt = y + oy * q.eval(x);
    const double d = dq.eval(x);
    return -d * data.force.at(x, yt) + gamma * oy * d * data.force.at_dy(x, yt);
  };
  return assemble_load(space, field, policy);
}

Vec second_variation_load(const ControlFunction& q, const ControlFunction& dq,
                          const ControlFunction& tq, const ProblemData& data,
                          const TaylorHoodSpace& space, Policy policy) {
  if (!data.force.value) return Vec::Zero(space.num_vel_dofs);
  auto field = [&q, &dq, &tq, &data](double x, double y) -> Vec2 {
    const double gamma = 1.0 - q.eval(x);
    const double oy = 1.0 - y;
    const double yt = y + oy * q.eval(x);
    const double d = dq.eval(x);
    const double t = tq.eval(x);
    return -2.0 * oy * d * t * data.force.at_dy(x, yt) +
           gamma * oy * oy * d * t * data.force.at_dyy(x, yt);
  };
  return assemble_load(space, field, policy);
}

SensitivitySolution solve_sensitivity(const ControlFunction& q,
                                      const ControlFunction& dq,
                                      const StateSolution& state,
                                      const ProblemData& data,
                                      const TaylorHoodSpace& space,
                                      Policy policy) {
  check_state(q, state, space);

  const AssembledOperator dot = assemble_operator(
      space, first_variation_coefficients(q, dq, data), policy);

  Vec rhs_v = first_variation_load(q, dq, data, space, policy);
  rhs_v -= dot.A * state.velocity;
  rhs_v -= dot.B.transpose() * state.pressure;
  const Vec rhs_p = -(dot.B * state.velocity);

  const Vec rhs =
      state.system->constrained_rhs(rhs_v, rhs_p, /*zero_dirichlet=*/true);
  const Vec x = state.system->solve(rhs);

  SensitivitySolution sens;
  sens.order = 1;
  sens.direction = dq;
  sens.velocity = x.head(space.num_vel_dofs);
  sens.pressure = x.tail(space.num_pressure_dofs);
  sens.solve_residual = state.system->last_residual();
  return sens;
}

SensitivitySolution solve_second_sensitivity(
    const ControlFunction& q, const ControlFunction& dq,
    const ControlFunction& tq, const StateSolution& state,
    const SensitivitySolution& sens_dq, const SensitivitySolution& sens_tq,
    const ProblemData& data, const TaylorHoodSpace& space, Policy policy) {
  check_state(q, state, space);
  if (sens_dq.velocity.size() != space.num_vel_dofs ||
      sens_tq.velocity.size() != space.num_vel_dofs)
    throw InvalidInput("first sensitivities do not match the given space");

  const AssembledOperator ddot = assemble_operator(
      space, second_variation_coefficients(q, dq, tq, data), policy);
  const AssembledOperator dot_d = assemble_operator(
      space, first_variation_coefficients(q, dq, data), policy);
  const AssembledOperator dot_t = assemble_operator(
      space, first_variation_coefficients(q, tq, data), policy);

  Vec rhs_v = second_variation_load(q, dq, tq, data, space, policy);
  rhs_v -= ddot.A * state.velocity;
  rhs_v -= dot_d.A * sens_tq.velocity;
  rhs_v -= dot_t.A * sens_dq.velocity;
  rhs_v -= dot_d.B.transpose() * sens_tq.pressure;
  rhs_v -= dot_t.B.transpose() * sens_dq.pressure;
  const Vec rhs_p =
      -(dot_d.B * sens_tq.velocity) - (dot_t.B * sens_dq.velocity);

  const Vec rhs =
      state.system->constrained_rhs(rhs_v, rhs_p, /*zero_dirichlet=*/true);
  const Vec x = state.system->solve(rhs);

  SensitivitySolution sens;
  sens.order = 2;
  sens.direction = dq;
  sens.direction2 = tq;
  sens.velocity = x.head(space.num_vel_dofs);
  sens.pressure = x.tail(space.num_pressure_dofs);
  sens.solve_residual = state.system->last_residual();
  return sens;
}

}  // namespace stokeshape
