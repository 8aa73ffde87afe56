#pragma once

#include <memory>

#include "stokeshape/stokes.hpp"

namespace stokeshape {

// Solution of a linearized (shape-derivative) problem.  The velocity is
// homogeneous at every constrained dof: the boundary data do not depend on
// the control, so all derivative fields live in the constrained space.
struct SensitivitySolution {
  int order = 1;              // 1: direction; 2: mixed along (direction,
  ControlFunction direction;  //    direction2)
  ControlFunction direction2;
  Vec velocity;
  Vec pressure;
  double solve_residual = 0.0;
};

// Coefficients of the first-variation forms along dq (evaluated pointwise on
// the reference square, data composed at the mapped height):
//   mass = gamma (1-y) dq eta_y - dq eta
//   K    = nu A' + (1-y) dq nu_y A
//   C    = d/dt cof(DT) = [[-dq, -(1-y) dq'], [0, 0]]
CoefficientFn first_variation_coefficients(const ControlFunction& q,
                                           const ControlFunction& dq,
                                           const ProblemData& data);

// Mixed second-variation coefficients along (dq, tq); the pressure coupling
// is linear in the control, so C vanishes:
//   mass = gamma (1-y)^2 dq tq eta_yy - 2 (1-y) dq tq eta_y
//   K    = nu A'' + (1-y) nu_y (dq A'_t + tq A'_d) + (1-y)^2 dq tq nu_yy A
CoefficientFn second_variation_coefficients(const ControlFunction& q,
                                            const ControlFunction& dq,
                                            const ControlFunction& tq,
                                            const ProblemData& data);

// Derivatives of the pulled-back body-force load gamma (f o T_q):
//   first:  -dq f + gamma (1-y) dq f_y
//   mixed:  -2 (1-y) dq tq f_y + gamma (1-y)^2 dq tq f_yy
Vec first_variation_load(const ControlFunction& q, const ControlFunction& dq,
                         const ProblemData& data, const TaylorHoodSpace& space,
                         Policy policy = Policy::Parallel);
Vec second_variation_load(const ControlFunction& q, const ControlFunction& dq,
                          const ControlFunction& tq, const ProblemData& data,
                          const TaylorHoodSpace& space,
                          Policy policy = Policy::Parallel);

// First shape derivative (du, dp) of the state along dq, solved with the
// state factorization: the left-hand side is the state saddle operator, the
// right-hand side collects the dotted forms applied to the state.
SensitivitySolution solve_sensitivity(const ControlFunction& q,
                                      const ControlFunction& dq,
                                      const StateSolution& state,
                                      const ProblemData& data,
                                      const TaylorHoodSpace& space,
                                      Policy policy = Policy::Parallel);

// Mixed second shape derivative along (dq, tq); needs both first
// sensitivities.  Symmetric in the two directions.
SensitivitySolution solve_second_sensitivity(
    const ControlFunction& q, const ControlFunction& dq,
    const ControlFunction& tq, const StateSolution& state,
    const SensitivitySolution& sens_dq, const SensitivitySolution& sens_tq,
    const ProblemData& data, const TaylorHoodSpace& space,
    Policy policy = Policy::Parallel);

}  // namespace stokeshape
