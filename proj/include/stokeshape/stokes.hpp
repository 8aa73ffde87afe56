#pragma once

#include <functional>
#include <memory>

#include "stokeshape/assembly.hpp"
#include "stokeshape/control.hpp"
#include "stokeshape/exec.hpp"
#include "stokeshape/space.hpp"
#include "stokeshape/types.hpp"

namespace stokeshape {

using ScalarFieldFn = std::function<double(double, double)>;

// Scalar coefficient on the hold-all domain together with the y-derivatives
// needed by shape sensitivities (the domain deformation is vertical, so only
// d/dy enters).  Null derivative entries mean identically zero.
struct ScalarData {
  ScalarFieldFn value;
  ScalarFieldFn dy;
  ScalarFieldFn dyy;

  double at(double x, double y) const { return value ? value(x, y) : 0.0; }
  double at_dy(double x, double y) const { return dy ? dy(x, y) : 0.0; }
  double at_dyy(double x, double y) const { return dyy ? dyy(x, y) : 0.0; }
};

struct VectorData {
  VectorFieldFn value;
  VectorFieldFn dy;
  VectorFieldFn dyy;

  Vec2 at(double x, double y) const {
    return value ? value(x, y) : Vec2::Zero();
  }
  Vec2 at_dy(double x, double y) const {
    return dy ? dy(x, y) : Vec2::Zero();
  }
  Vec2 at_dyy(double x, double y) const {
    return dyy ? dyy(x, y) : Vec2::Zero();
  }
};

// Generalized Stokes data:  eta u - div(nu grad u) + grad p = f on the flow
// domain, with a Dirichlet inflow profile, a natural (traction) outflow
// datum, symmetry on top and no slip on the controlled wall.  Coefficients
// live on the hold-all domain and are composed with the map at quadrature
// points; the inflow and outflow sides are pointwise fixed by the map, so
// their data need no composition.
struct ProblemData {
  ScalarData eta;          // reaction coefficient, >= 0
  ScalarData nu;           // viscosity, >= nu0 > 0
  VectorData force;        // body force
  VectorFieldFn inflow;    // Dirichlet profile g_D on the inflow side
  VectorFieldFn traction;  // natural datum g_N on the outflow side
};

ProblemData make_constant_data(double eta, double nu);

// Default channel data: eta=0, nu=1, f=0, g_N=0 and the parabolic inflow
// profile g_D(y) = (y (2-y), 0) (no slip at the wall corner, flat at the
// symmetry axis).
ProblemData default_channel_data();

struct StateSolution {
  ControlFunction q;
  Vec velocity;  // total field, Dirichlet values included (2 per P2 node)
  Vec pressure;  // one per vertex

  std::shared_ptr<const AssembledOperator> op;  // pulled-back a/b blocks
  std::shared_ptr<SaddleSystem> system;         // factorization reused by
                                                // adjoint and sensitivities
  double solve_residual = 0.0;
  double divergence_residual = 0.0;  // max_k |(B u)_k| / max(1, |u|_inf)
};

// Pointwise coefficients of the pulled-back state operator:
//   mass = eta(T_q) gamma,  K = nu(T_q) A_q,  C = cof(DT_q).
CoefficientFn state_coefficients(const ControlFunction& q,
                                 const ProblemData& data);

// Assembles the state operator after validating nu > 0, eta >= 0 at the
// quadrature points (composed values).
std::shared_ptr<const AssembledOperator> assemble_state_operator(
    const ControlFunction& q, const ProblemData& data,
    const TaylorHoodSpace& space, Policy policy = Policy::Parallel);

// Nodal lifting: g_D at inflow-constrained dofs, zero at the other
// constrained dofs, zero at free dofs.
Vec state_dirichlet(const ProblemData& data, const TaylorHoodSpace& space);

// Velocity load: pulled-back body force gamma (f o T_q) plus the outflow
// boundary term.
Vec state_load(const ControlFunction& q, const ProblemData& data,
               const TaylorHoodSpace& space, Policy policy = Policy::Parallel);

// Assemble + solve; checks the discrete divergence identity (<= 1e-9 after
// normalization) and throws NumericalFailure on violation.
StateSolution solve_state(const ControlFunction& q, const ProblemData& data,
                          const TaylorHoodSpace& space,
                          Policy policy = Policy::Parallel);

// Gram operator of the pulled-back gradient product: A-block entries
// int grad(u_c) . A_q grad(v_c); B-block empty.  This is the kernel of the
// dissipation functional, the adjoint right-hand side and the volumetric
// derivative formulas.
std::shared_ptr<const AssembledOperator> assemble_gradient_gram(
    const ControlFunction& q, const TaylorHoodSpace& space,
    Policy policy = Policy::Parallel);

// Discrete inf-sup constant of the divergence form at control q: smallest
// generalized singular value of B restricted to the constrained velocity
// space, measured in the H^1-seminorm x L^2 metric (computed via the dense
// pressure Schur complement eigenproblem).
double estimate_infsup(const ControlFunction& q, const TaylorHoodSpace& space);

}  // namespace stokeshape
