#pragma once

#include <functional>
#include <memory>

#include "stokeshape/exec.hpp"
#include "stokeshape/space.hpp"
#include "stokeshape/types.hpp"

namespace stokeshape {

// Pointwise kernel of a velocity-velocity / pressure-velocity form pair at a
// reference point (x,y):
//
//   a-contribution:  mass * (u . v) + sum_c grad(u_c)^T K grad(v_c)
//   b-contribution:  -pi * (grad v : C)
//
// All pullback forms used here (state, first and second variations) fit this
// shape with different (mass, K, C).
struct FormCoefficients {
  double mass = 0.0;
  Mat2 K = Mat2::Zero();
  Mat2 C = Mat2::Zero();
};

using CoefficientFn = std::function<FormCoefficients(double, double)>;
using VectorFieldFn = std::function<Vec2(double, double)>;

// Unconstrained form matrices: A is velocity x velocity, B pressure x velocity.
struct AssembledOperator {
  SpMat A;
  SpMat B;
};

AssembledOperator assemble_operator(const TaylorHoodSpace& space,
                                    const CoefficientFn& coef, Policy policy);

// Volume load sum_c int F_c v_c (F already carries any pullback weight).
Vec assemble_load(const TaylorHoodSpace& space, const VectorFieldFn& field,
                  Policy policy);

// Boundary load int_side g . v on the side with the given tag.
Vec assemble_boundary_load(const TaylorHoodSpace& space, int tag,
                           const VectorFieldFn& field);

// Pressure-pressure mass matrix (P1).
SpMat assemble_pressure_mass(const TaylorHoodSpace& space);

// Saddle system [[A, B^T], [B, 0]] with symmetric elimination of Dirichlet
// velocity dofs: constrained rows/columns carry the identity and the solution
// vector holds the prescribed values there (the nodal lifting of gD).
class SaddleSystem {
public:
  SaddleSystem(const TaylorHoodSpace& space,
               std::shared_ptr<const AssembledOperator> op, Vec dirichlet);

  int nv() const { return nv_; }
  int np() const { return np_; }
  const AssembledOperator& op() const { return *op_; }
  const Vec& dirichlet() const { return dirichlet_; }
  const std::vector<TaylorHoodSpace::VelBC>& vel_bc() const { return vel_bc_; }

  // Assemble the constrained right-hand side from raw load functionals:
  // free velocity rows get vel_load - A*d, pressure rows p_load - B*d,
  // constrained rows the prescribed value.  For homogeneous problems
  // (adjoint, sensitivities) pass zero_dirichlet = true so constrained rows
  // are zero.
  Vec constrained_rhs(const Vec& vel_load, const Vec& p_load,
                      bool zero_dirichlet = false) const;

  // Direct sparse solve with relative residual check (<= tol); factorization
  // is computed once and reused across right-hand sides.
  Vec solve(const Vec& rhs, double tol = 1e-10);

  double last_residual() const { return last_residual_; }

private:
  int nv_ = 0, np_ = 0;
  std::shared_ptr<const AssembledOperator> op_;
  Vec dirichlet_;
  std::vector<TaylorHoodSpace::VelBC> vel_bc_;
  SpMat K_;
  std::shared_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu_;
  bool factorized_ = false;
  double last_residual_ = 0.0;
};

}  // namespace stokeshape
