#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stokeshape/control.hpp"
#include "stokeshape/stokes.hpp"
#include "stokeshape/types.hpp"

namespace stokeshape {

struct AdjointSolution;      // adjoint.hpp
struct SensitivitySolution;  // sensitivity.hpp

// Cost functional variants:
//   CurvatureEnergy:   dissipation + alpha ||q''||^2          + volume penalty
//   PerimeterEnergy:   dissipation + alpha int sqrt(1+q'^2)   + volume penalty
//   PerimeterTracking: velocity misfit + (alpha/2) perimeter  + volume penalty
enum class Variant { CurvatureEnergy, PerimeterEnergy, PerimeterTracking };

// The published boundary-gradient formula pairs a gradient factor with a bare
// velocity factor; AsWritten evaluates that literal form, GradientCorrected
// the dimensionally consistent one.  The finite-difference duality check in
// the test suite selects GradientCorrected, which is the default.
enum class GradientForm { AsWritten, GradientCorrected };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);
std::string gradient_form_name(GradientForm f);
GradientForm parse_gradient_form(const std::string& name);

struct FunctionalSpec {
  Variant variant = Variant::PerimeterEnergy;
  double alpha = 0.0;
  double beta = 0.0;
  double vbar = 0.0;
  std::shared_ptr<const Vec> target;  // u_d velocity coefficients; tracking only
  GradientForm gradient_form = GradientForm::GradientCorrected;

  void validate(int num_vel_dofs = -1) const;

  // Weight of the perimeter length term: alpha, or alpha/2 for tracking.
  double perimeter_weight() const;
};

struct FunctionalBreakdown {
  double total = 0.0;
  double flow = 0.0;            // dissipation or tracking misfit
  double regularization = 0.0;  // curvature or perimeter term
  double volume = 0.0;          // beta (int q - vbar)^2
};

// Evaluates j(q) term by term.  The flow term is w^T G w with G the gradient
// Gram operator and w the velocity (or velocity minus target); pass a
// precomputed G to skip its assembly.
FunctionalBreakdown eval_functional(
    const ControlFunction& q, const StateSolution& state,
    const FunctionalSpec& spec, const TaylorHoodSpace& space,
    Policy policy = Policy::Parallel,
    std::shared_ptr<const AssembledOperator> gram = nullptr);

// Shape-gradient density on the control interval.
//
// sample_* hold the boundary density at the wall trace quadrature points
// (4 Gauss points per bottom edge, weights in the dx measure summing to 1):
// sample_flow is the normal-derivative product term alone, sample_total adds
// the volume-penalty constant and, for perimeter variants, the pointwise
// curvature-of-graph term.  on_grid is the L2 projection of sample_total
// onto piecewise-linear functions on the control grid.
//
// The curvature-variant regularization has no L2 density (it pairs second
// derivatives); it is excluded from the samples and handled exactly in
// inner().
struct GradientDensity {
  Variant variant = Variant::PerimeterEnergy;
  double alpha = 0.0;
  double beta = 0.0;
  double vbar = 0.0;
  ControlFunction q;

  std::vector<double> sample_x;
  std::vector<double> sample_weight;
  std::vector<double> sample_flow;
  std::vector<double> sample_total;

  ControlFunction on_grid;

  // Full duality pairing <grad j, dq>: flow part by trace quadrature, volume
  // and regularization parts by their exact discrete derivatives.
  double inner(const ControlFunction& dq) const;
};

// Evaluates the Hadamard boundary density from the state and adjoint traces.
// The flow part at a wall point with physical unit outward normal
// n = (q', -1)/sqrt(1+q'^2) is
//   dn(w) . (dn(w) - nu dn(z)),   dn(v) = (grad v) DT^{-1} n
// with w = u (energy) or u - u_d (tracking); AsWritten instead evaluates the
// published expression verbatim.  Needs the problem data for nu at the wall.
GradientDensity eval_gradient_density(const ControlFunction& q,
                                      const StateSolution& state,
                                      const AdjointSolution& adjoint,
                                      const FunctionalSpec& spec,
                                      const ProblemData& data,
                                      const TaylorHoodSpace& space);

// Gradient density assembled from the exact discrete derivative.  The dual
// vector d_j = (d/dt) j_flow(q + t B_j)|_{t=0} over the control basis is
// accumulated in one volume sweep via the adjoint identity (no sensitivity
// solves), then L2-represented on the control grid with the endpoint values
// pinned to zero.  Its pairing with any control-grid direction that vanishes
// at the endpoints reproduces the volumetric derivative to roundoff, which
// the boundary-trace formula of eval_gradient_density only approaches at
// O(h^2) with an O(1) constant.  This is the density the optimizer descends
// on; sample layout matches eval_gradient_density, so inner() and the
// gradient projector apply unchanged.
GradientDensity eval_gradient_dual(const ControlFunction& q,
                                   const StateSolution& state,
                                   const AdjointSolution& adjoint,
                                   const FunctionalSpec& spec,
                                   const ProblemData& data,
                                   const TaylorHoodSpace& space,
                                   Policy policy = Policy::Parallel);

// Volumetric first derivative: w^T G(A') w + 2 du^T G(A) w plus the exact
// regularization and volume derivatives.
double eval_directional_derivative(
    const ControlFunction& q, const ControlFunction& dq,
    const StateSolution& state, const SensitivitySolution& sens,
    const FunctionalSpec& spec, const TaylorHoodSpace& space,
    Policy policy = Policy::Parallel,
    std::shared_ptr<const AssembledOperator> gram = nullptr);

// Volumetric second derivative along (dq, tq), using both first sensitivities
// and the mixed second sensitivity.
double eval_second_derivative(
    const ControlFunction& q, const ControlFunction& dq,
    const ControlFunction& tq, const StateSolution& state,
    const SensitivitySolution& sens_dq, const SensitivitySolution& sens_tq,
    const SensitivitySolution& sens2, const FunctionalSpec& spec,
    const TaylorHoodSpace& space, Policy policy = Policy::Parallel,
    std::shared_ptr<const AssembledOperator> gram = nullptr);

// Exact derivatives of the perimeter length functional int sqrt(1+q'^2):
// first variation int q' dq' / sqrt(1+q'^2) and second variation
// int dq' tq' / (1+q'^2)^{3/2}, by per-cell Gauss quadrature on the union
// grid (exact for piecewise-linear arguments).
double perimeter_first_variation(const ControlFunction& q,
                                 const ControlFunction& dq);
double perimeter_second_variation(const ControlFunction& q,
                                  const ControlFunction& dq,
                                  const ControlFunction& tq);

// The length functional itself, by the same quadrature (exact for degree 1).
double perimeter_length(const ControlFunction& q);

}  // namespace stokeshape
