#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "stokeshape/adjoint.hpp"
#include "stokeshape/control.hpp"
#include "stokeshape/functional.hpp"
#include "stokeshape/stokes.hpp"

namespace stokeshape {

// H1 representative of the boundary gradient density: solves
//   -Delta G + G = 0 in the reference square, G = 0 on the inflow, outflow
//   and symmetry sides, with the density as Neumann datum on the wall
// (weak form: int grad G . grad w + int G w = int_wall psi w), with P2
// scalars on the mesh of the given space.  The matrix does not depend on the
// control, so one factorization serves a whole optimization run.
class GradientProjector {
public:
  explicit GradientProjector(const TaylorHoodSpace& space);

  // P2 coefficients of the representative.
  Vec solve_field(const GradientDensity& density) const;

  // Wall trace of the representative interpolated onto the control grid.
  // Vanishes exactly at x = 0 and x = 1 (Dirichlet closure of the corners).
  ControlFunction project(const GradientDensity& density,
                          const ControlGrid& grid) const;

private:
  const TaylorHoodSpace& space_;
  std::vector<char> constrained_;
  Eigen::SimplicialLLT<SpMat> llt_;
};

// One-shot convenience wrapper around GradientProjector.
ControlFunction project_gradient(const GradientDensity& density,
                                 const TaylorHoodSpace& space,
                                 const ControlGrid& grid);

struct OptimizerConfig {
  double epsilon_hat = 0.1;  // initial trial step
  double epsilon_min = 1e-8;
  int max_iters = 100;
  double grad_tol = 0.0;  // optional L2 stop on the projected gradient
  FunctionalSpec spec;
  AdmissibilityParams admissibility;
  Policy policy = Policy::Parallel;

  void validate() const;
};

struct BacktrackingResult {
  ControlFunction q_new;
  double step_used = 0.0;
  bool accepted = false;   // descent achieved (j(q_new) <= j(q_old))
  int evaluations = 0;     // distinct trial evaluations
};

// Fixed-shrink line search along -g:
//   q_new = q_old - eps_hat g; while j(q_new) > j(q_old) and eps > eps_min:
//   recompute q_new at the current eps, then halve eps.
// The first in-loop trial repeats the head step; repeated steps are memoized
// so each distinct eps costs one evaluation.  Endpoint values of every trial
// are pinned back to zero.
BacktrackingResult backtracking_step(
    const ControlFunction& q_old, const ControlFunction& g, double j_old,
    const std::function<double(const ControlFunction&)>& eval_j,
    const OptimizerConfig& cfg);

struct IterationRecord {
  int iter = 0;
  ControlFunction q;
  FunctionalBreakdown j;
  double step = 0.0;       // accepted step (0 for the initial record)
  double grad_norm = 0.0;  // L2 norm of the projected gradient at q
  bool admissible = true;
  double divergence_residual = 0.0;
};

struct OptimizationHistory {
  std::vector<IterationRecord> records;  // records[0] is the starting point
  std::string stop_reason;  // "step", "maxIters", "gradTol", "stationary"
  double max_divergence_residual = 0.0;

  const IterationRecord& final_record() const { return records.back(); }
};

// Gradient descent on the functional: per iteration solve the state and the
// adjoint, evaluate the boundary gradient density, project it, and take a
// backtracking step.  Stops when the search bottoms out at epsilon_min, at
// the iteration cap, on the optional gradient tolerance, or when an accepted
// step leaves the control unchanged.  Accepted j values are non-increasing.
OptimizationHistory run_optimization(const ControlFunction& q0,
                                     const ProblemData& data,
                                     const OptimizerConfig& cfg,
                                     const TaylorHoodSpace& space);

}  // namespace stokeshape
