#include "stokeshape/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "stokeshape/quadrature.hpp"

namespace stokeshape {

GradientProjector::GradientProjector(const TaylorHoodSpace& space)
    : space_(space) {
  const int nn = space.num_p2_nodes;
  constrained_.assign(nn, 0);
  for (int node = 0; node < nn; ++node) {
    if (space.node_on_side(node, Gamma1) || space.node_on_side(node, Gamma2) ||
        space.node_on_side(node, Gamma3))
      constrained_[node] = 1;
  }

  const auto& rule = triangle_rule_deg4();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(space.mesh.triangles.size()) * 36 + nn);

  const int ntri = static_cast<int>(space.mesh.triangles.size());
  for (int tri = 0; tri < ntri; ++tri) {
    const auto& t = space.mesh.triangles[tri];
    const Vec2 v0 = space.mesh.vertices[t[0]];
    const Vec2 e1 = space.mesh.vertices[t[1]] - v0;
    const Vec2 e2 = space.mesh.vertices[t[2]] - v0;
    Mat2 J;
    J << e1.x(), e2.x(), e1.y(), e2.y();
    const double area = 0.5 * std::abs(J.determinant());
    const Mat2 JinvT = J.inverse().transpose();

    double loc[6][6] = {};
    for (const auto& qp : rule.points) {
      double val[6], gref[6][2];
      p2_shapes(qp.r, qp.s, val, gref);
      Vec2 g[6];
      for (int a = 0; a < 6; ++a) g[a] = JinvT * Vec2(gref[a][0], gref[a][1]);
      const double w = qp.w * 2.0 * area;
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          loc[a][b] += w * (g[a].dot(g[b]) + val[a] * val[b]);
    }
    const auto& dofs = space.element_p2[tri];
    for (int a = 0; a < 6; ++a) {
      if (constrained_[dofs[a]]) continue;
      for (int b = 0; b < 6; ++b) {
        if (constrained_[dofs[b]]) continue;
        trips.emplace_back(dofs[a], dofs[b], loc[a][b]);
      }
    }
  }
  for (int node = 0; node < nn; ++node)
    if (constrained_[node]) trips.emplace_back(node, node, 1.0);

  SpMat H(nn, nn);
  H.setFromTriplets(trips.begin(), trips.end());
  H.makeCompressed();
  llt_.compute(H);
  if (llt_.info() != Eigen::Success)
    throw NumericalFailure("gradient projection matrix factorization failed");
}

Vec GradientProjector::solve_field(const GradientDensity& density) const {
  const int n = space_.n;
  Vec rhs = Vec::Zero(space_.num_p2_nodes);
  for (size_t s = 0; s < density.sample_x.size(); ++s) {
    const double x = density.sample_x[s];
    int cell = std::clamp(static_cast<int>(x * n), 0, n - 1);
    const double t = x * n - cell;
    const double sa = (1.0 - t) * (1.0 - 2.0 * t);
    const double sm = 4.0 * t * (1.0 - t);
    const double sb = t * (2.0 * t - 1.0);
    const double wv = density.sample_weight[s] * density.sample_total[s];
    rhs[space_.p2_node_at(2 * cell, 0)] += wv * sa;
    rhs[space_.p2_node_at(2 * cell + 1, 0)] += wv * sm;
    rhs[space_.p2_node_at(2 * cell + 2, 0)] += wv * sb;
  }
  for (int node = 0; node < space_.num_p2_nodes; ++node)
    if (constrained_[node]) rhs[node] = 0.0;

  Vec field = llt_.solve(rhs);
  if (llt_.info() != Eigen::Success)
    throw NumericalFailure("gradient projection solve failed");
  return field;
}

ControlFunction GradientProjector::project(const GradientDensity& density,
                                           const ControlGrid& grid) const {
  const Vec field = solve_field(density);
  std::vector<double> values(grid.nodes.size());
  for (size_t i = 0; i < grid.nodes.size(); ++i)
    values[i] = eval_scalar_on_gamma0(space_, field, grid.nodes[i]);
  values.front() = 0.0;
  values.back() = 0.0;
  return ControlFunction(grid, 1, std::move(values));
}

ControlFunction project_gradient(const GradientDensity& density,
                                 const TaylorHoodSpace& space,
                                 const ControlGrid& grid) {
  return GradientProjector(space).project(density, grid);
}

void OptimizerConfig::validate() const {
  if (!(epsilon_min > 0.0) || !(epsilon_hat > epsilon_min))
    throw InvalidInput("need 0 < epsilonMin < epsilonHat");
  if (max_iters < 1) throw InvalidInput("maxIters must be positive");
  spec.validate();
}

BacktrackingResult backtracking_step(
    const ControlFunction& q_old, const ControlFunction& g, double j_old,
    const std::function<double(const ControlFunction&)>& eval_j,
    const OptimizerConfig& cfg) {
  cfg.validate();

  auto make_trial = [&](double eps) {
    ControlFunction trial = q_old + g.scaled(-eps);
    trial.values().front() = 0.0;
    trial.values().back() = 0.0;
    return trial;
  };

  BacktrackingResult out;
  std::vector<std::pair<double, double>> memo;
  auto j_at = [&](const ControlFunction& trial, double eps) {
    for (const auto& m : memo)
      if (m.first == eps) return m.second;
    const double j = eval_j(trial);
    memo.emplace_back(eps, j);
    ++out.evaluations;
    return j;
  };

  double eps = cfg.epsilon_hat;
  out.q_new = make_trial(eps);
  out.step_used = eps;
  double j_new = j_at(out.q_new, eps);
  // The loop re-tries with the current eps before halving, so the first
  // in-loop trial repeats the head trial (memoized above).
  while (j_new > j_old && eps > cfg.epsilon_min) {
    out.q_new = make_trial(eps);
    out.step_used = eps;
    j_new = j_at(out.q_new, eps);
    eps *= 0.5;
  }
  out.accepted = j_new <= j_old;
  return out;
}

OptimizationHistory run_optimization(const ControlFunction& q0,
                                     const ProblemData& data,
                                     const OptimizerConfig& cfg,
                                     const TaylorHoodSpace& space) {
  cfg.validate();
  cfg.spec.validate(space.num_vel_dofs);
  if (cfg.spec.variant == Variant::CurvatureEnergy)
    throw InvalidInput(
        "the curvature-regularized variant has no boundary gradient density; "
        "optimize with a perimeter variant");

  ControlFunction q =
      q0.degree() == 1
          ? q0
          : interpolate_control([&q0](double x) { return q0.eval(x); },
                                q0.grid(), 1);

  GradientProjector projector(space);
  OptimizationHistory hist;

  StateSolution state = solve_state(q, data, space, cfg.policy);
  auto gram = assemble_gradient_gram(q, space, cfg.policy);
  FunctionalBreakdown jb =
      eval_functional(q, state, cfg.spec, space, cfg.policy, gram);

  double last_step = 0.0;
  for (int iter = 0;; ++iter) {
    const AdjointSolution adj =
        solve_adjoint(q, state, cfg.spec, space, cfg.policy, gram);
    const GradientDensity density =
        eval_gradient_dual(q, state, adj, cfg.spec, data, space, cfg.policy);
    const ControlFunction g = projector.project(density, q.grid());
    const double gnorm = control_l2_norm(g);

    IterationRecord rec;
    rec.iter = iter;
    rec.q = q;
    rec.j = jb;
    rec.step = last_step;
    rec.grad_norm = gnorm;
    rec.admissible = check_admissible(q, cfg.admissibility).admissible();
    rec.divergence_residual = state.divergence_residual;
    hist.max_divergence_residual =
        std::max(hist.max_divergence_residual, state.divergence_residual);
    hist.records.push_back(std::move(rec));

    if (cfg.grad_tol > 0.0 && gnorm <= cfg.grad_tol) {
      hist.stop_reason = "gradTol";
      break;
    }
    if (iter >= cfg.max_iters) {
      hist.stop_reason = "maxIters";
      break;
    }

    // The last evaluated trial is the returned one, so its state can be
    // reused for the next iteration.
    struct TrialCache {
      std::vector<double> values;
      StateSolution state;
      FunctionalBreakdown j;
      bool valid = false;
    } cache;
    // A trial that leaves the solvable set (degenerate map, failed solve)
    // scores +inf so the search simply keeps halving the step.
    auto eval_trial = [&](const ControlFunction& trial) {
      cache.valid = false;
      StateSolution ts;
      try {
        ts = solve_state(trial, data, space, cfg.policy);
      } catch (const InvalidInput&) {
        return std::numeric_limits<double>::infinity();
      } catch (const NumericalFailure&) {
        return std::numeric_limits<double>::infinity();
      }
      FunctionalBreakdown tb =
          eval_functional(trial, ts, cfg.spec, space, cfg.policy);
      cache.values = trial.values();
      cache.state = std::move(ts);
      cache.j = tb;
      cache.valid = true;
      return tb.total;
    };

    const BacktrackingResult bt =
        backtracking_step(q, g, jb.total, eval_trial, cfg);
    if (!bt.accepted) {
      hist.stop_reason = "step";
      break;
    }
    const bool stationary = q.max_nodal_difference(bt.q_new) == 0.0;
    q = bt.q_new;
    last_step = bt.step_used;
    if (cache.valid && cache.values == q.values()) {
      state = std::move(cache.state);
      jb = cache.j;
    } else {
      state = solve_state(q, data, space, cfg.policy);
      jb = eval_functional(q, state, cfg.spec, space, cfg.policy);
    }
    hist.max_divergence_residual =
        std::max(hist.max_divergence_residual, state.divergence_residual);
    gram = assemble_gradient_gram(q, space, cfg.policy);

    if (stationary) {
      hist.stop_reason = "stationary";
      break;
    }
  }
  return hist;
}

}  // namespace stokeshape
