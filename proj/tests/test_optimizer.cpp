#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <limits>
#include <memory>

#include "stokeshape/adjoint.hpp"
#include "stokeshape/control.hpp"
#include "stokeshape/functional.hpp"
#include "stokeshape/optimizer.hpp"
#include "stokeshape/space.hpp"
#include "stokeshape/stokes.hpp"

using namespace stokeshape;

namespace {

OptimizerConfig serial_config() {
  OptimizerConfig cfg;
  cfg.policy = Policy::Serial;
  cfg.spec.variant = Variant::PerimeterEnergy;
  return cfg;
}

std::shared_ptr<const Vec> bump_state_velocity(const TaylorHoodSpace& sp) {
  ControlGrid grid = make_uniform_grid(sp.n);
  ControlFunction qd = make_preset(ControlPreset::CosineBump, grid, 1);
  StateSolution sd = solve_state(qd, default_channel_data(), sp,
                                 Policy::Serial);
  return std::make_shared<Vec>(sd.velocity);
}

OptimizerConfig tracking_config(const TaylorHoodSpace& sp, int max_iters) {
  OptimizerConfig cfg = serial_config();
  cfg.spec.variant = Variant::PerimeterTracking;
  cfg.spec.target = bump_state_velocity(sp);
  cfg.max_iters = max_iters;
  return cfg;
}

void check_monotone(const OptimizationHistory& hist) {
  for (size_t i = 1; i < hist.records.size(); ++i)
    CHECK(hist.records[i].j.total <= hist.records[i - 1].j.total);
  for (const auto& rec : hist.records) CHECK(rec.admissible);
  CHECK(hist.max_divergence_residual <= 1e-9);
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("backtracking accepts the head step on a quadratic model") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 1);
  int calls = 0;
  auto eval_j = [&calls](const ControlFunction& c) {
    ++calls;
    const double nrm = control_l2_norm(c);
    return nrm * nrm;
  };
  OptimizerConfig cfg = serial_config();
  const double j_old = control_l2_norm(q) * control_l2_norm(q);
  BacktrackingResult r = backtracking_step(q, q, j_old, eval_j, cfg);
  CHECK(r.accepted);
  CHECK(r.step_used == cfg.epsilon_hat);
  CHECK(r.evaluations == 1);
  CHECK(calls == 1);
  // q_new = (1 - eps) q
  CHECK(r.q_new.max_nodal_difference(q.scaled(1.0 - cfg.epsilon_hat)) <=
        1e-14);
}

TEST_CASE("backtracking with a zero gradient keeps the point") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 1);
  ControlFunction zero = make_preset(ControlPreset::Flat, grid, 1);
  auto eval_j = [](const ControlFunction& c) { return control_l2_norm(c); };
  BacktrackingResult r = backtracking_step(q, zero, control_l2_norm(q), eval_j,
                                           serial_config());
  CHECK(r.accepted);
  CHECK(r.q_new.max_nodal_difference(q) == 0.0);
}

TEST_CASE("backtracking gives up at the minimum step without re-evaluating") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 1);
  int calls = 0;
  auto eval_j = [&calls](const ControlFunction&) {
    ++calls;
    return 1e9;  // every trial is worse
  };
  BacktrackingResult r = backtracking_step(q, q, 1.0, eval_j, serial_config());
  CHECK(!r.accepted);
  // distinct steps from 0.1 down to epsilon_min, each evaluated exactly once
  CHECK(r.evaluations == calls);
  CHECK(r.evaluations >= 20);
  CHECK(r.evaluations <= 32);
}

TEST_CASE("trial controls are re-pinned at the endpoints") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Flat, grid, 1);
  // gradient with nonzero endpoint values
  ControlFunction g(grid, 1, std::vector<double>(grid.nodes.size(), -0.5));
  auto eval_j = [](const ControlFunction& c) { return -c.integral(); };
  BacktrackingResult r = backtracking_step(q, g, 0.0, eval_j, serial_config());
  CHECK(r.accepted);
  CHECK(r.q_new.values().front() == 0.0);
  CHECK(r.q_new.values().back() == 0.0);
  CHECK(r.q_new.values()[4] == doctest::Approx(0.05).epsilon(1e-13));
}

TEST_CASE("projected gradient is a descent direction with pinned endpoints") {
  TaylorHoodSpace sp = build_space(build_mesh(8));
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 1);
  ProblemData data = default_channel_data();
  StateSolution state = solve_state(q, data, sp, Policy::Serial);
  FunctionalSpec spec;
  spec.variant = Variant::PerimeterEnergy;
  AdjointSolution adj = solve_adjoint(q, state, spec, sp, Policy::Serial);
  GradientDensity den = eval_gradient_dual(q, state, adj, spec, data, sp,
                                           Policy::Serial);

  GradientProjector projector(sp);
  ControlFunction g = projector.project(den, grid);
  CHECK(g.values().front() == 0.0);
  CHECK(g.values().back() == 0.0);
  // pairing the density with its own H1 representative must be positive,
  // otherwise -g would not descend
  CHECK(den.inner(g) > 0.0);

  // the projected control is the wall trace of the P2 representative
  Vec field = projector.solve_field(den);
  for (size_t k = 0; k < grid.nodes.size(); ++k)
    CHECK(g.values()[k] ==
          doctest::Approx(eval_scalar_on_gamma0(sp, field, grid.nodes[k]))
              .epsilon(1e-12));

  // one-shot wrapper agrees
  ControlFunction g2 = project_gradient(den, sp, grid);
  CHECK(g.max_nodal_difference(g2) == 0.0);
}

TEST_CASE("tracking descent recovers most of the misfit") {
  TaylorHoodSpace sp = build_space(build_mesh(8));
  OptimizerConfig cfg = tracking_config(sp, 10);
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q0 = make_preset(ControlPreset::Flat, grid, 1);
  OptimizationHistory hist = run_optimization(q0, default_channel_data(), cfg,
                                              sp);
  check_monotone(hist);
  CHECK(hist.records[0].step == 0.0);
  CHECK(hist.records[0].grad_norm > 0.0);
  CHECK(hist.final_record().j.total < 0.05 * hist.records[0].j.total);
}

TEST_CASE("perimeter-energy descent is monotone and admissible") {
  TaylorHoodSpace sp = build_space(build_mesh(8));
  OptimizerConfig cfg = serial_config();
  cfg.spec.alpha = 10.0;
  cfg.spec.beta = 1e4;
  cfg.spec.vbar = 0.0933;
  cfg.max_iters = 8;
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q0 = make_preset(ControlPreset::Flat, grid, 1);
  OptimizationHistory hist = run_optimization(q0, default_channel_data(), cfg,
                                              sp);
  check_monotone(hist);
  CHECK(hist.final_record().j.total < hist.records[0].j.total);
  // the volume penalty drags the wall towards the target area
  CHECK(std::abs(hist.final_record().q.integral() - cfg.spec.vbar) <
        std::abs(hist.records[0].q.integral() - cfg.spec.vbar));
}

TEST_CASE("oversized head steps fall back to feasible ones") {
  TaylorHoodSpace sp = build_space(build_mesh(8));
  OptimizerConfig cfg = tracking_config(sp, 4);
  cfg.epsilon_hat = 10.0;  // first trials leave the admissible set
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q0 = make_preset(ControlPreset::Flat, grid, 1);
  OptimizationHistory hist = run_optimization(q0, default_channel_data(), cfg,
                                              sp);
  check_monotone(hist);
  CHECK(hist.records.size() > 1);
  CHECK(hist.final_record().j.total < hist.records[0].j.total);
}

TEST_CASE("gradient tolerance stops immediately when slack") {
  TaylorHoodSpace sp = build_space(build_mesh(8));
  OptimizerConfig cfg = tracking_config(sp, 10);
  cfg.grad_tol = 1e9;
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q0 = make_preset(ControlPreset::Flat, grid, 1);
  OptimizationHistory hist = run_optimization(q0, default_channel_data(), cfg,
                                              sp);
  CHECK(hist.stop_reason == "gradTol");
  CHECK(hist.records.size() == 1);
}

TEST_CASE("curvature variant is rejected by the optimizer") {
  OptimizerConfig cfg = serial_config();
  cfg.spec.variant = Variant::CurvatureEnergy;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);

  TaylorHoodSpace sp = build_space(build_mesh(4));
  ControlGrid grid = make_uniform_grid(4);
  ControlFunction q0 = make_preset(ControlPreset::Flat, grid, 1);
  CHECK_THROWS_AS(run_optimization(q0, default_channel_data(), cfg, sp),
                  InvalidInput);

  OptimizerConfig bad = serial_config();
  bad.epsilon_hat = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("runs are deterministic and policy independent") {
#ifdef _OPENMP
  omp_set_num_threads(2);
#endif
  TaylorHoodSpace sp = build_space(build_mesh(8));
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q0 = make_preset(ControlPreset::Flat, grid, 1);

  OptimizerConfig cfg = tracking_config(sp, 3);
  OptimizationHistory a = run_optimization(q0, default_channel_data(), cfg,
                                           sp);
  OptimizationHistory b = run_optimization(q0, default_channel_data(), cfg,
                                           sp);
  OptimizerConfig par = cfg;
  par.policy = Policy::Parallel;
  OptimizationHistory c = run_optimization(q0, default_channel_data(), par,
                                           sp);
  REQUIRE(a.records.size() == b.records.size());
  REQUIRE(a.records.size() == c.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].j.total == b.records[i].j.total);
    CHECK(a.records[i].j.total == c.records[i].j.total);
    CHECK(a.records[i].q.max_nodal_difference(b.records[i].q) == 0.0);
    CHECK(a.records[i].q.max_nodal_difference(c.records[i].q) == 0.0);
  }
}

}  // TEST_SUITE
