#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stokeshape/control.hpp"
#include "stokeshape/sensitivity.hpp"
#include "stokeshape/stokes.hpp"
#include "support/error_norms.hpp"

using namespace stokeshape;

namespace {

// Coefficient data with nontrivial, mutually consistent y-derivatives so the
// composition terms of the variation forms are all exercised.
ProblemData variable_data() {
  ProblemData d;
  d.eta.value = [](double x, double y) { return 0.4 + 0.3 * y * y + 0.2 * x; };
  d.eta.dy = [](double, double y) { return 0.6 * y; };
  d.eta.dyy = [](double, double) { return 0.6; };
  d.nu.value = [](double x, double y) {
    return 1.0 + 0.5 * y + 0.2 * std::sin(M_PI * x);
  };
  d.nu.dy = [](double, double) { return 0.5; };
  d.force.value = [](double x, double y) {
    return Vec2(std::sin(M_PI * y) + x, std::cos(y));
  };
  d.force.dy = [](double, double y) {
    return Vec2(M_PI * std::cos(M_PI * y), -std::sin(y));
  };
  d.force.dyy = [](double, double y) {
    return Vec2(-M_PI * M_PI * std::sin(M_PI * y), -std::cos(y));
  };
  d.inflow = [](double, double y) { return Vec2(y * (2 - y), 0.0); };
  d.traction = [](double, double) { return Vec2(0.1, 0.05); };
  return d;
}

ControlFunction smooth(const ControlGrid& grid, double amp, int waves) {
  return interpolate_control(
      [amp, waves](double x) { return amp * std::sin(waves * M_PI * x); },
      grid, 4);
}

}  // namespace

TEST_SUITE("sensitivity") {

TEST_CASE("zero direction gives a zero derivative") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 4);
  ControlFunction zero = make_preset(ControlPreset::Flat, grid, 4);
  TaylorHoodSpace sp = build_space(build_mesh(8));
  ProblemData data = variable_data();
  StateSolution state = solve_state(q, data, sp, Policy::Serial);
  SensitivitySolution s = solve_sensitivity(q, zero, state, data, sp,
                                            Policy::Serial);
  CHECK(s.velocity.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(s.pressure.lpNorm<Eigen::Infinity>() <= 1e-12);

  SensitivitySolution a = solve_sensitivity(q, smooth(grid, 0.1, 1), state,
                                            data, sp, Policy::Serial);
  SensitivitySolution s2 = solve_second_sensitivity(q, a.direction, zero,
                                                    state, a, s, data, sp,
                                                    Policy::Serial);
  CHECK(s2.velocity.lpNorm<Eigen::Infinity>() <= 1e-11);
}

TEST_CASE("first derivative is linear in the direction") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 4);
  TaylorHoodSpace sp = build_space(build_mesh(8));
  ProblemData data = variable_data();
  StateSolution state = solve_state(q, data, sp, Policy::Serial);

  ControlFunction a = smooth(grid, 0.1, 1);
  ControlFunction b = interpolate_control(
      [](double x) { return 0.2 * x * (1 - x); }, grid, 4);
  Vec va = solve_sensitivity(q, a, state, data, sp, Policy::Serial).velocity;
  Vec vb = solve_sensitivity(q, b, state, data, sp, Policy::Serial).velocity;
  Vec vab = solve_sensitivity(q, a + b, state, data, sp,
                              Policy::Serial).velocity;
  Vec v2a = solve_sensitivity(q, a.scaled(2.0), state, data, sp,
                              Policy::Serial).velocity;
  const double scale = va.lpNorm<Eigen::Infinity>();
  REQUIRE(scale > 0.0);
  CHECK((vab - va - vb).lpNorm<Eigen::Infinity>() / scale <= 1e-10);
  CHECK((v2a - 2.0 * va).lpNorm<Eigen::Infinity>() / scale <= 1e-10);
}

TEST_CASE("sensitivities are the taylor coefficients of the state") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 4);
  ControlFunction dq = smooth(grid, 0.25, 1);
  TaylorHoodSpace sp = build_space(build_mesh(8));
  ProblemData data = variable_data();
  StateSolution state = solve_state(q, data, sp, Policy::Serial);
  SensitivitySolution du = solve_sensitivity(q, dq, state, data, sp,
                                             Policy::Serial);
  SensitivitySolution ddu = solve_second_sensitivity(q, dq, dq, state, du, du,
                                                     data, sp, Policy::Serial);

  std::vector<double> ts = {1e-1, 3.1623e-2, 1e-2, 3.1623e-3};
  std::vector<double> r1, r2;
  for (double t : ts) {
    StateSolution pert = solve_state(q + dq.scaled(t), data, sp,
                                     Policy::Serial);
    Vec diff = pert.velocity - state.velocity;
    r1.push_back((diff - t * du.velocity).norm());
    r2.push_back(
        (diff - t * du.velocity - 0.5 * t * t * ddu.velocity).norm());
  }
  const double slope1 = testsupport::fitted_order(ts, r1);
  const double slope2 = testsupport::fitted_order(ts, r2);
  CHECK(slope1 >= 1.8);
  CHECK(slope1 <= 2.2);
  CHECK(slope2 >= 2.7);
  CHECK(slope2 <= 3.3);
}

TEST_CASE("mixed second derivative is symmetric in its directions") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 4);
  ControlFunction a = smooth(grid, 0.15, 1);
  ControlFunction b = interpolate_control(
      [](double x) { return 0.2 * x * x * (1 - x); }, grid, 4);
  TaylorHoodSpace sp = build_space(build_mesh(8));
  ProblemData data = variable_data();
  StateSolution state = solve_state(q, data, sp, Policy::Serial);
  SensitivitySolution sa = solve_sensitivity(q, a, state, data, sp,
                                             Policy::Serial);
  SensitivitySolution sb = solve_sensitivity(q, b, state, data, sp,
                                             Policy::Serial);
  SensitivitySolution ab = solve_second_sensitivity(q, a, b, state, sa, sb,
                                                    data, sp, Policy::Serial);
  SensitivitySolution ba = solve_second_sensitivity(q, b, a, state, sb, sa,
                                                    data, sp, Policy::Serial);
  const double scale = ab.velocity.lpNorm<Eigen::Infinity>();
  REQUIRE(scale > 0.0);
  CHECK((ab.velocity - ba.velocity).lpNorm<Eigen::Infinity>() / scale <= 1e-9);
  CHECK(ab.order == 2);
}

TEST_CASE("variation coefficients match difference quotients of the state form") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = interpolate_control(
      [](double x) {
        return 0.2 * x * (1 - x) * (1 + 0.3 * std::sin(2 * M_PI * x));
      },
      grid, 4);
  ControlFunction dq = smooth(grid, 0.2, 1);
  ControlFunction tq = interpolate_control(
      [](double x) { return 0.15 * x * (1 - x) * (2 - x); }, grid, 4);
  ProblemData data = variable_data();

  CoefficientFn first = first_variation_coefficients(q, dq, data);
  CoefficientFn second = second_variation_coefficients(q, dq, tq, data);

  const double t = 1e-5, s = 1e-4;
  std::mt19937 rng(271828);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = unif(rng), y = unif(rng);
    CAPTURE(x);
    CAPTURE(y);

    CoefficientFn cp = state_coefficients(q + dq.scaled(t), data);
    CoefficientFn cm = state_coefficients(q + dq.scaled(-t), data);
    FormCoefficients fd, an = first(x, y);
    {
      FormCoefficients a = cp(x, y), b = cm(x, y);
      fd.mass = (a.mass - b.mass) / (2 * t);
      fd.K = (a.K - b.K) / (2 * t);
      fd.C = (a.C - b.C) / (2 * t);
    }
    CHECK(std::abs(fd.mass - an.mass) <= 1e-6);
    CHECK((fd.K - an.K).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((fd.C - an.C).cwiseAbs().maxCoeff() <= 1e-6);

    // mixed quotient for the second variation
    FormCoefficients pp = state_coefficients(q + dq.scaled(s) + tq.scaled(s),
                                             data)(x, y);
    FormCoefficients pm = state_coefficients(q + dq.scaled(s) + tq.scaled(-s),
                                             data)(x, y);
    FormCoefficients mp = state_coefficients(q + dq.scaled(-s) + tq.scaled(s),
                                             data)(x, y);
    FormCoefficients mm = state_coefficients(q + dq.scaled(-s) + tq.scaled(-s),
                                             data)(x, y);
    FormCoefficients an2 = second(x, y);
    const double denom = 4 * s * s;
    CHECK(std::abs((pp.mass - pm.mass - mp.mass + mm.mass) / denom -
                   an2.mass) <= 1e-5);
    CHECK(((pp.K - pm.K - mp.K + mm.K) / denom - an2.K)
              .cwiseAbs()
              .maxCoeff() <= 1e-5);
    CHECK(((pp.C - pm.C - mp.C + mm.C) / denom).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(an2.C.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("variation loads match difference quotients of the state load") {
  ControlGrid grid = make_uniform_grid(8);
  ControlFunction q = make_preset(ControlPreset::Parabolic, grid, 4);
  ControlFunction dq = smooth(grid, 0.2, 1);
  ControlFunction tq = interpolate_control(
      [](double x) { return 0.15 * x * (1 - x) * (2 - x); }, grid, 4);
  TaylorHoodSpace sp = build_space(build_mesh(8));
  ProblemData data = variable_data();

  const double t = 1e-5;
  Vec fd1 = (state_load(q + dq.scaled(t), data, sp, Policy::Serial) -
             state_load(q + dq.scaled(-t), data, sp, Policy::Serial)) /
            (2 * t);
  Vec an1 = first_variation_load(q, dq, data, sp, Policy::Serial);
  CHECK((fd1 - an1).lpNorm<Eigen::Infinity>() <= 1e-7);

  const double s = 1e-4;
  Vec fd2 = (state_load(q + dq.scaled(s) + tq.scaled(s), data, sp,
                        Policy::Serial) -
             state_load(q + dq.scaled(s) + tq.scaled(-s), data, sp,
                        Policy::Serial) -
             state_load(q + dq.scaled(-s) + tq.scaled(s), data, sp,
                        Policy::Serial) +
             state_load(q + dq.scaled(-s) + tq.scaled(-s), data, sp,
                        Policy::Serial)) /
            (4 * s * s);
  Vec an2 = second_variation_load(q, dq, tq, data, sp, Policy::Serial);
  CHECK((fd2 - an2).lpNorm<Eigen::Infinity>() <= 1e-5);
}

}  // TEST_SUITE
