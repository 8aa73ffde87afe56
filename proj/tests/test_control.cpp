#include <doctest.h>

#include <cmath>
#include <vector>

#include "stokeshape/control.hpp"
#include "support/error_norms.hpp"

using namespace stokeshape;

namespace {

// L2 distance between f and a control function, by composite Simpson.
double l2_error(const std::function<double(double)>& f,
                const ControlFunction& q) {
  const int m = 4096;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double x = static_cast<double>(i) / m;
    const double d = f(x) - q.eval(x);
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * d * d;
  }
  return std::sqrt(s / (3.0 * m));
}

}  // namespace

TEST_SUITE("control") {

TEST_CASE("grid construction and spacing") {
  ControlGrid g = make_uniform_grid(8);
  CHECK(g.num_cells() == 8);
  CHECK(g.nodes.front() == 0.0);
  CHECK(g.nodes.back() == 1.0);
  CHECK(g.spacing() == doctest::Approx(0.125).epsilon(1e-14));
  CHECK_THROWS_AS(make_uniform_grid(0), InvalidInput);
}

TEST_CASE("pointwise evaluation") {
  ControlGrid g = make_uniform_grid(4);
  ControlFunction zero(g, 1, std::vector<double>(5, 0.0));
  CHECK(zero.eval(0.3) == 0.0);

  // parabolic preset on a grid containing x=0.5 reproduces the peak value
  ControlFunction qp = make_preset(ControlPreset::Parabolic,
                                   make_uniform_grid(10), 1);
  CHECK(qp.eval(0.5) == doctest::Approx(0.2).epsilon(1e-14));

  // hand-checked slope of a piecewise-linear hat
  ControlGrid g2;
  g2.nodes = {0.0, 0.5, 1.0};
  ControlFunction hat(g2, 1, {0.0, 0.1, 0.0});
  CHECK(hat.deriv(0.25) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(hat.second_deriv(0.25) == 0.0);
  CHECK(hat.max_abs() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(hat.max_abs_deriv() == doctest::Approx(0.2).epsilon(1e-14));

  CHECK_THROWS_AS(hat.eval(-0.1), InvalidInput);
  CHECK_THROWS_AS(hat.eval(1.1), InvalidInput);
}

TEST_CASE("constructor validation") {
  ControlGrid g = make_uniform_grid(2);
  CHECK_THROWS_AS(ControlFunction(g, 2, std::vector<double>(3, 0.0)),
                  InvalidInput);
  CHECK_THROWS_AS(ControlFunction(g, 1, std::vector<double>(4, 0.0)),
                  InvalidInput);
  ControlGrid bad;
  bad.nodes = {0.0, 0.5, 0.9};
  CHECK_THROWS_AS(ControlFunction(bad, 1, std::vector<double>(3, 0.0)),
                  InvalidInput);
}

TEST_CASE("evaluation is linear in nodal values") {
  ControlGrid g = make_uniform_grid(5);
  std::vector<double> va = {0.0, 0.1, -0.05, 0.2, 0.07, 0.0};
  std::vector<double> vb = {0.0, -0.03, 0.12, 0.01, -0.09, 0.0};
  std::vector<double> vs(6);
  for (int i = 0; i < 6; ++i) vs[i] = va[i] + vb[i];
  ControlFunction a(g, 1, va), b(g, 1, vb), s(g, 1, vs);
  for (double x : {0.07, 0.3, 0.55, 0.81, 0.99}) {
    CHECK(s.eval(x) ==
          doctest::Approx(a.eval(x) + b.eval(x)).epsilon(1e-14));
    CHECK(s.deriv(x) ==
          doctest::Approx(a.deriv(x) + b.deriv(x)).epsilon(1e-14));
  }
}

TEST_CASE("interpolation reproduces nodal values") {
  ControlGrid g;
  g.nodes = {0.0, 0.5, 1.0};
  ControlFunction z =
      interpolate_control([](double) { return 0.0; }, g, 1);
  for (double v : z.values()) CHECK(v == 0.0);

  ControlFunction q =
      interpolate_control([](double x) { return x * (1 - x); }, g, 1);
  CHECK(q.values()[0] == 0.0);
  CHECK(q.values()[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(q.values()[2] == 0.0);
}

TEST_CASE("interpolation is a projection") {
  ControlGrid g = make_uniform_grid(6);
  ControlFunction q =
      interpolate_control([](double x) { return std::sin(M_PI * x); }, g, 1);
  ControlFunction qq =
      interpolate_control([&](double x) { return q.eval(x); }, g, 1);
  CHECK(q.max_nodal_difference(qq) == 0.0);
}

TEST_CASE("degree-1 interpolation error decays at second order") {
  std::vector<double> hs, errs;
  for (int m : {4, 8, 16, 32}) {
    ControlGrid g = make_uniform_grid(m);
    ControlFunction q =
        interpolate_control([](double x) { return std::sin(M_PI * x); }, g, 1);
    hs.push_back(1.0 / m);
    errs.push_back(l2_error([](double x) { return std::sin(M_PI * x); }, q));
  }
  const double slope = testsupport::fitted_order(hs, errs);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("presets vanish at the endpoints and match their formulas") {
  ControlGrid g = make_uniform_grid(12);
  for (ControlPreset p :
       {ControlPreset::Flat, ControlPreset::Parabolic,
        ControlPreset::Sinusoidal, ControlPreset::CosineBump}) {
    for (int deg : {1, 4}) {
      ControlFunction q = make_preset(p, g, deg);
      CHECK(q.values().front() == 0.0);
      CHECK(q.values().back() == 0.0);
    }
  }
  CHECK(preset_formula(ControlPreset::Parabolic)(0.5) ==
        doctest::Approx(0.2).epsilon(1e-14));
  CHECK(preset_formula(ControlPreset::Sinusoidal)(0.25) ==
        doctest::Approx(0.1).epsilon(1e-14));
  CHECK(preset_formula(ControlPreset::CosineBump)(0.5) ==
        doctest::Approx(0.2).epsilon(1e-14));
  CHECK(preset_formula(ControlPreset::CosineBump)(0.0) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("degree-4 representation and integral are exact for quartics") {
  ControlGrid g = make_uniform_grid(3);
  ControlFunction q = interpolate_control(
      [](double x) { return x * x * (1 - x) * (1 - x); }, g, 4);
  for (double x : {0.11, 0.37, 0.62, 0.93})
    CHECK(q.eval(x) ==
          doctest::Approx(x * x * (1 - x) * (1 - x)).epsilon(1e-13));
  CHECK(q.integral() == doctest::Approx(1.0 / 30.0).epsilon(1e-13));
  CHECK(q.num_values() == 13);
  // stored-value coordinates are the per-cell quarter points
  CHECK(q.value_coordinate(5) == doctest::Approx(1.0 / 3.0 + 0.25 / 3.0));

  // the parabolic preset is a quadratic: its degree-4 interpolant is exact
  ControlFunction qp = make_preset(ControlPreset::Parabolic, g, 4);
  CHECK(qp.integral() == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("second difference quotients recover q'' of a parabola") {
  ControlFunction qp =
      make_preset(ControlPreset::Parabolic, make_uniform_grid(10), 1);
  const auto d2 = qp.second_difference_quotients();
  CHECK(d2.front() == 0.0);
  CHECK(d2.back() == 0.0);
  for (size_t i = 1; i + 1 < d2.size(); ++i)
    CHECK(d2[i] == doctest::Approx(-1.6).epsilon(1e-12));
}

TEST_CASE("admissibility report") {
  ControlGrid g;
  g.nodes = {0.0, 0.5, 1.0};
  AdmissibilityParams params;
  params.epsilon = 0.1;

  ControlFunction zero(g, 1, {0.0, 0.0, 0.0});
  AdmissibilityReport r0 = check_admissible(zero, params);
  CHECK(r0.admissible());
  CHECK(r0.endpoints_ok);
  CHECK(r0.height_ok);
  CHECK(r0.h3_ok);
  CHECK(r0.w1inf_within_margin);
  CHECK(r0.w3inf_ok);

  // height 1 - epsilon/2 violates the gap constraint
  ControlFunction tall(g, 1, {0.0, 0.95, 0.0});
  CHECK_FALSE(check_admissible(tall, params).height_ok);

  ControlFunction loose(g, 1, {0.1, 0.0, 0.0});
  CHECK_FALSE(check_admissible(loose, params).endpoints_ok);

  AdmissibilityParams bad = params;
  bad.epsilon = 1.5;
  CHECK_THROWS_AS(check_admissible(zero, bad), InvalidInput);
}

TEST_CASE("inf-sup reference bound value") {
  CHECK(inf_sup_reference_bound() ==
        doctest::Approx(1.0 / (4.0 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(inf_sup_reference_bound() == doctest::Approx(0.1767767).epsilon(1e-6));
}

TEST_CASE("csv round trip") {
  ControlGrid g = make_uniform_grid(7);
  std::vector<double> v(8, 0.0);
  for (int i = 1; i < 7; ++i) v[i] = 0.05 * std::sin(2.1 * i) + 0.1;
  ControlFunction q(g, 1, v);
  const std::string path = "control_roundtrip_test.csv";
  serialize_control(q, path);
  ControlFunction back = deserialize_control(path, g, 1);
  CHECK(q.max_nodal_difference(back) <= 1e-14);
  std::remove(path.c_str());
  CHECK_THROWS_AS(deserialize_control("does_not_exist_control.csv", g, 1),
                  InvalidInput);
}

TEST_CASE("l2 inner products across different grids") {
  // a = x(1-x) exactly (degree 4); b = symmetric hat of height 0.3
  ControlFunction a = interpolate_control(
      [](double x) { return x * (1 - x); }, make_uniform_grid(2), 4);
  ControlGrid gb;
  gb.nodes = {0.0, 0.5, 1.0};
  ControlFunction b(gb, 1, {0.0, 0.3, 0.0});
  // int (x - x^2) * hat = 1/32 by direct integration
  CHECK(control_l2_inner(a, b) == doctest::Approx(1.0 / 32.0).epsilon(1e-13));
  CHECK(control_l2_inner(b, a) == doctest::Approx(1.0 / 32.0).epsilon(1e-13));
  CHECK(control_l2_norm(a) ==
        doctest::Approx(std::sqrt(1.0 / 30.0)).epsilon(1e-13));
}

TEST_CASE("curvature form") {
  // degree 4: q = x(1-x) has q'' = -2, so the form is int 4 = 4
  ControlFunction q4 = interpolate_control(
      [](double x) { return x * (1 - x); }, make_uniform_grid(2), 4);
  CHECK(curvature_inner(q4, q4) == doctest::Approx(4.0).epsilon(1e-13));

  // degree 1: difference quotients of the parabolic preset are exactly -1.6;
  // the interior trapezoid weights cover (m-1)/m of the interval
  const int m = 10;
  ControlFunction q1 =
      make_preset(ControlPreset::Parabolic, make_uniform_grid(m), 1);
  CHECK(curvature_inner(q1, q1) ==
        doctest::Approx((m - 1) / double(m) * 2.56).epsilon(1e-12));

  // symmetry and linearity
  ControlGrid g = make_uniform_grid(6);
  std::vector<double> va(7, 0.0), vb(7, 0.0);
  for (int i = 1; i < 6; ++i) {
    va[i] = 0.1 * std::sin(1.7 * i);
    vb[i] = 0.1 * std::cos(0.9 * i);
  }
  ControlFunction a(g, 1, va), b(g, 1, vb);
  CHECK(curvature_inner(a, b) ==
        doctest::Approx(curvature_inner(b, a)).epsilon(1e-14));
  CHECK(curvature_inner(a + b, b) ==
        doctest::Approx(curvature_inner(a, b) + curvature_inner(b, b))
            .epsilon(1e-12));
  CHECK_THROWS_AS(curvature_inner(a, q4), InvalidInput);
}

TEST_CASE("arithmetic and scaling") {
  ControlGrid g = make_uniform_grid(4);
  std::vector<double> v = {0.0, 0.1, 0.2, 0.1, 0.0};
  ControlFunction q(g, 1, v);
  ControlFunction two = q + q;
  CHECK(two.max_nodal_difference(q.scaled(2.0)) == 0.0);
  ControlFunction diff = q - q;
  for (double x : {0.1, 0.5, 0.9}) CHECK(diff.eval(x) == 0.0);
}

}  // TEST_SUITE
