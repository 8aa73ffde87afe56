#include "stokeshape/geometry.hpp"

#include <cmath>

namespace stokeshape {

Vec2 map_forward(const ControlFunction& q, double x, double y) {
  const double qx = q.eval(x);
  return Vec2(x, y + (1.0 - y) * qx);
}

MapQuantities map_quantities(const ControlFunction& q, double x, double y,
                             double gamma_min) {
  MapQuantities m;
  const double qx = q.eval(x);
  const double dqx = q.deriv(x);
  const double g = 1.0 - qx;
  if (!(g > gamma_min))
    throw NumericalFailure("degenerate control-to-domain map: 1-q(x) = " +
                           std::to_string(g) + " at x = " + std::to_string(x));
  const double oy = 1.0 - y;

  m.gamma = g;
  m.DT << 1.0, 0.0, oy * dqx, g;
  m.DT_inv << 1.0, 0.0, -oy * dqx / g, 1.0 / g;
  m.A << g, -oy * dqx, -oy * dqx, (oy * oy * dqx * dqx + 1.0) / g;
  m.cof_DT << g, -oy * dqx, 0.0, 1.0;
  return m;
}

MapFirstVariation map_first_variation(const ControlFunction& q,
                                      const ControlFunction& dq, double x,
                                      double y, double gamma_min) {
  MapFirstVariation v;
  const double qx = q.eval(x);
  const double qpx = q.deriv(x);
  const double dqx = dq.eval(x);
  const double dqpx = dq.deriv(x);
  const double g = 1.0 - qx;
  if (!(g > gamma_min))
    throw NumericalFailure("degenerate map in first variation at x = " +
                           std::to_string(x));
  const double oy = 1.0 - y;

  v.V = Vec2(0.0, oy * dqx);
  v.gamma_dot = -dqx;
  // d/dt of A entries: A11 = 1-q, A12 = -(1-y) q',
  // A22 = ((1-y)^2 q'^2 + 1) / (1-q)
  const double a22_num = oy * oy * qpx * qpx + 1.0;
  v.A_dot(0, 0) = -dqx;
  v.A_dot(0, 1) = -oy * dqpx;
  v.A_dot(1, 0) = -oy * dqpx;
  v.A_dot(1, 1) = 2.0 * oy * oy * qpx * dqpx / g + a22_num * dqx / (g * g);
  v.cof_DV << -dqx, -oy * dqpx, 0.0, 0.0;
  return v;
}

MapSecondVariation map_second_variation(const ControlFunction& q,
                                        const ControlFunction& dq,
                                        const ControlFunction& tq, double x,
                                        double y, double gamma_min) {
  MapSecondVariation s;
  const double qx = q.eval(x);
  const double qpx = q.deriv(x);
  const double dqx = dq.eval(x), dqpx = dq.deriv(x);
  const double tqx = tq.eval(x), tqpx = tq.deriv(x);
  const double g = 1.0 - qx;
  if (!(g > gamma_min))
    throw NumericalFailure("degenerate map in second variation at x = " +
                           std::to_string(x));
  const double oy = 1.0 - y;
  const double oy2 = oy * oy;

  s.gamma_ddot = 0.0;
  // Second mixed derivative of A22 = N/D with N = (1-y)^2 q'^2 + 1, D = 1-q:
  //   d2(N/D) = N_ts/D + N_t tq/D^2 + N_s dq/D^2 + 2 N dq tq/D^3
  const double N = oy2 * qpx * qpx + 1.0;
  s.A_ddot.setZero();
  s.A_ddot(1, 1) = 2.0 * oy2 * dqpx * tqpx / g +
                   2.0 * oy2 * qpx * (dqpx * tqx + tqpx * dqx) / (g * g) +
                   2.0 * N * dqx * tqx / (g * g * g);
  return s;
}

double eigen_lower_bound(double d1, double d2, double epsilon) {
  if (epsilon <= 0.0 || epsilon > 1.0)
    throw InvalidInput("eigen_lower_bound requires epsilon in (0,1]");
  const double m = d1 + d2;
  const double t = 1.0 + (1.0 + m * m) / epsilon;
  return 2.0 / (t + std::sqrt(t * t - 4.0));
}

}  // namespace stokeshape
