#pragma once

#include "stokeshape/control.hpp"
#include "stokeshape/types.hpp"

namespace stokeshape {

// Geometry of the control-to-domain map
//
//   T_q(x,y) = (x, y + (1-y) q(x))
//
// sending the unit square onto {(x,yt) : 0 < x < 1, q(x) < yt < 1}.  All
// quantities below are evaluated at reference points (x,y) in the unit
// square.  Conventions: (grad u)_{ij} = du_i/dx_j, cof(M) = det(M) M^{-T}.

// Pointwise map data:
//   DT      = [[1, 0], [(1-y) q', 1-q]]
//   gamma   = det DT = 1 - q
//   A       = gamma DT^{-1} DT^{-T}   (note det A = 1)
//   cof(DT) = [[1-q, -(1-y) q'], [0, 1]]
struct MapQuantities {
  double gamma;
  Mat2 DT;
  Mat2 DT_inv;
  Mat2 A;
  Mat2 cof_DT;
};

// First variation of the map data along a control direction dq:
//   V         = (0, (1-y) dq(x))           (d/dt T_{q+t dq})
//   gamma_dot = -dq
//   A_dot     = d/dt A_{q+t dq}|_{t=0}
//   cof(DV)   = [[-dq, -(1-y) dq'], [0, 0]]   (rows are divergence free)
struct MapFirstVariation {
  Vec2 V;
  double gamma_dot;
  Mat2 A_dot;
  Mat2 cof_DV;
};

// Second mixed variation along directions (dq, tq):
//   gamma_ddot = 0, cof(DT) is linear in q so its second variation vanishes,
//   A_ddot has only the (2,2) entry nonzero.
struct MapSecondVariation {
  double gamma_ddot;
  Mat2 A_ddot;
};

// Forward map T_q; the top edge y=1 and the lateral edges x=0,1 (where q
// vanishes) are fixed pointwise.
Vec2 map_forward(const ControlFunction& q, double x, double y);

// All pointwise pullback quantities.  Throws NumericalFailure if
// gamma <= gamma_min (degenerate map).
MapQuantities map_quantities(const ControlFunction& q, double x, double y,
                             double gamma_min = 1e-8);

MapFirstVariation map_first_variation(const ControlFunction& q,
                                      const ControlFunction& dq, double x,
                                      double y, double gamma_min = 1e-8);

MapSecondVariation map_second_variation(const ControlFunction& q,
                                        const ControlFunction& dq,
                                        const ControlFunction& tq, double x,
                                        double y, double gamma_min = 1e-8);

// Guaranteed lower bound for the smallest eigenvalue of A over the domain,
// given d1 + d2 >= sup|q'| and epsilon <= 1-q <= 1:
//
//   lambda_bar = 2 / (t + sqrt(t^2 - 4)),  t = 1 + (1 + (d1+d2)^2) / epsilon.
//
// Since det A = 1 and trace A <= t pointwise, lambda_min(A) is the smaller
// root of lambda^2 - tau lambda + 1 = 0 with tau = trace A, which is
// decreasing in tau; the bound follows.
double eigen_lower_bound(double d1, double d2, double epsilon);

}  // namespace stokeshape
