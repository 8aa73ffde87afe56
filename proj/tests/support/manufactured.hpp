// Generated by scripts/gen_manufactured.py; do not edit by hand.
//
// Exact Stokes fields on the physical domain: a divergence-free
// velocity with no slip on the control graph, a symmetry-compatible
// top trace, and the body force and boundary data that make
// (u, p) solve  eta u - div(nu grad u) + grad p = f  for constant
// eta, nu.  All functions take physical coordinates; gd_* and gn_*
// are the inflow Dirichlet and outflow traction traces (both sides
// are fixed by the map, so they can be consumed directly).
#pragma once

#include <cmath>

namespace mms {

namespace flat {
inline double ux(double x, double y) { return -y*(pow(x, 2) + 1)*pow(y - 1, 2)*(5*y - 2); }
inline double uy(double x, double y) { return 2*x*pow(y, 2)*pow(y - 1, 3); }
inline double p(double x, double y) { return 3*cos(M_PI*x)*cos(M_PI*y); }
inline double dux_dx(double x, double y) { return 2*x*y*(2 - 5*y)*pow(y - 1, 2); }
inline double dux_dy(double x, double y) { return -2*(pow(x, 2) + 1)*(y - 1)*(3*pow(y, 2) + 6*y*(y - 1) + pow(y - 1, 2)); }
inline double duy_dx(double x, double y) { return 2*pow(y, 2)*pow(y - 1, 3); }
inline double duy_dy(double x, double y) { return 2*x*y*pow(y - 1, 2)*(5*y - 2); }
inline double fx(double x, double y, double eta, double nu) { return -eta*y*(pow(x, 2) + 1)*pow(y - 1, 2)*(5*y - 2) + 2*nu*(y*pow(y - 1, 2)*(5*y - 2) + 3*(pow(x, 2) + 1)*(pow(y, 2) + 6*y*(y - 1) + 3*pow(y - 1, 2))) - 3*M_PI*sin(M_PI*x)*cos(M_PI*y); }
inline double fy(double x, double y, double eta, double nu) { return 2*eta*x*pow(y, 2)*pow(y - 1, 3) - 4*nu*x*(y - 1)*(3*pow(y, 2) + 6*y*(y - 1) + pow(y - 1, 2)) - 3*M_PI*sin(M_PI*y)*cos(M_PI*x); }
inline double gn_x(double y, double nu) { return -2*nu*y*pow(y - 1, 2)*(5*y - 2) + 3*cos(M_PI*y); }
inline double gn_y(double y, double nu) { return 2*nu*pow(y, 2)*pow(y - 1, 3); }
inline double gd_x(double y) { return y*(2 - 5*y)*pow(y - 1, 2); }
inline double gd_y(double y) { return 0; }
}  // namespace flat

namespace parabolic {
inline double ux(double x, double y) { return 125*pow(1 - y, 2)*(pow(x, 2) + 1)*(-25*y - 3*pow(2*x - 1, 2) + 13)*(5*y + pow(2*x - 1, 2) - 1)/pow(pow(2*x - 1, 2) + 4, 5); }
inline double uy(double x, double y) { return 250*pow(1 - y, 3)*(10*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1) - (x*(5*y + pow(2*x - 1, 2) - 1) + 4*(2*x - 1)*(pow(x, 2) + 1))*(pow(2*x - 1, 2) + 4))*(5*y + pow(2*x - 1, 2) - 1)/pow(pow(2*x - 1, 2) + 4, 6); }
inline double p(double x, double y) { return 3*cos(M_PI*x)*cos(M_PI*y); }
inline double dux_dx(double x, double y) { return 250*pow(1 - y, 2)*(12*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)*(10*y + pow(2*x - 1, 2) - 6) + 2*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)*(65*y + 9*pow(2*x - 1, 2) - 29) + (pow(2*x - 1, 2) + 4)*(10*x*(1 - y)*(5*y + pow(2*x - 1, 2) - 1) - 3*x*pow(5*y + pow(2*x - 1, 2) - 1, 2) + 20*(1 - y)*(2*x - 1)*(pow(x, 2) + 1) - 12*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)))/pow(pow(2*x - 1, 2) + 4, 6); }
inline double dux_dy(double x, double y) { return 250*(1 - y)*(pow(x, 2) + 1)*(25*pow(1 - y, 2) - 30*(1 - y)*(5*y + pow(2*x - 1, 2) - 1) + 3*pow(5*y + pow(2*x - 1, 2) - 1, 2))/pow(pow(2*x - 1, 2) + 4, 5); }
inline double duy_dx(double x, double y) { return pow(1 - y, 2)*(-36000*(1 - y)*pow(2*x - 1, 2)*(pow(x, 2) + 1)*pow(5*y + pow(2*x - 1, 2) - 1, 2) + 6000*(1 - y)*(2*x - 1)*(5*y + pow(2*x - 1, 2) - 1)*(x*(pow(2*x - 1, 2) + 4)*(5*y + pow(2*x - 1, 2) - 1) + 4*(2*x - 1)*(pow(x, 2) + 1)*(pow(2*x - 1, 2) + 4) - 2*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)) + 250*(1 - y)*pow(pow(2*x - 1, 2) + 4, 2)*(-16*x*(2*x - 1)*(5*y + pow(2*x - 1, 2) - 1) + pow(2*x - 1, 2)*(-16*pow(x, 2) - 16) - 8*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1) - pow(5*y + pow(2*x - 1, 2) - 1, 2)) + 2000*(1 - y)*(pow(2*x - 1, 2) + 4)*(5*y + pow(2*x - 1, 2) - 1)*(2*x*(2*x - 1)*(5*y + pow(2*x - 1, 2) - 1) + pow(2*x - 1, 2)*(8*pow(x, 2) + 8) + (pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)) - 600*(pow(x, 2) + 1)*pow(5*y + pow(2*x - 1, 2) - 1, 2)*(pow(2*x - 1, 2)*(-20*y - 4*pow(2*x - 1, 2) + 4) - pow(pow(2*x - 1, 2) + 4, 2) + (pow(2*x - 1, 2) + 4)*(5*y + 5*pow(2*x - 1, 2) - 1)))/pow(pow(2*x - 1, 2) + 4, 7); }
inline double duy_dy(double x, double y) { return 250*pow(1 - y, 2)*(2*(2*x - 1)*(pow(x, 2) + 1)*(-65*y - 9*pow(2*x - 1, 2) + 29)*(5*y + pow(2*x - 1, 2) - 1) + 12*(2*x - 1)*(pow(x, 2) + 1)*(-10*y - pow(2*x - 1, 2) + 6)*(5*y + pow(2*x - 1, 2) - 1) + (pow(2*x - 1, 2) + 4)*(-10*x*(1 - y)*(5*y + pow(2*x - 1, 2) - 1) + 3*x*pow(5*y + pow(2*x - 1, 2) - 1, 2) - 20*(1 - y)*(2*x - 1)*(pow(x, 2) + 1) + 12*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)))/pow(pow(2*x - 1, 2) + 4, 6); }
inline double fx(double x, double y, double eta, double nu) { return (125*eta*pow(1 - y, 2)*(pow(x, 2) + 1)*pow(pow(2*x - 1, 2) + 4, 2)*(-25*y - 3*pow(2*x - 1, 2) + 13)*(5*y + pow(2*x - 1, 2) - 1) + 50*nu*((1 - y)*(240*(1 - y)*pow(2*x - 1, 2)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)*(105*y + 13*pow(2*x - 1, 2) - 53) + 5*(1 - y)*pow(pow(2*x - 1, 2) + 4, 2)*(-80*x*(1 - y)*(2*x - 1) + 48*x*(2*x - 1)*(5*y + pow(2*x - 1, 2) - 1) - 40*(1 - y)*(pow(x, 2) + 1) + 10*(1 - y)*(-5*y - pow(2*x - 1, 2) + 1) + 48*pow(2*x - 1, 2)*(pow(x, 2) + 1) + 24*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1) + 3*pow(5*y + pow(2*x - 1, 2) - 1, 2)) + 20*(1 - y)*(pow(2*x - 1, 2) + 4)*(100*x*(1 - y)*(2*x - 1)*(5*y + pow(2*x - 1, 2) - 1) - 30*x*(2*x - 1)*pow(5*y + pow(2*x - 1, 2) - 1, 2) + 200*(1 - y)*pow(2*x - 1, 2)*(pow(x, 2) + 1) + 20*(1 - y)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1) - 120*pow(2*x - 1, 2)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1) - 9*(pow(x, 2) + 1)*pow(5*y + pow(2*x - 1, 2) - 1, 2)) + 24*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)*(10*y + pow(2*x - 1, 2) - 6)*(-4*pow(2*x - 1, 2)*(5*y + pow(2*x - 1, 2) - 1) - pow(pow(2*x - 1, 2) + 4, 2) + (pow(2*x - 1, 2) + 4)*(5*y + 5*pow(2*x - 1, 2) - 1))) + 15*(pow(x, 2) + 1)*pow(pow(2*x - 1, 2) + 4, 2)*(75*pow(1 - y, 2) - 30*(1 - y)*(5*y + pow(2*x - 1, 2) - 1) + pow(5*y + pow(2*x - 1, 2) - 1, 2))) - 3*M_PI*pow(pow(2*x - 1, 2) + 4, 7)*sin(M_PI*x)*cos(M_PI*y))/pow(pow(2*x - 1, 2) + 4, 7); }
inline double fy(double x, double y, double eta, double nu) { return (-250*eta*pow(1 - y, 3)*(-10*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1) + (x*(5*y + pow(2*x - 1, 2) - 1) + 4*(2*x - 1)*(pow(x, 2) + 1))*(pow(2*x - 1, 2) + 4))*pow(pow(2*x - 1, 2) + 4, 2)*(5*y + pow(2*x - 1, 2) - 1) + 100*nu*(1 - y)*(6*(1 - y)*(240*(1 - y)*(2*x - 1)*(pow(2*x - 1, 2) + 4)*(5*y + pow(2*x - 1, 2) - 1)*(2*x*(2*x - 1)*(5*y + pow(2*x - 1, 2) - 1) + pow(2*x - 1, 2)*(8*pow(x, 2) + 8) + (pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)) + 10*(1 - y)*pow(pow(2*x - 1, 2) + 4, 3)*(4*x*pow(2*x - 1, 2) + 2*x*(5*y + pow(2*x - 1, 2) - 1) + 4*(2*x - 1)*(pow(x, 2) + 1) + (2*x - 1)*(5*y + pow(2*x - 1, 2) - 1)) + 5*(1 - y)*pow(pow(2*x - 1, 2) + 4, 2)*(-80*x*pow(2*x - 1, 2)*(5*y + pow(2*x - 1, 2) - 1) - 4*x*pow(5*y + pow(2*x - 1, 2) - 1, 2) + (5 - 10*x)*pow(5*y + pow(2*x - 1, 2) - 1, 2) + pow(2*x - 1, 3)*(-80*pow(x, 2) - 80) - 56*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)) + 24*(2*x - 1)*(pow(x, 2) + 1)*pow(5*y + pow(2*x - 1, 2) - 1, 2)*(pow(2*x - 1, 2)*(50*y + 10*pow(2*x - 1, 2) - 10) + 3*pow(pow(2*x - 1, 2) + 4, 2) - (pow(2*x - 1, 2) + 4)*(5*y + 3*pow(2*x - 1, 2) - 1) - 2*(pow(2*x - 1, 2) + 4)*(5*y + 5*pow(2*x - 1, 2) - 1)) + 2*(5*y + pow(2*x - 1, 2) - 1)*(3*x*(pow(2*x - 1, 2) + 4)*(5*y + pow(2*x - 1, 2) - 1)*(pow(2*x - 1, 2)*(-20*y - 4*pow(2*x - 1, 2) + 4) - pow(pow(2*x - 1, 2) + 4, 2) + (pow(2*x - 1, 2) + 4)*(5*y + 5*pow(2*x - 1, 2) - 1)) - 800*(1 - y)*pow(2*x - 1, 3)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1) + 12*(2*x - 1)*(pow(x, 2) + 1)*(pow(2*x - 1, 2) + 4)*(pow(2*x - 1, 2)*(-20*y - 4*pow(2*x - 1, 2) + 4) - pow(pow(2*x - 1, 2) + 4, 2) + (pow(2*x - 1, 2) + 4)*(5*y + 5*pow(2*x - 1, 2) - 1)))) + (50*(2*x - 1)*(pow(x, 2) + 1)*(-25*pow(1 - y, 2) + 30*(1 - y)*(5*y + pow(2*x - 1, 2) - 1) - 3*pow(5*y + pow(2*x - 1, 2) - 1, 2)) + 5*(pow(2*x - 1, 2) + 4)*(25*x*pow(1 - y, 2) - 30*x*(1 - y)*(5*y + pow(2*x - 1, 2) - 1) + 3*x*pow(5*y + pow(2*x - 1, 2) - 1, 2) - 60*(1 - y)*(2*x - 1)*(pow(x, 2) + 1) + 12*(2*x - 1)*(pow(x, 2) + 1)*(5*y + pow(2*x - 1, 2) - 1)))*pow(pow(2*x - 1, 2) + 4, 2)) - 3*M_PI*pow(pow(2*x - 1, 2) + 4, 8)*sin(M_PI*y)*cos(M_PI*x))/pow(pow(2*x - 1, 2) + 4, 8); }
inline double gn_x(double y, double nu) { return (2.0/5.0)*nu*pow(y - 1, 2)*(45*pow(y, 2) + 30*y*(y - 1) - 32*y + 8) + 3*cos(M_PI*y); }
inline double gn_y(double y, double nu) { return (2.0/25.0)*nu*(105*pow(y, 5) - 475*pow(y, 4) + 827*pow(y, 3) - 681*pow(y, 2) + 256*y - 32); }
inline double gd_x(double y) { return y*(2 - 5*y)*pow(y - 1, 2); }
inline double gd_y(double y) { return (4.0/5.0)*y*pow(y - 1, 3)*(5*y - 2); }
inline double q(double x) { return (4.0/5.0)*x*(1 - x); }
inline double dq(double x) { return 4.0/5.0 - 8.0/5.0*x; }
}  // namespace parabolic

}  // namespace mms
