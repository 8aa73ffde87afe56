#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stokeshape/types.hpp"

namespace stokeshape {

// Reference inf-sup constant of the divergence form on the unit square with
// the mixed boundary conditions used here: 1/(4*sqrt(2)).
double inf_sup_reference_bound();

// 1D grid on [0,1] for boundary controls.  Nodes are strictly increasing and
// include both endpoints.
struct ControlGrid {
  std::vector<double> nodes;

  int num_cells() const { return static_cast<int>(nodes.size()) - 1; }
  double spacing() const;  // max cell width
};

ControlGrid make_uniform_grid(int num_cells);

// Piecewise-polynomial function on a ControlGrid.  Degree 1 stores one value
// per grid node; degree 4 stores values at the 5 equispaced Lagrange nodes of
// every cell (shared at cell interfaces), 4*cells+1 values in total.
//
// Controls q describe the lower boundary y = q(x) of the flow domain
// {(x,y) : 0 < x < 1, q(x) < y < 1}; admissible controls vanish at x=0,1 and
// stay below 1 by a safety margin.
class ControlFunction {
public:
  ControlFunction() = default;
  ControlFunction(ControlGrid grid, int degree, std::vector<double> values);

  const ControlGrid& grid() const { return grid_; }
  int degree() const { return degree_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Number of stored values: cells*degree + 1.
  int num_values() const { return static_cast<int>(values_.size()); }

  // Coordinate of the k-th stored value.
  double value_coordinate(int k) const;

  // Pointwise evaluation; x must lie in [0,1] up to roundoff.
  double eval(double x) const;
  double deriv(double x) const;   // q'  (one-sided at nodes for degree 1)
  double second_deriv(double x) const;  // q'' within a cell (0 for degree 1)

  // Nodal second-difference quotients at the stored-value coordinates; used
  // as the discrete proxy for q'' when degree==1.  Endpoint entries are 0.
  std::vector<double> second_difference_quotients() const;

  // integral of q over [0,1], exact for the stored polynomial.
  double integral() const;

  // sup |q| and sup |q'| sampled exactly from the piecewise polynomial
  // (per-cell extrema for degree 1; fine per-cell sampling for degree 4).
  double max_abs() const;
  double max_abs_deriv() const;

  ControlFunction operator+(const ControlFunction& other) const;
  ControlFunction operator-(const ControlFunction& other) const;
  ControlFunction scaled(double factor) const;

  // max_k |values_k - other.values_k| (grids must match).
  double max_nodal_difference(const ControlFunction& other) const;

private:
  int locate_cell(double x) const;

  ControlGrid grid_;
  int degree_ = 1;
  std::vector<double> values_;
};

// Nodal interpolation of f onto the control space of the given degree.
ControlFunction interpolate_control(const std::function<double(double)>& f,
                                    const ControlGrid& grid, int degree = 1);

enum class ControlPreset { Flat, Parabolic, Sinusoidal, CosineBump };

// Analytic formula behind a preset (used by interpolation and by tests that
// need exact derivatives).
std::function<double(double)> preset_formula(ControlPreset preset);

ControlFunction make_preset(ControlPreset preset, const ControlGrid& grid,
                            int degree = 1);

struct AdmissibilityParams {
  double epsilon = 0.1;      // height gap: q <= 1 - epsilon
  double norm_bound = 10.0;  // bound on the discrete H^3 proxy
  double xi = 0.9;           // inf-sup margin factor in (0,1)
  double c_infinity = 10.0;  // advisory bound on the W^{3,inf} proxy
};

struct AdmissibilityReport {
  bool endpoints_ok = false;
  bool height_ok = false;
  bool h3_ok = false;
  // Advisory flags (sufficient conditions; violations are reported, not fatal):
  bool w1inf_within_margin = false;  // W^{1,inf} proxy <= xi * beta_hat
  bool w3inf_ok = false;             // W^{3,inf} proxy <= c_infinity

  double max_height = 0.0;
  double h3_proxy = 0.0;
  double w1inf_proxy = 0.0;
  double w3inf_proxy = 0.0;

  bool admissible() const { return endpoints_ok && height_ok && h3_ok; }
};

AdmissibilityReport check_admissible(const ControlFunction& q,
                                     const AdmissibilityParams& params);

// CSV round trip: header "x,q", one row per stored value.
void serialize_control(const ControlFunction& q, const std::string& path);
ControlFunction deserialize_control(const std::string& path,
                                    const ControlGrid& grid, int degree = 1);

// L^2(0,1) inner products of piecewise polynomials on possibly different
// grids, evaluated by per-cell Gauss quadrature on the union grid.
double control_l2_inner(const ControlFunction& a, const ControlFunction& b);
double control_l2_norm(const ControlFunction& a);

// Discrete curvature inner product sum_i w_i q''_i r''_i with the
// second-difference proxy (degree 1) or exact q'' (degree 4).  This is the
// bilinear form behind the alpha*||q''||^2 regularization term.
double curvature_inner(const ControlFunction& a, const ControlFunction& b);

}  // namespace stokeshape
