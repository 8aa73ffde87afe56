#include "stokeshape/functional.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "stokeshape/adjoint.hpp"
#include "stokeshape/exec.hpp"
#include "stokeshape/geometry.hpp"
#include "stokeshape/quadrature.hpp"
#include "stokeshape/sensitivity.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stokeshape {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::CurvatureEnergy:
      return "curvatureEnergy";
    case Variant::PerimeterEnergy:
      return "perimeterEnergy";
    case Variant::PerimeterTracking:
      return "perimeterTracking";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "curvatureEnergy") return Variant::CurvatureEnergy;
  if (name == "perimeterEnergy") return Variant::PerimeterEnergy;
  if (name == "perimeterTracking") return Variant::PerimeterTracking;
  throw InvalidInput("unknown functional variant: " + name);
}

std::string gradient_form_name(GradientForm f) {
  return f == GradientForm::AsWritten ? "asWritten" : "gradientCorrected";
}

GradientForm parse_gradient_form(const std::string& name) {
  if (name == "asWritten") return GradientForm::AsWritten;
  if (name == "gradientCorrected") return GradientForm::GradientCorrected;
  throw InvalidInput("unknown gradient form: " + name);
}

namespace {

double perimeter_weight_for(Variant variant, double alpha) {
  if (variant == Variant::PerimeterEnergy) return alpha;
  if (variant == Variant::PerimeterTracking) return 0.5 * alpha;
  return 0.0;
}

// 5-point Gauss-Legendre on [0,1] (nodes symmetric, weights sum to 1).
struct Gauss5 {
  double t[5];
  double w[5];
  Gauss5() {
    const double xi1 = 0.5384693101056831, xi2 = 0.9061798459386640;
    const double w0 = 0.5688888888888889, w1 = 0.4786286704993665,
                 w2 = 0.2369268850561891;
    t[0] = 0.5;
    t[1] = 0.5 * (1.0 - xi1);
    t[2] = 0.5 * (1.0 + xi1);
    t[3] = 0.5 * (1.0 - xi2);
    t[4] = 0.5 * (1.0 + xi2);
    w[0] = 0.5 * w0;
    w[1] = w[2] = 0.5 * w1;
    w[3] = w[4] = 0.5 * w2;
  }
};

const Gauss5& gauss5() {
  static const Gauss5 g;
  return g;
}

std::vector<double> union_breakpoints(
    std::initializer_list<const ControlFunction*> fns) {
  std::vector<double> pts;
  for (const auto* f : fns)
    pts.insert(pts.end(), f->grid().nodes.begin(), f->grid().nodes.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return b - a < 1e-14; }),
            pts.end());
  return pts;
}

template <typename F>
double integrate_cells(const std::vector<double>& pts, F&& integrand) {
  const Gauss5& g = gauss5();
  double acc = 0.0;
  for (size_t c = 0; c + 1 < pts.size(); ++c) {
    const double a = pts[c], width = pts[c + 1] - pts[c];
    for (int k = 0; k < 5; ++k) acc += width * g.w[k] * integrand(a + width * g.t[k]);
  }
  return acc;
}

}  // namespace

double perimeter_length(const ControlFunction& q) {
  return integrate_cells(q.grid().nodes, [&q](double x) {
    const double d = q.deriv(x);
    return std::sqrt(1.0 + d * d);
  });
}

double perimeter_first_variation(const ControlFunction& q,
                                 const ControlFunction& dq) {
  const auto pts = union_breakpoints({&q, &dq});
  return integrate_cells(pts, [&](double x) {
    const double d = q.deriv(x);
    return d * dq.deriv(x) / std::sqrt(1.0 + d * d);
  });
}

double perimeter_second_variation(const ControlFunction& q,
                                  const ControlFunction& dq,
                                  const ControlFunction& tq) {
  const auto pts = union_breakpoints({&q, &dq, &tq});
  return integrate_cells(pts, [&](double x) {
    const double d = q.deriv(x);
    const double s = 1.0 + d * d;
    return dq.deriv(x) * tq.deriv(x) / (s * std::sqrt(s));
  });
}

void FunctionalSpec::validate(int num_vel_dofs) const {
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw InvalidInput("functional weights must be nonnegative");
  if (variant == Variant::PerimeterTracking) {
    if (!target)
      throw InvalidInput("tracking functional requires a target velocity");
    if (num_vel_dofs >= 0 && target->size() != num_vel_dofs)
      throw InvalidInput("target velocity does not match the given space");
  } else if (target) {
    throw InvalidInput("target velocity is only meaningful for tracking");
  }
}

double FunctionalSpec::perimeter_weight() const {
  return perimeter_weight_for(variant, alpha);
}

namespace {

void check_state_matches(const ControlFunction& q, const StateSolution& state,
                         const TaylorHoodSpace& space, const char* what) {
  if (state.velocity.size() != space.num_vel_dofs)
    throw InvalidInput(std::string(what) +
                       ": state does not match the given space");
  if (state.q.grid().nodes != q.grid().nodes ||
      state.q.values() != q.values())
    throw InvalidInput(std::string(what) +
                       ": state was solved at a different control");
}

double regularization_term(const ControlFunction& q,
                           const FunctionalSpec& spec) {
  if (spec.variant == Variant::CurvatureEnergy)
    return spec.alpha * curvature_inner(q, q);
  return spec.perimeter_weight() * perimeter_length(q);
}

double regularization_derivative(const ControlFunction& q,
                                 const ControlFunction& dq,
                                 const FunctionalSpec& spec) {
  if (spec.variant == Variant::CurvatureEnergy)
    return 2.0 * spec.alpha * curvature_inner(q, dq);
  return spec.perimeter_weight() * perimeter_first_variation(q, dq);
}

}  // namespace

FunctionalBreakdown eval_functional(
    const ControlFunction& q, const StateSolution& state,
    const FunctionalSpec& spec, const TaylorHoodSpace& space, Policy policy,
    std::shared_ptr<const AssembledOperator> gram) {
  spec.validate(space.num_vel_dofs);
  check_state_matches(q, state, space, "eval_functional");

  Vec w = state.velocity;
  if (spec.variant == Variant::PerimeterTracking) w -= *spec.target;
  if (!gram) gram = assemble_gradient_gram(q, space, policy);

  FunctionalBreakdown out;
  out.flow = w.dot(gram->A * w);
  out.regularization = regularization_term(q, spec);
  const double gap = q.integral() - spec.vbar;
  out.volume = spec.beta * gap * gap;
  out.total = out.flow + out.regularization + out.volume;
  return out;
}

namespace {

// Reference gradient (rows = components) of a velocity coefficient field at
// a point of the triangle with the given index.
Mat2 element_gradient(const TaylorHoodSpace& space, const Vec& coeffs,
                      int tri, double r, double s) {
  const auto& t = space.mesh.triangles[tri];
  const Vec2 v0 = space.mesh.vertices[t[0]];
  const Vec2 e1 = space.mesh.vertices[t[1]] - v0;
  const Vec2 e2 = space.mesh.vertices[t[2]] - v0;
  Mat2 J;
  J << e1.x(), e2.x(), e1.y(), e2.y();
  const Mat2 JinvT = J.inverse().transpose();

  double val[6], gref[6][2];
  p2_shapes(r, s, val, gref);

  Mat2 G = Mat2::Zero();
  const auto& dofs = space.element_p2[tri];
  for (int a = 0; a < 6; ++a) {
    const Vec2 g = JinvT * Vec2(gref[a][0], gref[a][1]);
    for (int c = 0; c < 2; ++c)
      G.row(c) += coeffs[space.vel_dof(dofs[a], c)] * g.transpose();
  }
  return G;
}

Vec2 wall_trace(const TaylorHoodSpace& space, const Vec& coeffs, int cell,
                double t) {
  const int n = space.n;
  const int na = space.p2_node_at(2 * cell, 0);
  const int nm = space.p2_node_at(2 * cell + 1, 0);
  const int nb = space.p2_node_at(2 * cell + 2, 0);
  const double sa = (1.0 - t) * (1.0 - 2.0 * t);
  const double sm = 4.0 * t * (1.0 - t);
  const double sb = t * (2.0 * t - 1.0);
  (void)n;
  Vec2 v;
  for (int c = 0; c < 2; ++c)
    v[c] = sa * coeffs[space.vel_dof(na, c)] +
           sm * coeffs[space.vel_dof(nm, c)] +
           sb * coeffs[space.vel_dof(nb, c)];
  return v;
}

// L2 projection of the quadrature samples onto piecewise-linear functions on
// the given grid (exact tridiagonal mass matrix, dense solve).
ControlFunction project_samples(const std::vector<double>& xs,
                                const std::vector<double>& ws,
                                const std::vector<double>& vals,
                                const ControlGrid& grid) {
  const int m = static_cast<int>(grid.nodes.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (int c = 0; c + 1 < m; ++c) {
    const double width = grid.nodes[c + 1] - grid.nodes[c];
    M(c, c) += width / 3.0;
    M(c + 1, c + 1) += width / 3.0;
    M(c, c + 1) += width / 6.0;
    M(c + 1, c) += width / 6.0;
  }
  Vec rhs = Vec::Zero(m);
  for (size_t s = 0; s < xs.size(); ++s) {
    auto it = std::upper_bound(grid.nodes.begin(), grid.nodes.end(), xs[s]);
    int c = static_cast<int>(it - grid.nodes.begin()) - 1;
    c = std::clamp(c, 0, m - 2);
    const double width = grid.nodes[c + 1] - grid.nodes[c];
    const double t = (xs[s] - grid.nodes[c]) / width;
    rhs[c] += ws[s] * vals[s] * (1.0 - t);
    rhs[c + 1] += ws[s] * vals[s] * t;
  }
  const Vec sol = M.ldlt().solve(rhs);
  return ControlFunction(grid, 1,
                         std::vector<double>(sol.data(), sol.data() + m));
}

// Local control basis on one cell: values and tau-derivatives of the deg+1
// equispaced Lagrange nodes at local coordinate tau.  Matches the node layout
// ControlFunction evaluates with (global value index cell*deg + i).
int control_cell_basis(int deg, double tau, double* val, double* der) {
  if (deg == 1) {
    val[0] = 1.0 - tau;
    val[1] = tau;
    der[0] = -1.0;
    der[1] = 1.0;
    return 2;
  }
  const int m = deg + 1;
  for (int i = 0; i < m; ++i) {
    const double xi = static_cast<double>(i) / deg;
    double v = 1.0, d = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double xj = static_cast<double>(j) / deg;
      const double den = xi - xj;
      d = (d * (tau - xj) + v) / den;
      v *= (tau - xj) / den;
    }
    val[i] = v;
    der[i] = d;
  }
  return m;
}

// sum_c grad(a_c)^T K grad(b_c) for gradient matrices with component rows.
double trace_form(const Mat2& Ga, const Mat2& K, const Mat2& Gb) {
  return (Ga * K).cwiseProduct(Gb).sum();
}

// Dual vector of the flow term over the control basis: entry j is the
// derivative of the flow functional along the j-th control value, obtained
// from the state/adjoint pairing in a single volume sweep (no sensitivity
// solves).  Element contributions are collected as (index, value) pairs and
// replayed in element order, so with a static schedule the parallel sums are
// bitwise identical to the serial ones.
Vec flow_dual_vector(const ControlFunction& q, const Vec& u, const Vec& p,
                     const Vec& w, const Vec& z, const Vec& s,
                     const ProblemData& data, const TaylorHoodSpace& space,
                     Policy policy) {
  const int deg = q.degree();
  const auto& grid = q.grid();
  const int ncells = grid.num_cells();
  const auto& rule = triangle_rule_deg4();
  const long ne = static_cast<long>(space.mesh.triangles.size());
  const bool has_force = static_cast<bool>(data.force.value);

  auto element_contrib = [&](long e,
                             std::vector<std::pair<int, double>>& out) {
    const auto& tri = space.mesh.triangles[e];
    const Vec2 v0 = space.mesh.vertices[tri[0]];
    const Vec2 e1 = space.mesh.vertices[tri[1]] - v0;
    const Vec2 e2 = space.mesh.vertices[tri[2]] - v0;
    Mat2 J;
    J << e1.x(), e2.x(), e1.y(), e2.y();
    const double area = 0.5 * (J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0));
    const Mat2 JinvT = J.inverse().transpose();
    const auto& p2d = space.element_p2[e];
    const auto& p1d = space.element_p1[e];

    for (const auto& qp : rule.points) {
      const Vec2 xy = v0 + J * Vec2(qp.r, qp.s);
      const double x = xy.x(), y = xy.y();

      double val[6], gref[6][2];
      p2_shapes(qp.r, qp.s, val, gref);
      double pval[3], pgrad[3][2];
      p1_shapes(qp.r, qp.s, pval, pgrad);

      Vec2 uv = Vec2::Zero(), zv = Vec2::Zero();
      Mat2 Gu = Mat2::Zero(), Gz = Mat2::Zero(), Gw = Mat2::Zero();
      for (int a = 0; a < 6; ++a) {
        const Vec2 g = JinvT * Vec2(gref[a][0], gref[a][1]);
        for (int c = 0; c < 2; ++c) {
          const double uc = u[space.vel_dof(p2d[a], c)];
          const double zc = z[space.vel_dof(p2d[a], c)];
          const double wc = w[space.vel_dof(p2d[a], c)];
          uv[c] += val[a] * uc;
          zv[c] += val[a] * zc;
          Gu.row(c) += uc * g.transpose();
          Gz.row(c) += zc * g.transpose();
          Gw.row(c) += wc * g.transpose();
        }
      }
      double ph = 0.0, sh = 0.0;
      for (int k = 0; k < 3; ++k) {
        ph += pval[k] * p[p1d[k]];
        sh += pval[k] * s[p1d[k]];
      }

      const double q0 = q.eval(x);
      const double q1 = q.deriv(x);
      const double gamma = 1.0 - q0;
      const double oy = 1.0 - y;
      const double yt = y + oy * q0;
      const double a22n = oy * oy * q1 * q1 + 1.0;

      Mat2 A, E_val, E_der;
      A << gamma, -oy * q1, -oy * q1, a22n / gamma;
      E_val << -1.0, 0.0, 0.0, a22n / (gamma * gamma);
      E_der << 0.0, -oy, -oy, 2.0 * oy * oy * q1 / gamma;

      const double nu = data.nu.at(x, yt);
      const double nu_y = data.nu.at_dy(x, yt);
      const double eta = data.eta.at(x, yt);
      const double eta_y = data.eta.at_dy(x, yt);
      const double mass_val = gamma * oy * eta_y - eta;
      const Mat2 K_val = nu * E_val + oy * nu_y * A;
      const Mat2 K_der = nu * E_der;

      // Per-unit-delta-q and per-unit-delta-q' integrands of the pairing
      //   wT Gdot w + zT Fdot - zT Adot u - zT Bdot^T p - sT Bdot u,
      // the same sums eval_directional_derivative assembles, reorganized per
      // quadrature point.  cof(DT)dot contributes -G(0,0) per unit value and
      // -(1-y) G(0,1) per unit slope through the divergence form's sign.
      double c0 = trace_form(Gw, E_val, Gw) -
                  (mass_val * uv.dot(zv) + trace_form(Gu, K_val, Gz)) -
                  ph * Gz(0, 0) - sh * Gu(0, 0);
      if (has_force) {
        const Vec2 fdot =
            -data.force.at(x, yt) + gamma * oy * data.force.at_dy(x, yt);
        c0 += zv.dot(fdot);
      }
      const double c1 = trace_form(Gw, E_der, Gw) -
                        trace_form(Gu, K_der, Gz) -
                        oy * (ph * Gz(0, 1) + sh * Gu(0, 1));

      auto it = std::upper_bound(grid.nodes.begin(), grid.nodes.end(), x);
      int cc = static_cast<int>(it - grid.nodes.begin()) - 1;
      cc = std::clamp(cc, 0, ncells - 1);
      const double hcell = grid.nodes[cc + 1] - grid.nodes[cc];
      const double tau = (x - grid.nodes[cc]) / hcell;
      double bv[8], bd[8];
      const int m = control_cell_basis(deg, tau, bv, bd);

      const double wq = qp.w * area;
      for (int i = 0; i < m; ++i)
        out.emplace_back(cc * deg + i, wq * (c0 * bv[i] + c1 * bd[i] / hcell));
    }
  };

  std::vector<std::vector<std::pair<int, double>>> buf;
  if (policy == Policy::Serial || max_threads() == 1) {
    buf.resize(1);
    buf[0].reserve(static_cast<size_t>(ne) * rule.points.size() * (deg + 1));
    for (long e = 0; e < ne; ++e) element_contrib(e, buf[0]);
  } else {
    const int nt = max_threads();
    buf.resize(nt);
#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
    {
      const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
      for (long e = 0; e < ne; ++e) element_contrib(e, buf[tid]);
    }
#else
    for (long e = 0; e < ne; ++e) element_contrib(e, buf[0]);
#endif
  }

  Vec d = Vec::Zero(q.values().size());
  for (const auto& list : buf)
    for (const auto& [idx, v] : list) d[idx] += v;
  return d;
}

// L2 Riesz representative of the dual vector in the control space with the
// endpoint values pinned to zero (admissible directions vanish there, so the
// pinned rows carry no information).
ControlFunction riesz_on_grid(Vec d, const ControlFunction& q) {
  const auto& grid = q.grid();
  const int deg = q.degree();
  const int nvals = static_cast<int>(q.values().size());
  const Gauss5& g = gauss5();

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nvals, nvals);
  double bv[8], bd[8];
  for (int c = 0; c < grid.num_cells(); ++c) {
    const double h = grid.nodes[c + 1] - grid.nodes[c];
    for (int k = 0; k < 5; ++k) {
      const int m = control_cell_basis(deg, g.t[k], bv, bd);
      const double wq = g.w[k] * h;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          M(c * deg + i, c * deg + j) += wq * bv[i] * bv[j];
    }
  }
  for (int pin : {0, nvals - 1}) {
    M.row(pin).setZero();
    M.col(pin).setZero();
    M(pin, pin) = 1.0;
    d[pin] = 0.0;
  }
  const Vec psi = M.ldlt().solve(d);
  return ControlFunction(
      grid, deg, std::vector<double>(psi.data(), psi.data() + nvals));
}

}  // namespace

double GradientDensity::inner(const ControlFunction& dq) const {
  double acc = 0.0;
  for (size_t s = 0; s < sample_x.size(); ++s)
    acc += sample_weight[s] * sample_flow[s] * dq.eval(sample_x[s]);
  acc += 2.0 * beta * (q.integral() - vbar) * dq.integral();
  if (variant == Variant::CurvatureEnergy) {
    acc += 2.0 * alpha * curvature_inner(q, dq);
  } else {
    acc += perimeter_weight_for(variant, alpha) *
           perimeter_first_variation(q, dq);
  }
  return acc;
}

GradientDensity eval_gradient_density(const ControlFunction& q,
                                      const StateSolution& state,
                                      const AdjointSolution& adjoint,
                                      const FunctionalSpec& spec,
                                      const ProblemData& data,
                                      const TaylorHoodSpace& space) {
  spec.validate(space.num_vel_dofs);
  check_state_matches(q, state, space, "eval_gradient_density");
  if (adjoint.variant != spec.variant)
    throw InvalidInput("adjoint was solved for a different variant");
  if (adjoint.z.size() != space.num_vel_dofs)
    throw InvalidInput("adjoint does not match the given space");

  Vec w = state.velocity;
  if (spec.variant == Variant::PerimeterTracking) w -= *spec.target;

  GradientDensity den;
  den.variant = spec.variant;
  den.alpha = spec.alpha;
  den.beta = spec.beta;
  den.vbar = spec.vbar;
  den.q = q;

  const bool perimeter = spec.variant != Variant::CurvatureEnergy;
  const double lam = spec.perimeter_weight();
  const double vol_const = 2.0 * spec.beta * (q.integral() - spec.vbar);

  // Discrete q'' proxy for the pointwise curvature-of-graph term.
  ControlFunction d2q;
  if (perimeter && q.degree() == 1)
    d2q = ControlFunction(q.grid(), 1, q.second_difference_quotients());

  const int n = space.n;
  const auto& erule = edge_rule_deg7();
  den.sample_x.reserve(static_cast<size_t>(n) * erule.points.size());

  for (int cell = 0; cell < n; ++cell) {
    const int tri = space.gamma0_triangle(cell);
    for (const auto& ep : erule.points) {
      const double x = (cell + ep.t) / n;
      const double weight = ep.w / n;

      const double q0 = q.eval(x);
      const double q1 = q.deriv(x);
      const double gamma = 1.0 - q0;
      Mat2 DTinv;
      DTinv << 1.0, 0.0, -q1 / gamma, 1.0 / gamma;
      const double len = std::sqrt(1.0 + q1 * q1);
      const Vec2 normal(q1 / len, -1.0 / len);
      const double nu_wall = data.nu.at(x, q0);

      const Mat2 Gw = element_gradient(space, w, tri, ep.t, 0.0);
      const Mat2 Gz = element_gradient(space, adjoint.z, tri, ep.t, 0.0);

      double flow;
      if (spec.gradient_form == GradientForm::GradientCorrected) {
        const Vec2 dw = (Gw * DTinv) * normal;
        const Vec2 dz = (Gz * DTinv) * normal;
        flow = dw.dot(dw - nu_wall * dz);
      } else {
        const Vec2 m = DTinv * DTinv.transpose() * normal;
        const Vec2 first = Gw * m;
        const Vec2 second =
            nu_wall * (Gz * m) - wall_trace(space, state.velocity, cell, ep.t);
        flow = first.dot(second);
      }

      double total = flow + vol_const;
      if (perimeter) {
        const double qdd =
            q.degree() == 1 ? d2q.eval(x) : q.second_deriv(x);
        total += -lam * qdd / (len * len * len);
      }

      den.sample_x.push_back(x);
      den.sample_weight.push_back(weight);
      den.sample_flow.push_back(flow);
      den.sample_total.push_back(total);
    }
  }

  den.on_grid =
      project_samples(den.sample_x, den.sample_weight, den.sample_total,
                      q.grid());
  return den;
}

GradientDensity eval_gradient_dual(const ControlFunction& q,
                                   const StateSolution& state,
                                   const AdjointSolution& adjoint,
                                   const FunctionalSpec& spec,
                                   const ProblemData& data,
                                   const TaylorHoodSpace& space,
                                   Policy policy) {
  spec.validate(space.num_vel_dofs);
  check_state_matches(q, state, space, "eval_gradient_dual");
  if (adjoint.variant != spec.variant)
    throw InvalidInput("adjoint was solved for a different variant");
  if (adjoint.z.size() != space.num_vel_dofs)
    throw InvalidInput("adjoint does not match the given space");

  Vec w = state.velocity;
  if (spec.variant == Variant::PerimeterTracking) w -= *spec.target;

  const Vec dual =
      flow_dual_vector(q, state.velocity, state.pressure, w, adjoint.z,
                       adjoint.s, data, space, policy);
  const ControlFunction psi = riesz_on_grid(dual, q);

  GradientDensity den;
  den.variant = spec.variant;
  den.alpha = spec.alpha;
  den.beta = spec.beta;
  den.vbar = spec.vbar;
  den.q = q;

  const bool perimeter = spec.variant != Variant::CurvatureEnergy;
  const double lam = spec.perimeter_weight();
  const double vol_const = 2.0 * spec.beta * (q.integral() - spec.vbar);

  ControlFunction d2q;
  if (perimeter && q.degree() == 1)
    d2q = ControlFunction(q.grid(), 1, q.second_difference_quotients());

  const int n = space.n;
  const auto& erule = edge_rule_deg7();
  den.sample_x.reserve(static_cast<size_t>(n) * erule.points.size());

  for (int cell = 0; cell < n; ++cell) {
    for (const auto& ep : erule.points) {
      const double x = (cell + ep.t) / n;
      const double flow = psi.eval(x);

      double total = flow + vol_const;
      if (perimeter) {
        const double q1 = q.deriv(x);
        const double len = std::sqrt(1.0 + q1 * q1);
        const double qdd = q.degree() == 1 ? d2q.eval(x) : q.second_deriv(x);
        total += -lam * qdd / (len * len * len);
      }

      den.sample_x.push_back(x);
      den.sample_weight.push_back(ep.w / n);
      den.sample_flow.push_back(flow);
      den.sample_total.push_back(total);
    }
  }

  den.on_grid =
      project_samples(den.sample_x, den.sample_weight, den.sample_total,
                      q.grid());
  return den;
}

double eval_directional_derivative(
    const ControlFunction& q, const ControlFunction& dq,
    const StateSolution& state, const SensitivitySolution& sens,
    const FunctionalSpec& spec, const TaylorHoodSpace& space, Policy policy,
    std::shared_ptr<const AssembledOperator> gram) {
  spec.validate(space.num_vel_dofs);
  check_state_matches(q, state, space, "eval_directional_derivative");
  if (sens.order != 1 || sens.velocity.size() != space.num_vel_dofs)
    throw InvalidInput("sensitivity does not match the given space");

  Vec w = state.velocity;
  if (spec.variant == Variant::PerimeterTracking) w -= *spec.target;
  if (!gram) gram = assemble_gradient_gram(q, space, policy);

  auto adot_coef = [&q, &dq](double x, double y) {
    FormCoefficients fc;
    fc.K = map_first_variation(q, dq, x, y).A_dot;
    return fc;
  };
  const AssembledOperator adot_gram =
      assemble_operator(space, adot_coef, policy);

  double acc = w.dot(adot_gram.A * w);
  acc += 2.0 * sens.velocity.dot(gram->A * w);
  acc += regularization_derivative(q, dq, spec);
  acc += 2.0 * spec.beta * (q.integral() - spec.vbar) * dq.integral();
  return acc;
}

double eval_second_derivative(
    const ControlFunction& q, const ControlFunction& dq,
    const ControlFunction& tq, const StateSolution& state,
    const SensitivitySolution& sens_dq, const SensitivitySolution& sens_tq,
    const SensitivitySolution& sens2, const FunctionalSpec& spec,
    const TaylorHoodSpace& space, Policy policy,
    std::shared_ptr<const AssembledOperator> gram) {
  spec.validate(space.num_vel_dofs);
  check_state_matches(q, state, space, "eval_second_derivative");
  if (sens_dq.velocity.size() != space.num_vel_dofs ||
      sens_tq.velocity.size() != space.num_vel_dofs ||
      sens2.velocity.size() != space.num_vel_dofs || sens2.order != 2)
    throw InvalidInput("sensitivities do not match the given space");

  Vec w = state.velocity;
  if (spec.variant == Variant::PerimeterTracking) w -= *spec.target;
  if (!gram) gram = assemble_gradient_gram(q, space, policy);

  auto addot_coef = [&](double x, double y) {
    FormCoefficients fc;
    fc.K = map_second_variation(q, dq, tq, x, y).A_ddot;
    return fc;
  };
  auto adot_coef_d = [&](double x, double y) {
    FormCoefficients fc;
    fc.K = map_first_variation(q, dq, x, y).A_dot;
    return fc;
  };
  auto adot_coef_t = [&](double x, double y) {
    FormCoefficients fc;
    fc.K = map_first_variation(q, tq, x, y).A_dot;
    return fc;
  };
  const AssembledOperator g_ddot = assemble_operator(space, addot_coef, policy);
  const AssembledOperator g_dot_d =
      assemble_operator(space, adot_coef_d, policy);
  const AssembledOperator g_dot_t =
      assemble_operator(space, adot_coef_t, policy);

  double acc = w.dot(g_ddot.A * w);
  acc += 2.0 * sens_tq.velocity.dot(g_dot_d.A * w);
  acc += 2.0 * sens_dq.velocity.dot(g_dot_t.A * w);
  acc += 2.0 * sens_dq.velocity.dot(gram->A * sens_tq.velocity);
  acc += 2.0 * sens2.velocity.dot(gram->A * w);

  if (spec.variant == Variant::CurvatureEnergy)
    acc += 2.0 * spec.alpha * curvature_inner(dq, tq);
  else
    acc += spec.perimeter_weight() * perimeter_second_variation(q, dq, tq);
  acc += 2.0 * spec.beta * dq.integral() * tq.integral();
  return acc;
}

}  // namespace stokeshape
