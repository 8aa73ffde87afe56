#include "stokeshape/stokes.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <vector>

#include "stokeshape/geometry.hpp"
#include "stokeshape/quadrature.hpp"

namespace stokeshape {

ProblemData make_constant_data(double eta, double nu) {
  if (!(nu > 0.0)) throw InvalidInput("viscosity must be positive");
  if (!(eta >= 0.0)) throw InvalidInput("reaction coefficient must be >= 0");
  ProblemData data;
  data.eta.value = [eta](double, double) { return eta; };
  data.nu.value = [nu](double, double) { return nu; };
  return data;
}

ProblemData default_channel_data() {
  ProblemData data = make_constant_data(0.0, 1.0);
  data.inflow = [](double, double y) { return Vec2(y * (2.0 - y), 0.0); };
  return data;
}

CoefficientFn state_coefficients(const ControlFunction& q,
                                 const ProblemData& data) {
  return [&q, &data](double x, double y) {
    const MapQuantities m = map_quantities(q, x, y);
    const double yt = y + (1.0 - y) * q.eval(x);  // physical height
    FormCoefficients fc;
    fc.mass = data.eta.at(x, yt) * m.gamma;
    fc.K = data.nu.at(x, yt) * m.A;
    fc.C = m.cof_DT;
    return fc;
  };
}

namespace {

void validate_coefficients(const ControlFunction& q, const ProblemData& data,
                           const TaylorHoodSpace& space) {
  const auto& rule = triangle_rule_deg4();
  for (const auto& tri : space.mesh.triangles) {
    const Vec2 v0 = space.mesh.vertices[tri[0]];
    const Vec2 e1 = space.mesh.vertices[tri[1]] - v0;
    const Vec2 e2 = space.mesh.vertices[tri[2]] - v0;
    for (const auto& qp : rule.points) {
      const Vec2 xy = v0 + qp.r * e1 + qp.s * e2;
      const Vec2 phys = map_forward(q, xy.x(), xy.y());
      if (!(data.nu.at(phys.x(), phys.y()) > 0.0))
        throw InvalidInput("viscosity must be positive at all sampled points");
      if (!(data.eta.at(phys.x(), phys.y()) >= 0.0))
        throw InvalidInput("reaction coefficient must be >= 0 everywhere");
    }
  }
}

}  // namespace

std::shared_ptr<const AssembledOperator> assemble_state_operator(
    const ControlFunction& q, const ProblemData& data,
    const TaylorHoodSpace& space, Policy policy) {
  validate_coefficients(q, data, space);
  auto op = std::make_shared<AssembledOperator>(
      assemble_operator(space, state_coefficients(q, data), policy));
  return op;
}

Vec state_dirichlet(const ProblemData& data, const TaylorHoodSpace& space) {
  Vec d = Vec::Zero(space.num_vel_dofs);
  if (!data.inflow) return d;
  for (int node = 0; node < space.num_p2_nodes; ++node) {
    const Vec2 xy = space.p2_coords[node];
    for (int c = 0; c < 2; ++c) {
      const int dof = space.vel_dof(node, c);
      if (space.vel_bc[dof] == TaylorHoodSpace::VelBC::Inflow)
        d[dof] = data.inflow(xy.x(), xy.y())[c];
    }
  }
  return d;
}

Vec state_load(const ControlFunction& q, const ProblemData& data,
               const TaylorHoodSpace& space, Policy policy) {
  Vec load = Vec::Zero(space.num_vel_dofs);
  if (data.force.value) {
    auto pulled = [&q, &data](double x, double y) -> Vec2 {
      const double gamma = 1.0 - q.eval(x);
      const double yt = y + (1.0 - y) * q.eval(x);
      return gamma * data.force.at(x, yt);
    };
    load = assemble_load(space, pulled, policy);
  }
  if (data.traction)
    load += assemble_boundary_load(space, space.bc.outflow, data.traction);
  return load;
}

StateSolution solve_state(const ControlFunction& q, const ProblemData& data,
                          const TaylorHoodSpace& space, Policy policy) {
  StateSolution sol;
  sol.q = q;
  sol.op = assemble_state_operator(q, data, space, policy);
  sol.system = std::make_shared<SaddleSystem>(space, sol.op,
                                              state_dirichlet(data, space));

  const Vec vel_load = state_load(q, data, space, policy);
  const Vec p_load = Vec::Zero(space.num_pressure_dofs);
  const Vec rhs = sol.system->constrained_rhs(vel_load, p_load);
  const Vec x = sol.system->solve(rhs);
  sol.solve_residual = sol.system->last_residual();

  sol.velocity = x.head(space.num_vel_dofs);
  sol.pressure = x.tail(space.num_pressure_dofs);

  // In the total-field formulation the discrete incompressibility identity
  // reads B u = 0 exactly (lifting terms cancel).
  const double unorm = std::max(1.0, sol.velocity.lpNorm<Eigen::Infinity>());
  sol.divergence_residual =
      (sol.op->B * sol.velocity).lpNorm<Eigen::Infinity>() / unorm;
  if (!(sol.divergence_residual <= 1e-9))
    throw NumericalFailure("discrete divergence identity violated: " +
                           std::to_string(sol.divergence_residual));
  return sol;
}

std::shared_ptr<const AssembledOperator> assemble_gradient_gram(
    const ControlFunction& q, const TaylorHoodSpace& space, Policy policy) {
  auto coef = [&q](double x, double y) {
    FormCoefficients fc;
    fc.K = map_quantities(q, x, y).A;
    return fc;
  };
  return std::make_shared<AssembledOperator>(
      assemble_operator(space, coef, policy));
}

double estimate_infsup(const ControlFunction& q,
                       const TaylorHoodSpace& space) {
  // Velocity metric: H^1 seminorm on the constrained space.
  auto h1_coef = [](double, double) {
    FormCoefficients fc;
    fc.K = Mat2::Identity();
    return fc;
  };
  const AssembledOperator X = assemble_operator(space, h1_coef, Policy::Serial);

  auto b_coef = [&q](double x, double y) {
    FormCoefficients fc;
    fc.C = map_quantities(q, x, y).cof_DT;
    return fc;
  };
  const AssembledOperator Bop =
      assemble_operator(space, b_coef, Policy::Serial);

  std::vector<int> free_idx;
  free_idx.reserve(space.num_vel_dofs);
  std::vector<int> pos(space.num_vel_dofs, -1);
  for (int d = 0; d < space.num_vel_dofs; ++d)
    if (space.vel_bc[d] == TaylorHoodSpace::VelBC::Free) {
      pos[d] = static_cast<int>(free_idx.size());
      free_idx.push_back(d);
    }
  const int nf = static_cast<int>(free_idx.size());
  const int np = space.num_pressure_dofs;

  std::vector<Triplet> xt;
  for (int col = 0; col < X.A.outerSize(); ++col) {
    if (pos[col] < 0) continue;
    for (SpMat::InnerIterator it(X.A, col); it; ++it)
      if (pos[it.row()] >= 0)
        xt.emplace_back(pos[it.row()], pos[col], it.value());
  }
  SpMat Xff(nf, nf);
  Xff.setFromTriplets(xt.begin(), xt.end());

  Eigen::MatrixXd Bf = Eigen::MatrixXd::Zero(np, nf);
  for (int col = 0; col < Bop.B.outerSize(); ++col) {
    if (pos[col] < 0) continue;
    for (SpMat::InnerIterator it(Bop.B, col); it; ++it)
      Bf(it.row(), pos[col]) = it.value();
  }

  Eigen::SimplicialLLT<SpMat> llt(Xff);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("velocity metric factorization failed");
  const Eigen::MatrixXd Z = llt.solve(Bf.transpose());
  const Eigen::MatrixXd S = Bf * Z;  // pressure Schur complement

  Eigen::MatrixXd Mp = Eigen::MatrixXd(assemble_pressure_mass(space));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Mp);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("inf-sup eigenproblem failed");
  const double lmin = es.eigenvalues()(0);
  if (!(lmin > 0.0))
    throw NumericalFailure("nonpositive inf-sup eigenvalue: " +
                           std::to_string(lmin));
  return std::sqrt(lmin);
}

}  // namespace stokeshape
