#include "stokeshape/assembly.hpp"

#include <atomic>
#include <cmath>
#include <exception>

#include "stokeshape/quadrature.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stokeshape {

namespace {

struct ElementGeometry {
  Vec2 v0;
  Mat2 J;       // columns v1-v0, v2-v0
  Mat2 JinvT;
  double area;
};

ElementGeometry element_geometry(const Mesh& mesh, size_t e) {
  const auto& t = mesh.triangles[e];
  ElementGeometry g;
  g.v0 = mesh.vertices[t[0]];
  const Vec2 e1 = mesh.vertices[t[1]] - g.v0;
  const Vec2 e2 = mesh.vertices[t[2]] - g.v0;
  g.J << e1.x(), e2.x(), e1.y(), e2.y();
  const double det = g.J.determinant();
  g.area = 0.5 * det;
  Mat2 Jinv;
  Jinv << e2.y(), -e2.x(), -e1.y(), e1.x();
  Jinv /= det;
  g.JinvT = Jinv.transpose();
  return g;
}

// Shape data cached at the quadrature points of the reference triangle.
struct ShapeCache {
  struct Point {
    double r, s, w;
    double p2val[6];
    double p2grad_ref[6][2];
    double p1val[3];
  };
  std::vector<Point> pts;

  ShapeCache() {
    for (const auto& qp : triangle_rule_deg4().points) {
      Point p;
      p.r = qp.r;
      p.s = qp.s;
      p.w = qp.w;
      double g1[3][2];
      p2_shapes(qp.r, qp.s, p.p2val, p.p2grad_ref);
      p1_shapes(qp.r, qp.s, p.p1val, g1);
      pts.push_back(p);
    }
  }
};

const ShapeCache& shape_cache() {
  static const ShapeCache c;
  return c;
}

void assemble_element(const TaylorHoodSpace& space, const CoefficientFn& coef,
                      size_t e, std::vector<Triplet>& outA,
                      std::vector<Triplet>& outB) {
  const ElementGeometry geo = element_geometry(space.mesh, e);
  const auto& p2dofs = space.element_p2[e];
  const auto& p1dofs = space.element_p1[e];

  double locA[6][6];       // component-diagonal block, same for both comps
  double locB[3][6][2];    // pressure node x velocity node x component
  for (auto& row : locA)
    for (auto& v : row) v = 0.0;
  for (auto& k : locB)
    for (auto& row : k)
      for (auto& v : row) v = 0.0;

  bool has_mass_or_K = false, has_C = false;
  for (const auto& qp : shape_cache().pts) {
    const Vec2 xy = geo.v0 + geo.J * Vec2(qp.r, qp.s);
    const FormCoefficients fc = coef(xy.x(), xy.y());
    const double w = qp.w * geo.area;

    Vec2 grad[6];
    for (int a = 0; a < 6; ++a)
      grad[a] = geo.JinvT *
                Vec2(qp.p2grad_ref[a][0], qp.p2grad_ref[a][1]);

    if (fc.mass != 0.0 || !fc.K.isZero(0.0)) {
      has_mass_or_K = true;
      for (int a = 0; a < 6; ++a) {
        const Vec2 Kga = fc.K * grad[a];
        for (int b = 0; b < 6; ++b) {
          // test a, trial b: mass u.v + grad(u_c)^T K grad(v_c)
          locA[a][b] += w * (fc.mass * qp.p2val[a] * qp.p2val[b] +
                             grad[b].dot(Kga));
        }
      }
    }
    if (!fc.C.isZero(0.0)) {
      has_C = true;
      for (int k = 0; k < 3; ++k) {
        const double pk = -w * qp.p1val[k];
        for (int b = 0; b < 6; ++b) {
          locB[k][b][0] += pk * (grad[b].x() * fc.C(0, 0) +
                                 grad[b].y() * fc.C(0, 1));
          locB[k][b][1] += pk * (grad[b].x() * fc.C(1, 0) +
                                 grad[b].y() * fc.C(1, 1));
        }
      }
    }
  }

  if (has_mass_or_K) {
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) {
        if (locA[a][b] == 0.0) continue;
        for (int c = 0; c < 2; ++c)
          outA.emplace_back(space.vel_dof(p2dofs[a], c),
                            space.vel_dof(p2dofs[b], c), locA[a][b]);
      }
  }
  if (has_C) {
    for (int k = 0; k < 3; ++k)
      for (int b = 0; b < 6; ++b)
        for (int c = 0; c < 2; ++c) {
          if (locB[k][b][c] == 0.0) continue;
          outB.emplace_back(p1dofs[k], space.vel_dof(p2dofs[b], c),
                            locB[k][b][c]);
        }
  }
}

}  // namespace

AssembledOperator assemble_operator(const TaylorHoodSpace& space,
                                    const CoefficientFn& coef, Policy policy) {
  const size_t ne = space.mesh.triangles.size();
  std::vector<Triplet> tripA, tripB;

  if (policy == Policy::Serial || max_threads() == 1) {
    tripA.reserve(ne * 72);
    tripB.reserve(ne * 36);
    for (size_t e = 0; e < ne; ++e)
      assemble_element(space, coef, e, tripA, tripB);
  } else {
    const int nt = max_threads();
    std::vector<std::vector<Triplet>> bufA(nt), bufB(nt);
#ifdef _OPENMP
    // A coefficient function may throw (e.g. a degenerate map during a line
    // search); exceptions cannot leave an OpenMP region, so capture the first
    // one and rethrow after the join.
    std::exception_ptr err = nullptr;
    std::atomic<bool> failed{false};
#pragma omp parallel num_threads(nt)
    {
      const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
      for (long e = 0; e < static_cast<long>(ne); ++e) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
          assemble_element(space, coef, static_cast<size_t>(e), bufA[tid],
                           bufB[tid]);
        } catch (...) {
#pragma omp critical(stokeshape_assemble_err)
          {
            if (!err) err = std::current_exception();
          }
          failed.store(true, std::memory_order_relaxed);
        }
      }
    }
    if (err) std::rethrow_exception(err);
#else
    for (size_t e = 0; e < ne; ++e)
      assemble_element(space, coef, e, bufA[0], bufB[0]);
#endif
    // merge in thread order; with a static schedule this reproduces the
    // serial element order, so sums are bitwise identical to the serial path
    for (int t = 0; t < nt; ++t) {
      tripA.insert(tripA.end(), bufA[t].begin(), bufA[t].end());
      tripB.insert(tripB.end(), bufB[t].begin(), bufB[t].end());
    }
  }

  AssembledOperator op;
  op.A.resize(space.num_vel_dofs, space.num_vel_dofs);
  op.A.setFromTriplets(tripA.begin(), tripA.end());
  op.B.resize(space.num_pressure_dofs, space.num_vel_dofs);
  op.B.setFromTriplets(tripB.begin(), tripB.end());
  return op;
}

Vec assemble_load(const TaylorHoodSpace& space, const VectorFieldFn& field,
                  Policy policy) {
  (void)policy;  // the load loop is cheap; kept serial for determinism
  Vec load = Vec::Zero(space.num_vel_dofs);
  const size_t ne = space.mesh.triangles.size();
  for (size_t e = 0; e < ne; ++e) {
    const ElementGeometry geo = element_geometry(space.mesh, e);
    const auto& p2dofs = space.element_p2[e];
    for (const auto& qp : shape_cache().pts) {
      const Vec2 xy = geo.v0 + geo.J * Vec2(qp.r, qp.s);
      const Vec2 F = field(xy.x(), xy.y());
      if (F.x() == 0.0 && F.y() == 0.0) continue;
      const double w = qp.w * geo.area;
      for (int a = 0; a < 6; ++a) {
        load[space.vel_dof(p2dofs[a], 0)] += w * qp.p2val[a] * F.x();
        load[space.vel_dof(p2dofs[a], 1)] += w * qp.p2val[a] * F.y();
      }
    }
  }
  return load;
}

Vec assemble_boundary_load(const TaylorHoodSpace& space, int tag,
                           const VectorFieldFn& field) {
  Vec load = Vec::Zero(space.num_vel_dofs);
  const int n = space.n;
  for (const auto& edge : space.mesh.boundary_edges) {
    if (edge.tag != tag) continue;
    const Vec2 pa = space.mesh.vertices[edge.a];
    const Vec2 pb = space.mesh.vertices[edge.b];
    const double len = (pb - pa).norm();
    // P2 nodes along the edge: endpoints and midpoint (lattice average).
    auto lattice = [&](int vtx) {
      return std::pair<int, int>{2 * (vtx % (n + 1)), 2 * (vtx / (n + 1))};
    };
    const auto [ax, ay] = lattice(edge.a);
    const auto [bx, by] = lattice(edge.b);
    const int na = space.p2_node_at(ax, ay);
    const int nb = space.p2_node_at(bx, by);
    const int nm = space.p2_node_at((ax + bx) / 2, (ay + by) / 2);
    for (const auto& qp : edge_rule_deg7().points) {
      const double t = qp.t;
      const Vec2 xy = pa + t * (pb - pa);
      const Vec2 g = field(xy.x(), xy.y());
      const double w = qp.w * len;
      const double sh[3] = {(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0),
                            4.0 * t * (1.0 - t)};
      const int nodes[3] = {na, nb, nm};
      for (int i = 0; i < 3; ++i) {
        load[space.vel_dof(nodes[i], 0)] += w * sh[i] * g.x();
        load[space.vel_dof(nodes[i], 1)] += w * sh[i] * g.y();
      }
    }
  }
  return load;
}

SpMat assemble_pressure_mass(const TaylorHoodSpace& space) {
  std::vector<Triplet> trip;
  const size_t ne = space.mesh.triangles.size();
  for (size_t e = 0; e < ne; ++e) {
    const ElementGeometry geo = element_geometry(space.mesh, e);
    const auto& p1dofs = space.element_p1[e];
    double loc[3][3] = {};
    for (const auto& qp : shape_cache().pts) {
      const double w = qp.w * geo.area;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) loc[a][b] += w * qp.p1val[a] * qp.p1val[b];
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        trip.emplace_back(p1dofs[a], p1dofs[b], loc[a][b]);
  }
  SpMat M(space.num_pressure_dofs, space.num_pressure_dofs);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

SaddleSystem::SaddleSystem(const TaylorHoodSpace& space,
                           std::shared_ptr<const AssembledOperator> op,
                           Vec dirichlet)
    : nv_(space.num_vel_dofs),
      np_(space.num_pressure_dofs),
      op_(std::move(op)),
      dirichlet_(std::move(dirichlet)),
      vel_bc_(space.vel_bc) {
  if (dirichlet_.size() != nv_)
    throw InvalidInput("dirichlet vector size mismatch");
  if (op_->A.rows() != nv_ || op_->B.rows() != np_ || op_->B.cols() != nv_)
    throw InvalidInput("operator block size mismatch");

  std::vector<Triplet> trip;
  trip.reserve(op_->A.nonZeros() + 2 * op_->B.nonZeros() + nv_);
  for (int col = 0; col < op_->A.outerSize(); ++col) {
    const bool col_constr = vel_bc_[col] != TaylorHoodSpace::VelBC::Free;
    for (SpMat::InnerIterator it(op_->A, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (vel_bc_[row] != TaylorHoodSpace::VelBC::Free || col_constr) continue;
      trip.emplace_back(row, col, it.value());
    }
  }
  for (int col = 0; col < op_->B.outerSize(); ++col) {
    if (vel_bc_[col] != TaylorHoodSpace::VelBC::Free) continue;
    for (SpMat::InnerIterator it(op_->B, col); it; ++it) {
      const int prow = nv_ + static_cast<int>(it.row());
      trip.emplace_back(prow, col, it.value());
      trip.emplace_back(col, prow, it.value());
    }
  }
  for (int d = 0; d < nv_; ++d)
    if (vel_bc_[d] != TaylorHoodSpace::VelBC::Free)
      trip.emplace_back(d, d, 1.0);

  K_.resize(nv_ + np_, nv_ + np_);
  K_.setFromTriplets(trip.begin(), trip.end());
  K_.makeCompressed();
}

Vec SaddleSystem::constrained_rhs(const Vec& vel_load, const Vec& p_load,
                                  bool zero_dirichlet) const {
  if (vel_load.size() != nv_ || p_load.size() != np_)
    throw InvalidInput("load vector size mismatch");
  Vec rhs(nv_ + np_);
  if (zero_dirichlet) {
    rhs.head(nv_) = vel_load;
    rhs.tail(np_) = p_load;
    for (int d = 0; d < nv_; ++d)
      if (vel_bc_[d] != TaylorHoodSpace::VelBC::Free) rhs[d] = 0.0;
    return rhs;
  }
  rhs.head(nv_) = vel_load - op_->A * dirichlet_;
  rhs.tail(np_) = p_load - op_->B * dirichlet_;
  for (int d = 0; d < nv_; ++d)
    if (vel_bc_[d] != TaylorHoodSpace::VelBC::Free) rhs[d] = dirichlet_[d];
  return rhs;
}

Vec SaddleSystem::solve(const Vec& rhs, double tol) {
  if (rhs.size() != nv_ + np_) throw InvalidInput("rhs size mismatch");
  if (!factorized_) {
    lu_ = std::make_shared<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
    lu_->compute(K_);
    if (lu_->info() != Eigen::Success)
      throw NumericalFailure("sparse LU factorization of the saddle system failed");
    factorized_ = true;
  }
  Vec x = lu_->solve(rhs);
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  last_residual_ = (K_ * x - rhs).lpNorm<Eigen::Infinity>() / scale;
  if (!(last_residual_ <= tol))
    throw NumericalFailure("saddle solve residual " +
                           std::to_string(last_residual_) +
                           " exceeds tolerance " + std::to_string(tol));
  return x;
}

}  // namespace stokeshape
