#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>

namespace stokeshape {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Thrown when input data violates a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
  explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when a numerical contract fails at runtime (solver residual,
// degenerate map, non-finite values).
class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stokeshape
