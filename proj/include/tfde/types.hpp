#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace tfde {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Vector lengths do not match an operator's dimensions.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An exactly singular pivot was met while factorizing.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative solver failed to converge; the message carries the trace.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A request exceeded a configured dense-size cap.
struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tfde
