#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ibssd {

using Scalar = double;
using Complex = std::complex<double>;

/// Samples along the interface, indexed by the Lagrangian node j (alpha_j = j * dalpha).
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
/// One 2-vector per interface node (column 0 = x component, column 1 = y component).
using NodeVectors = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Fields on the N x N periodic grid. Entry (i, j) lives at x = i*h, y = j*h.
using Grid = Eigen::MatrixXd;
using CGrid = Eigen::MatrixXcd;

using DenseMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorKind {
  invalid_grid,
  domain,
  symmetry,
  invalid_geometry,
  degenerate_parameterization,
  singular_point,
  shape_mismatch,
  parameter,
  no_steady_solution,
  solver,
  solver_stall,
  blowup,
  usage,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown when a time integrator detects a non-finite or runaway state.
class BlowupError : public Error {
 public:
  BlowupError(long step, const std::string& what)
      : Error(ErrorKind::blowup, "step " + std::to_string(step) + ": " + what), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace ibssd
