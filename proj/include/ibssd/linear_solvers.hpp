#pragma once

// Dense and matrix-free solvers for the implicit interface systems.

#include <functional>

#include "ibssd/types.hpp"

namespace ibssd {

using LinearMap = std::function<Vec(const Vec&)>;

struct SolveReport {
  long iterations = 0;
  double relative_residual = 0.0;
};

/// LU solve with partial pivoting. Throws ErrorKind::solver when the
/// estimated condition number reaches max_condition.
Vec dense_solve(const DenseMatrix& A, const Vec& b, double max_condition = 1e14);

/// Assembles the matrix of a linear map column by column (one application per column).
DenseMatrix probe_matrix(const LinearMap& A, Eigen::Index n);

struct GmresOptions {
  double tolerance = 1e-10;  // on ||b - A x|| / ||b||
  int restart = 50;
  long max_iterations = 0;   // 0 means 10 n
};

/// Restarted GMRES with Givens rotations. Throws ErrorKind::solver_stall
/// when the tolerance is not reached within the iteration budget.
Vec gmres(const LinearMap& A, const Vec& b, const Vec& x0, const GmresOptions& opts = {},
          SolveReport* report = nullptr);

}  // namespace ibssd
