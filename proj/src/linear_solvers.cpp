#include "ibssd/linear_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ibssd/work_counters.hpp"

namespace ibssd {

Vec dense_solve(const DenseMatrix& A, const Vec& b, double max_condition) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw Error(ErrorKind::shape_mismatch, "dense system dimensions disagree");
  }
  if (!A.allFinite() || !b.allFinite()) throw Error(ErrorKind::solver, "non-finite entries in dense system");
  Eigen::PartialPivLU<DenseMatrix> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / max_condition)) {
    throw Error(ErrorKind::solver, "dense system is singular to working precision (rcond " +
                                       std::to_string(rcond) + ")");
  }
  ++work_counters().dense_solves;
  return lu.solve(b);
}

DenseMatrix probe_matrix(const LinearMap& A, Eigen::Index n) {
  DenseMatrix M(n, n);
  Vec e = Vec::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    const Vec col = A(e);
    if (col.size() != n) throw Error(ErrorKind::shape_mismatch, "linear map changes the vector length");
    M.col(j) = col;
    e(j) = 0.0;
  }
  return M;
}

Vec gmres(const LinearMap& A, const Vec& b, const Vec& x0, const GmresOptions& opts, SolveReport* report) {
  const Eigen::Index n = b.size();
  if (x0.size() != n) throw Error(ErrorKind::shape_mismatch, "initial guess length differs from rhs");
  if (!(opts.tolerance > 0.0)) throw Error(ErrorKind::parameter, "GMRES tolerance must be positive");
  const long max_it = opts.max_iterations > 0 ? opts.max_iterations : 10 * static_cast<long>(n);
  const int m = std::max(1, std::min<int>(opts.restart, static_cast<int>(n)));

  Vec x = x0;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    if (report) *report = SolveReport{0, 0.0};
    return Vec::Zero(n);
  }

  long total = 0;
  Vec r = b - A(x);
  double beta = r.norm();
  DenseMatrix Q(n, m + 1);
  DenseMatrix H = DenseMatrix::Zero(m + 1, m);
  Vec cs(m), sn(m), g(m + 1);

  while (beta / bnorm > opts.tolerance) {
    if (total >= max_it) {
      throw Error(ErrorKind::solver_stall, "GMRES did not converge in " + std::to_string(max_it) +
                                               " iterations (relative residual " + std::to_string(beta / bnorm) +
                                               ")");
    }
    Q.col(0) = r / beta;
    H.setZero();
    g.setZero();
    g(0) = beta;
    int k = 0;
    for (; k < m && total < max_it; ++k) {
      ++total;
      ++work_counters().krylov_iterations;
      Vec w = A(Q.col(k));
      // Modified Gram-Schmidt, twice for stability.
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= k; ++i) {
          const double hij = Q.col(i).dot(w);
          H(i, k) += hij;
          w -= hij * Q.col(i);
        }
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 0.0) Q.col(k + 1) = w / H(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs(i) * H(i, k) + sn(i) * H(i + 1, k);
        H(i + 1, k) = -sn(i) * H(i, k) + cs(i) * H(i + 1, k);
        H(i, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      cs(k) = denom > 0.0 ? H(k, k) / denom : 1.0;
      sn(k) = denom > 0.0 ? H(k + 1, k) / denom : 0.0;
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);
      if (std::abs(g(k + 1)) / bnorm <= opts.tolerance || denom == 0.0) {
        ++k;
        break;
      }
    }
    const Vec y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    x += Q.leftCols(k) * y;
    r = b - A(x);
    const double next = r.norm();
    if (!std::isfinite(next)) throw Error(ErrorKind::solver, "GMRES produced a non-finite residual");
    beta = next;
  }
  if (report) *report = SolveReport{total, beta / bnorm};
  return x;
}

}  // namespace ibssd
