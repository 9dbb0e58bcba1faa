#include "ibssd/coupling.hpp"

#include <algorithm>
#include <cmath>

namespace ibssd {

GridSpec GridSpec::make(Eigen::Index N, double L, double L_b, Eigen::Index N_b) {
  GridSpec g;
  g.N = N;
  g.L = L;
  g.L_b = L_b;
  g.N_b = N_b > 0 ? N_b : 2 * N;
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (N < 4 || N % 2 != 0) throw Error(ErrorKind::invalid_grid, "N must be even and at least 4");
  if (N_b < 2 || N_b % 2 != 0) throw Error(ErrorKind::invalid_grid, "N_b must be even and positive");
  if (!(L > 0.0) || !(L_b > 0.0)) throw Error(ErrorKind::invalid_grid, "L and L_b must be positive");
}

double peskin_phi(double r) {
  const double a = std::abs(r);
  if (a <= 1.0) {
    return 0.125 * (3.0 - 2.0 * a + std::sqrt(std::max(0.0, 1.0 + 4.0 * a - 4.0 * a * a)));
  }
  if (a < 2.0) {
    return 0.125 * (5.0 - 2.0 * a - std::sqrt(std::max(0.0, -7.0 + 12.0 * a - 4.0 * a * a)));
  }
  return 0.0;
}

namespace {

void axis_stencil(double coord, double h, Eigen::Index n, double length, std::array<Eigen::Index, 4>& idx,
                  std::array<double, 4>& w) {
  double c = std::fmod(coord, length);
  if (c < 0.0) c += length;
  const double s = c / h;
  const auto base = static_cast<Eigen::Index>(std::floor(s)) - 1;
  for (int m = 0; m < 4; ++m) {
    const Eigen::Index i = base + m;
    w[m] = peskin_phi(s - static_cast<double>(i));
    idx[m] = ((i % n) + n) % n;
  }
}

void require_grid_shape(const Eigen::Ref<const Grid>& f, const GridSpec& g) {
  if (f.rows() != g.N || f.cols() != g.N) throw Error(ErrorKind::shape_mismatch, "field does not match the grid");
}

}  // namespace

CouplingOperator::CouplingOperator(const CurveSamples& curve, const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  n_b_ = curve.size();
  if (curve.y.size() != n_b_) throw Error(ErrorKind::shape_mismatch, "x and y lengths differ");
  if (!curve.x.allFinite() || !curve.y.allFinite()) {
    throw Error(ErrorKind::invalid_geometry, "non-finite curve coordinates");
  }
  ix_.resize(n_b_);
  iy_.resize(n_b_);
  wx_.resize(n_b_);
  wy_.resize(n_b_);
  const double h = grid_.h();
  for (Eigen::Index k = 0; k < n_b_; ++k) {
    axis_stencil(curve.x(k), h, grid_.N, grid_.L, ix_[k], wx_[k]);
    axis_stencil(curve.y(k), h, grid_.N, grid_.L, iy_[k], wy_[k]);
  }
}

Grid CouplingOperator::spread(const Eigen::Ref<const Vec>& g) const {
  if (g.size() != n_b_) throw Error(ErrorKind::shape_mismatch, "spread data must have N_b entries");
  const double h = grid_.h();
  const double scale = grid_.dalpha() / (h * h);
  Grid f = Grid::Zero(grid_.N, grid_.N);
  for (Eigen::Index k = 0; k < n_b_; ++k) {
    const double gk = g(k) * scale;
    for (int b = 0; b < 4; ++b) {
      const double wy = wy_[k][b] * gk;
      const Eigen::Index j = iy_[k][b];
      for (int a = 0; a < 4; ++a) f(ix_[k][a], j) += wx_[k][a] * wy;
    }
  }
  return f;
}

std::pair<Grid, Grid> CouplingOperator::spread_vectors(const NodeVectors& g) const {
  return {spread(Vec(g.col(0))), spread(Vec(g.col(1)))};
}

Vec CouplingOperator::interpolate(const Eigen::Ref<const Grid>& field) const {
  require_grid_shape(field, grid_);
  Vec out(n_b_);
  for (Eigen::Index k = 0; k < n_b_; ++k) {
    double sum = 0.0;
    for (int b = 0; b < 4; ++b) {
      const Eigen::Index j = iy_[k][b];
      double row = 0.0;
      for (int a = 0; a < 4; ++a) row += wx_[k][a] * field(ix_[k][a], j);
      sum += wy_[k][b] * row;
    }
    out(k) = sum;
  }
  return out;
}

NodeVectors CouplingOperator::interpolate_vectors(const Eigen::Ref<const Grid>& u, const Eigen::Ref<const Grid>& v) const {
  NodeVectors out(n_b_, 2);
  out.col(0) = interpolate(u);
  out.col(1) = interpolate(v);
  return out;
}

Grid spread(const CurveSamples& curve, const Eigen::Ref<const Vec>& g, const GridSpec& grid) {
  return CouplingOperator(curve, grid).spread(g);
}

std::pair<Grid, Grid> spread_vectors(const CurveSamples& curve, const NodeVectors& g, const GridSpec& grid) {
  return CouplingOperator(curve, grid).spread_vectors(g);
}

Vec interpolate(const CurveSamples& curve, const Eigen::Ref<const Grid>& field, const GridSpec& grid) {
  return CouplingOperator(curve, grid).interpolate(field);
}

NodeVectors interpolate_vectors(const CurveSamples& curve, const Eigen::Ref<const Grid>& u, const Eigen::Ref<const Grid>& v,
                        const GridSpec& grid) {
  return CouplingOperator(curve, grid).interpolate_vectors(u, v);
}

double inner_product_gamma(const Eigen::Ref<const Vec>& f, const Eigen::Ref<const Vec>& g, double dalpha) {
  if (f.size() != g.size()) throw Error(ErrorKind::shape_mismatch, "interface arrays differ in length");
  return f.dot(g) * dalpha;
}

double inner_product_gamma_vectors(const NodeVectors& f, const NodeVectors& g, double dalpha) {
  if (f.rows() != g.rows()) throw Error(ErrorKind::shape_mismatch, "interface arrays differ in length");
  return f.cwiseProduct(g).sum() * dalpha;
}

double inner_product_omega(const Eigen::Ref<const Grid>& u, const Eigen::Ref<const Grid>& v, double h) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw Error(ErrorKind::shape_mismatch, "grid fields differ in shape");
  return u.cwiseProduct(v).sum() * h * h;
}

}  // namespace ibssd
