#pragma once

// Peskin 4-point delta, spreading L_h and interpolation L_h* on the periodic grid.
// Spreading weights carry dalpha and interpolation weights carry h^2, which makes
// the pair exactly adjoint under the Omega_h and Gamma_h inner products.

#include <array>
#include <utility>
#include <vector>

#include "ibssd/geometry.hpp"
#include "ibssd/types.hpp"

namespace ibssd {

struct GridSpec {
  Eigen::Index N = 64;
  double L = 1.0;
  Eigen::Index N_b = 128;
  double L_b = kTwoPi;

  double h() const { return L / static_cast<double>(N); }
  double dalpha() const { return L_b / static_cast<double>(N_b); }

  /// N_b defaults to 2N (two boundary nodes per mesh width).
  static GridSpec make(Eigen::Index N, double L, double L_b, Eigen::Index N_b = 0);
  void validate() const;
};

/// 4-point kernel. Radicands are clamped at 0 near the branch points.
double peskin_phi(double r);

/// Tensor-product stencils of one curve configuration, reusable for every
/// spread and interpolate against that configuration.
class CouplingOperator {
 public:
  CouplingOperator(const CurveSamples& curve, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  Eigen::Index nodes() const { return n_b_; }

  Grid spread(const Eigen::Ref<const Vec>& g) const;
  std::pair<Grid, Grid> spread_vectors(const NodeVectors& g) const;

  Vec interpolate(const Eigen::Ref<const Grid>& field) const;
  NodeVectors interpolate_vectors(const Eigen::Ref<const Grid>& u, const Eigen::Ref<const Grid>& v) const;

 private:
  GridSpec grid_;
  Eigen::Index n_b_ = 0;
  std::vector<std::array<Eigen::Index, 4>> ix_, iy_;
  std::vector<std::array<double, 4>> wx_, wy_;
};

Grid spread(const CurveSamples& curve, const Eigen::Ref<const Vec>& g, const GridSpec& grid);
std::pair<Grid, Grid> spread_vectors(const CurveSamples& curve, const NodeVectors& g, const GridSpec& grid);
Vec interpolate(const CurveSamples& curve, const Eigen::Ref<const Grid>& field, const GridSpec& grid);
NodeVectors interpolate_vectors(const CurveSamples& curve, const Eigen::Ref<const Grid>& u, const Eigen::Ref<const Grid>& v,
                        const GridSpec& grid);

/// sum f g dalpha
double inner_product_gamma(const Eigen::Ref<const Vec>& f, const Eigen::Ref<const Vec>& g, double dalpha);
double inner_product_gamma_vectors(const NodeVectors& f, const NodeVectors& g, double dalpha);
/// sum u v h^2
double inner_product_omega(const Eigen::Ref<const Grid>& u, const Eigen::Ref<const Grid>& v, double h);

}  // namespace ibssd
