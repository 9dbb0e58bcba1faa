#pragma once

// Closed elastic interface in arclength-derivative / tangent-angle form.
// theta(alpha) = 2 pi alpha / L_b + phi(alpha) with phi periodic; the curve
// itself is rebuilt from (s_alpha, theta) and two tracked reference points.

#include <cmath>
#include <utility>

#include "ibssd/types.hpp"

namespace ibssd {

struct CurveSamples {
  Vec x;
  Vec y;

  Eigen::Index size() const { return x.size(); }
};

/// Points tracked at alpha = 0 (node 0) and alpha = L_b/2 (node N_b/2).
struct RefPoints {
  Vec2 start = Vec2::Zero();
  Vec2 half = Vec2::Zero();
};

struct InterfaceState {
  Vec s_alpha;
  Vec phi;
  RefPoints ref;
  double L_b = kTwoPi;

  Eigen::Index size() const { return s_alpha.size(); }
  double dalpha() const { return L_b / static_cast<double>(s_alpha.size()); }
  Vec alpha() const;
  Vec theta() const;
  /// 2 pi / L_b + D phi.
  Vec theta_alpha() const;
};

struct InitializedInterface {
  InterfaceState state;
  CurveSamples curve;
};

/// Samples x = cx + a cos(2 pi alpha / L_b), y = cy + b sin(2 pi alpha / L_b).
InitializedInterface init_ellipse(double a, double b, const Vec2& center, Eigen::Index n_b, double L_b = kTwoPi);

/// (s_alpha, phi, reference points) of a counterclockwise closed curve.
InterfaceState state_from_curve(const CurveSamples& curve, double L_b);

/// Throws if lengths disagree, N_b is odd, or s_alpha is not positive.
void validate_state(const InterfaceState& state);

struct Frame {
  NodeVectors tangent;
  NodeVectors normal;
};

/// tau = (cos theta, sin theta), n = (-sin theta, cos theta).
Frame tangent_normal(const InterfaceState& state);

/// F = S_b (s_aa tau + (s_alpha - 1) theta_alpha n).
NodeVectors elastic_force(const InterfaceState& state, double S_b);

/// Same force with s_alpha and theta supplied separately from the frame.
NodeVectors elastic_force(const Eigen::Ref<const Vec>& s_alpha, const Eigen::Ref<const Vec>& theta_alpha,
                          const Frame& frame, double S_b, double L_b);

struct ShapeRates {
  Vec ds_alpha;
  Vec dtheta;
};

/// (V_a - theta_a U, (U_a + V theta_a) / s_alpha).
ShapeRates evolve_salpha_theta_rhs(const InterfaceState& state, const Eigen::Ref<const Vec>& U,
                                   const Eigen::Ref<const Vec>& V);

/// Node velocity V tau + U n for tangent angle theta.
inline Vec2 node_velocity(double theta, double U, double V) {
  return Vec2(V * std::cos(theta) - U * std::sin(theta), V * std::sin(theta) + U * std::cos(theta));
}

/// Forward Euler step of both reference points with the node velocities at 0 and N_b/2.
RefPoints update_reference_points(const InterfaceState& state, const Eigen::Ref<const Vec>& U,
                                  const Eigen::Ref<const Vec>& V, double dt);

/// Average of the reconstructions anchored at each reference point. Emits a
/// warning when the two disagree by more than drift_tolerance (max norm).
CurveSamples reconstruct_curve(const InterfaceState& state, double drift_tolerance = 1e-6,
                               double* mismatch = nullptr);

/// (1/2) int (x y_a - y x_a) da by the trapezoid rule with spectral derivatives;
/// positive for counterclockwise orientation.
double enclosed_area(const CurveSamples& curve);

/// Shoelace area of the polygon through the nodes (second-order accurate).
double polygon_area(const CurveSamples& curve);

/// Arclength by the trapezoid rule on |X_a| with spectral derivatives.
double perimeter(const CurveSamples& curve);

/// Normal and tangential components u.n, u.tau of node velocities.
std::pair<Vec, Vec> normal_tangential(const NodeVectors& velocity, const Frame& frame);

}  // namespace ibssd
