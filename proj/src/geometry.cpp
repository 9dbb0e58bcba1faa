#include "ibssd/geometry.hpp"

#include <sstream>

#include "ibssd/log.hpp"
#include "ibssd/spectral.hpp"

namespace ibssd {

Vec InterfaceState::alpha() const {
  const Eigen::Index n = size();
  return Vec::LinSpaced(n, 0.0, dalpha() * static_cast<double>(n - 1));
}

Vec InterfaceState::theta() const { return (kTwoPi / L_b) * alpha() + phi; }

Vec InterfaceState::theta_alpha() const {
  return (spectral_derivative_1d(phi, 1, L_b).array() + kTwoPi / L_b).matrix();
}

void validate_state(const InterfaceState& state) {
  const Eigen::Index n = state.size();
  require_even_length(n);
  if (state.phi.size() != n) throw Error(ErrorKind::shape_mismatch, "s_alpha and phi lengths differ");
  if (!(state.L_b > 0.0)) throw Error(ErrorKind::parameter, "L_b must be positive");
  if (!state.s_alpha.allFinite() || !state.phi.allFinite()) {
    throw Error(ErrorKind::degenerate_parameterization, "non-finite interface samples");
  }
  if (state.s_alpha.minCoeff() <= 0.0) {
    throw Error(ErrorKind::degenerate_parameterization, "s_alpha must be positive");
  }
}

InterfaceState state_from_curve(const CurveSamples& curve, double L_b) {
  const Eigen::Index n = curve.size();
  require_even_length(n);
  if (curve.y.size() != n) throw Error(ErrorKind::shape_mismatch, "x and y lengths differ");
  const Vec xa = spectral_derivative_1d(curve.x, 1, L_b);
  const Vec ya = spectral_derivative_1d(curve.y, 1, L_b);

  InterfaceState st;
  st.L_b = L_b;
  st.s_alpha = (xa.array().square() + ya.array().square()).sqrt();
  if (st.s_alpha.minCoeff() <= 1e-12 * st.s_alpha.maxCoeff()) {
    throw Error(ErrorKind::invalid_geometry, "curve has a stationary point");
  }

  Vec theta(n);
  theta(0) = std::atan2(ya(0), xa(0));
  for (Eigen::Index j = 1; j < n; ++j) {
    const double raw = std::atan2(ya(j), xa(j));
    theta(j) = theta(j - 1) + std::remainder(raw - theta(j - 1), kTwoPi);
  }
  const double closing = theta(n - 1) + std::remainder(theta(0) - theta(n - 1), kTwoPi) - theta(0);
  if (std::abs(closing - kTwoPi) > 1e-6) {
    throw Error(ErrorKind::invalid_geometry, "tangent angle must turn by +2 pi (simple counterclockwise curve)");
  }
  st.phi = theta - (kTwoPi / L_b) * st.alpha();
  st.ref.start = Vec2(curve.x(0), curve.y(0));
  st.ref.half = Vec2(curve.x(n / 2), curve.y(n / 2));
  return st;
}

InitializedInterface init_ellipse(double a, double b, const Vec2& center, Eigen::Index n_b, double L_b) {
  if (!(a > 1e-12) || !(b > 1e-12)) throw Error(ErrorKind::invalid_geometry, "ellipse axes must be positive");
  require_even_length(n_b);
  InitializedInterface out;
  const Vec t = Vec::LinSpaced(n_b, 0.0, kTwoPi * static_cast<double>(n_b - 1) / static_cast<double>(n_b));
  out.curve.x = (center.x() + a * t.array().cos()).matrix();
  out.curve.y = (center.y() + b * t.array().sin()).matrix();
  out.state = state_from_curve(out.curve, L_b);
  return out;
}

Frame tangent_normal(const InterfaceState& state) {
  const Vec th = state.theta();
  Frame f;
  f.tangent.resize(th.size(), 2);
  f.normal.resize(th.size(), 2);
  f.tangent.col(0) = th.array().cos();
  f.tangent.col(1) = th.array().sin();
  f.normal.col(0) = -f.tangent.col(1);
  f.normal.col(1) = f.tangent.col(0);
  return f;
}

NodeVectors elastic_force(const Eigen::Ref<const Vec>& s_alpha, const Eigen::Ref<const Vec>& theta_alpha,
                          const Frame& frame, double S_b, double L_b) {
  const Vec s_aa = spectral_derivative_1d(s_alpha, 1, L_b);
  const Vec stretch = (s_alpha.array() - 1.0) * theta_alpha.array();
  NodeVectors f(s_alpha.size(), 2);
  for (int c = 0; c < 2; ++c) {
    f.col(c) = S_b * (s_aa.cwiseProduct(frame.tangent.col(c)) + stretch.cwiseProduct(frame.normal.col(c)));
  }
  return f;
}

NodeVectors elastic_force(const InterfaceState& state, double S_b) {
  return elastic_force(state.s_alpha, state.theta_alpha(), tangent_normal(state), S_b, state.L_b);
}

ShapeRates evolve_salpha_theta_rhs(const InterfaceState& state, const Eigen::Ref<const Vec>& U,
                                   const Eigen::Ref<const Vec>& V) {
  if (U.size() != state.size() || V.size() != state.size()) {
    throw Error(ErrorKind::shape_mismatch, "velocity arrays must have N_b entries");
  }
  if (state.s_alpha.minCoeff() <= 0.0) {
    throw Error(ErrorKind::degenerate_parameterization, "s_alpha must be positive");
  }
  const Vec ta = state.theta_alpha();
  ShapeRates r;
  r.ds_alpha = spectral_derivative_1d(V, 1, state.L_b) - ta.cwiseProduct(U);
  r.dtheta = ((spectral_derivative_1d(U, 1, state.L_b) + V.cwiseProduct(ta)).array() / state.s_alpha.array()).matrix();
  return r;
}

RefPoints update_reference_points(const InterfaceState& state, const Eigen::Ref<const Vec>& U,
                                  const Eigen::Ref<const Vec>& V, double dt) {
  const Eigen::Index h = state.size() / 2;
  const Vec th = state.theta();
  RefPoints r = state.ref;
  r.start += dt * node_velocity(th(0), U(0), V(0));
  r.half += dt * node_velocity(th(h), U(h), V(h));
  return r;
}

CurveSamples reconstruct_curve(const InterfaceState& state, double drift_tolerance, double* mismatch) {
  const Eigen::Index n = state.size();
  const Eigen::Index h = n / 2;
  const Vec th = state.theta();
  const Vec gx = spectral_antiderivative(state.s_alpha.cwiseProduct(Vec(th.array().cos())), 0.0, state.L_b);
  const Vec gy = spectral_antiderivative(state.s_alpha.cwiseProduct(Vec(th.array().sin())), 0.0, state.L_b);

  CurveSamples c;
  c.x = ((gx.array() + state.ref.start.x()) + (gx.array() - gx(h) + state.ref.half.x())) * 0.5;
  c.y = ((gy.array() + state.ref.start.y()) + (gy.array() - gy(h) + state.ref.half.y())) * 0.5;

  // The two reconstructions differ by a constant vector.
  const Vec2 gap = state.ref.half - state.ref.start - Vec2(gx(h), gy(h));
  const double drift = gap.cwiseAbs().maxCoeff();
  if (mismatch) *mismatch = drift;
  if (drift > drift_tolerance) {
    std::ostringstream os;
    os << "reference-point reconstructions disagree by " << drift;
    warn(os.str());
  }
  return c;
}

double polygon_area(const CurveSamples& curve) {
  const Eigen::Index n = curve.size();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index k = (j + 1) % n;
    sum += curve.x(j) * curve.y(k) - curve.x(k) * curve.y(j);
  }
  return 0.5 * sum;
}

double enclosed_area(const CurveSamples& curve) {
  const Eigen::Index n = curve.size();
  const Vec xa = spectral_derivative_1d(curve.x);
  const Vec ya = spectral_derivative_1d(curve.y);
  return 0.5 * (curve.x.dot(ya) - curve.y.dot(xa)) * kTwoPi / static_cast<double>(n);
}

double perimeter(const CurveSamples& curve) {
  const Eigen::Index n = curve.size();
  const Vec xa = spectral_derivative_1d(curve.x);
  const Vec ya = spectral_derivative_1d(curve.y);
  return (xa.array().square() + ya.array().square()).sqrt().sum() * kTwoPi / static_cast<double>(n);
}

std::pair<Vec, Vec> normal_tangential(const NodeVectors& velocity, const Frame& frame) {
  Vec U = velocity.cwiseProduct(frame.normal).rowwise().sum();
  Vec V = velocity.cwiseProduct(frame.tangent).rowwise().sum();
  return {std::move(U), std::move(V)};
}

}  // namespace ibssd
