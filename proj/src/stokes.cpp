#include "ibssd/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "ibssd/spectral.hpp"
#include "ibssd/work_counters.hpp"

namespace ibssd {

FluidState FluidState::zero(Eigen::Index n) {
  return FluidState{Grid::Zero(n, n), Grid::Zero(n, n), Grid::Zero(n, n)};
}

namespace {

struct Wavevectors {
  Vec kd;  // derivative wavenumber, Nyquist zeroed
  Vec k;   // full wavenumber for the Laplacian
};

Wavevectors wavevectors(Eigen::Index n, double L) {
  Wavevectors w;
  w.k = wavenumbers(n, L);
  w.kd = w.k;
  w.kd(n / 2) = 0.0;
  return w;
}

void require_field(const Grid& fx, const Grid& fy) {
  if (fx.rows() != fx.cols() || fy.rows() != fx.rows() || fy.cols() != fx.cols()) {
    throw Error(ErrorKind::invalid_grid, "force components must be matching square grids");
  }
  require_even_length(fx.rows());
}

void require_state(const FluidState& s, Eigen::Index n) {
  if (s.u.rows() != n || s.u.cols() != n || s.v.rows() != n || s.v.cols() != n) {
    throw Error(ErrorKind::shape_mismatch, "fluid state does not match the force grid");
  }
}

// p_hat = -i kd.f / |kd|^2, zero where kd = 0.
Grid pressure_from(const CGrid& fx, const CGrid& fy, const Wavevectors& w) {
  const Eigen::Index n = fx.rows();
  CGrid ph(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double kx = w.kd(i), ky = w.kd(j);
      const double k2 = kx * kx + ky * ky;
      ph(i, j) = k2 > 0.0 ? Complex(0.0, -1.0) * (kx * fx(i, j) + ky * fy(i, j)) / k2 : Complex(0.0);
    }
  }
  return inverse_2d(ph);
}

// û_new = (a(k) û_n + P f̂) / b(k) for k != 0; mean mode û_n + (dt/rho) f̂(0).
template <class Numerator, class Denominator>
FluidState implicit_step(const FluidState& un, const Grid& fx, const Grid& fy, double rho, double dt, double L,
                         Numerator a, Denominator b) {
  require_field(fx, fy);
  const Eigen::Index n = fx.rows();
  require_state(un, n);
  if (!(dt > 0.0)) throw Error(ErrorKind::parameter, "dt must be positive");
  if (!(rho > 0.0)) throw Error(ErrorKind::parameter, "rho must be positive");
  const Wavevectors w = wavevectors(n, L);
  auto [fhx, fhy] = forward_2d_pair(fx, fy);
  auto [uhx, uhy] = forward_2d_pair(un.u, un.v);
  CGrid rx(n, n), ry(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double k2 = w.k(i) * w.k(i) + w.k(j) * w.k(j);
      if (i == 0 && j == 0) {
        rx(i, j) = uhx(i, j) + (dt / rho) * fhx(i, j);
        ry(i, j) = uhy(i, j) + (dt / rho) * fhy(i, j);
        continue;
      }
      rx(i, j) = (a(k2) * uhx(i, j) + fhx(i, j)) / b(k2);
      ry(i, j) = (a(k2) * uhy(i, j) + fhy(i, j)) / b(k2);
    }
  }
  auto [px, py] = leray_project(rx, ry, L);
  FluidState out;
  std::tie(out.u, out.v) = inverse_2d_pair(px, py);
  out.p = pressure_from(fhx, fhy, w);
  ++work_counters().fluid_solves;
  return out;
}

}  // namespace

std::pair<CGrid, CGrid> leray_project(const CGrid& fx, const CGrid& fy, double domain_length) {
  const Eigen::Index n = fx.rows();
  const Wavevectors w = wavevectors(n, domain_length);
  CGrid px = fx, py = fy;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double kx = w.kd(i), ky = w.kd(j);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const Complex dot = (kx * fx(i, j) + ky * fy(i, j)) / k2;
      px(i, j) -= kx * dot;
      py(i, j) -= ky * dot;
    }
  }
  return {std::move(px), std::move(py)};
}

FluidState unsteady_stokes_step(const FluidState& un, const Grid& fx, const Grid& fy, double rho, double mu, double dt,
                                double domain_length) {
  const double c = rho / dt;
  return implicit_step(
      un, fx, fy, rho, dt, domain_length, [c](double) { return c; }, [c, mu](double k2) { return c + mu * k2; });
}

FluidState crank_nicolson_stokes_step(const FluidState& un, const Grid& fx, const Grid& fy, double rho, double mu,
                                      double dt, double domain_length) {
  const double c = rho / dt;
  return implicit_step(
      un, fx, fy, rho, dt, domain_length, [c, mu](double k2) { return c - 0.5 * mu * k2; },
      [c, mu](double k2) { return c + 0.5 * mu * k2; });
}

FluidState steady_stokes_grid_solve(const Grid& fx, const Grid& fy, double mu, double domain_length,
                                    MeanForcePolicy policy) {
  require_field(fx, fy);
  if (!(mu > 0.0)) throw Error(ErrorKind::parameter, "mu must be positive");
  const Eigen::Index n = fx.rows();
  const Wavevectors w = wavevectors(n, domain_length);
  auto [fhx, fhy] = forward_2d_pair(fx, fy);
  if (policy == MeanForcePolicy::reject) {
    const double scale = std::max({1.0, fx.cwiseAbs().maxCoeff(), fy.cwiseAbs().maxCoeff()});
    if (std::abs(fhx(0, 0)) > 1e-10 * scale || std::abs(fhy(0, 0)) > 1e-10 * scale) {
      throw Error(ErrorKind::no_steady_solution, "force has a nonzero mean on the periodic domain");
    }
  }
  auto [px, py] = leray_project(fhx, fhy, domain_length);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double k2 = w.k(i) * w.k(i) + w.k(j) * w.k(j);
      if (k2 == 0.0) {
        px(i, j) = py(i, j) = 0.0;
      } else {
        px(i, j) /= mu * k2;
        py(i, j) /= mu * k2;
      }
    }
  }
  FluidState out;
  std::tie(out.u, out.v) = inverse_2d_pair(px, py);
  out.p = pressure_from(fhx, fhy, w);
  ++work_counters().fluid_solves;
  return out;
}

Grid divergence(const Grid& u, const Grid& v, double domain_length) {
  return spectral_derivative_2d(u, Axis::x, domain_length) + spectral_derivative_2d(v, Axis::y, domain_length);
}

Vec periodic_log_convolution(const Eigen::Ref<const Vec>& g, double L_b) {
  const Eigen::Index n = g.size();
  CVec c = forward_1d(g);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = wavenumber(j, n);
    c(j) = k == 0 ? Complex(0.0) : c(j) * (L_b / (2.0 * std::abs(static_cast<double>(k))));
  }
  return inverse_1d(c);
}

NodeVectors steady_velocity_on_interface(const CurveSamples& curve, const NodeVectors& F, double mu, double L_b) {
  const Eigen::Index n = curve.size();
  if (F.rows() != n) throw Error(ErrorKind::shape_mismatch, "force must have one row per node");
  if (!(mu > 0.0)) throw Error(ErrorKind::parameter, "mu must be positive");
  const Vec xa = spectral_derivative_1d(curve.x, 1, L_b);
  const Vec ya = spectral_derivative_1d(curve.y, 1, L_b);
  const double da = L_b / static_cast<double>(n);

  NodeVectors u = NodeVectors::Zero(n, 2);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double sa = std::hypot(xa(j), ya(j));
    const double tx = xa(j) / sa, ty = ya(j) / sa;
    // Diagonal limits: smooth log part -> -ln(s_alpha L_b / 2 pi); r r^T / r^2 -> tau tau^T.
    const double diag_log = -std::log(sa * L_b / kTwoPi);
    double ux = diag_log * F(j, 0) + tx * (tx * F(j, 0) + ty * F(j, 1));
    double uy = diag_log * F(j, 1) + ty * (tx * F(j, 0) + ty * F(j, 1));
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == j) continue;
      const double rx = curve.x(j) - curve.x(m);
      const double ry = curve.y(j) - curve.y(m);
      const double r2 = rx * rx + ry * ry;
      if (r2 == 0.0) throw Error(ErrorKind::invalid_geometry, "distinct interface nodes coincide");
      const double sigma = kPi * static_cast<double>(j - m) / static_cast<double>(n);
      const double smooth = -0.5 * std::log(r2) + std::log(2.0 * std::abs(std::sin(sigma)));
      const double proj = (rx * F(m, 0) + ry * F(m, 1)) / r2;
      ux += smooth * F(m, 0) + rx * proj;
      uy += smooth * F(m, 1) + ry * proj;
    }
    u(j, 0) = ux * da;
    u(j, 1) = uy * da;
  }
  u.col(0) += periodic_log_convolution(Vec(F.col(0)), L_b);
  u.col(1) += periodic_log_convolution(Vec(F.col(1)), L_b);
  return u / (4.0 * kPi * mu);
}

}  // namespace ibssd
