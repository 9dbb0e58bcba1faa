#pragma once

// Periodic spectral Stokes solves on the N x N grid, and the free-space
// boundary-integral velocity of steady Stokes flow evaluated on the interface.

#include <utility>

#include "ibssd/geometry.hpp"
#include "ibssd/types.hpp"

namespace ibssd {

struct FluidState {
  Grid u;
  Grid v;
  Grid p;

  static FluidState zero(Eigen::Index n);
  Eigen::Index size() const { return u.rows(); }
};

/// Removes gradient components: f - k (k.f)/|k|^2 for k != 0, zero mode unchanged.
/// Wavenumbers use the derivative convention (Nyquist component 0).
std::pair<CGrid, CGrid> leray_project(const CGrid& fx, const CGrid& fy, double domain_length = 1.0);

/// Backward Euler step of rho u_t = -grad p + mu lap u + f.
FluidState unsteady_stokes_step(const FluidState& un, const Grid& fx, const Grid& fy, double rho, double mu, double dt,
                                double domain_length = 1.0);

/// Crank-Nicolson step of the same equations (viscous term averaged, force taken as given).
FluidState crank_nicolson_stokes_step(const FluidState& un, const Grid& fx, const Grid& fy, double rho, double mu,
                                      double dt, double domain_length = 1.0);

enum class MeanForcePolicy {
  reject,   // throw when the mean force exceeds 1e-10 (relative to max |f|, floor 1)
  discard,  // drop the mean mode silently
};

/// 0 = -grad p + mu lap u + f on the torus; u has zero mean.
FluidState steady_stokes_grid_solve(const Grid& fx, const Grid& fy, double mu, double domain_length = 1.0,
                                    MeanForcePolicy policy = MeanForcePolicy::reject);

/// Spectral divergence with the derivative convention used by the projector.
Grid divergence(const Grid& u, const Grid& v, double domain_length = 1.0);

/// u(X(a)) = (1/4 pi mu) int [-ln r I + r r^T / r^2] F da' for the free-space
/// Stokeslet. The log singularity is split off and integrated spectrally.
NodeVectors steady_velocity_on_interface(const CurveSamples& curve, const NodeVectors& F, double mu, double L_b);

/// int_0^{L_b} -ln(2|sin(pi(a - a')/L_b)|) g(a') da', applied spectrally.
Vec periodic_log_convolution(const Eigen::Ref<const Vec>& g, double L_b);

}  // namespace ibssd
