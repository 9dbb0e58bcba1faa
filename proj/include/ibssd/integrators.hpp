#pragma once

// Time integrators for the coupled interface / fluid system. Every scheme
// advances a StepState by one step of size SchemeConfig::dt.

#include <optional>
#include <string>
#include <vector>

#include "ibssd/coupling.hpp"
#include "ibssd/geometry.hpp"
#include "ibssd/nondimensional.hpp"
#include "ibssd/stokes.hpp"
#include "ibssd/types.hpp"

namespace ibssd {

enum class Scheme {
  explicit_steady,
  ssd1_steady,
  ssd2_steady,
  ifrk4_steady,
  stable_steady,
  explicit_unsteady,
  ssd1_unsteady,
  ssd2_unsteady,
  stable_unsteady,
  second_order_unsteady,
  explicit2_unsteady,  // explicit midpoint with a Crank-Nicolson fluid step
};

const char* to_string(Scheme s);
/// Throws ErrorKind::usage for unknown names.
Scheme scheme_from_string(const std::string& name);
const std::vector<Scheme>& all_schemes();
bool is_steady(Scheme s);

/// How steady schemes obtain the interface velocity.
enum class SteadyVelocity {
  grid,               // spread, periodic steady Stokes solve, interpolate
  boundary_integral,  // free-space Stokeslet integral on the curve
};

const char* to_string(SteadyVelocity v);
SteadyVelocity steady_velocity_from_string(const std::string& name);

struct SchemeConfig {
  Scheme scheme = Scheme::ssd1_unsteady;
  double dt = 0.01;
  double tolerance = 1e-10;
  bool rescale = false;
  double C_V = 1.0;
  double C_U = 1.0;
  bool rescale_ready = false;  // C_V, C_U are fixed after the first rescaled step
  SteadyVelocity steady_velocity = SteadyVelocity::grid;
  Eigen::Index dense_limit = 256;  // stable schemes assemble the matrix up to this N_b
  bool two_thirds_filter = false;  // filter s_alpha and phi after each step
  double drift_tolerance = 1e-3;

  void validate() const;
};

/// Defaults per scheme: rescaling on for the first-order unsteady SSD schemes.
SchemeConfig default_scheme_config(Scheme scheme, double dt);

struct StepState {
  InterfaceState iface;
  CurveSamples curve;
  FluidState fluid;
  double t = 0.0;
  long step = 0;
  double max_u = 0.0;  // largest fluid speed seen in the last step
};

/// Fluid at rest, curve rebuilt from the interface state.
StepState make_step_state(const InterfaceState& iface, const GridSpec& grid);

StepState step_explicit_steady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_ssd1_steady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_ssd2_steady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_ifrk4_steady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_stable_steady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_explicit_unsteady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_ssd1_unsteady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_ssd2_unsteady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_stable_unsteady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_second_order_unsteady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);
StepState step_explicit2_unsteady(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);

/// Dispatches on c.scheme. Throws BlowupError on non-finite results.
StepState advance(const StepState& s, const GridSpec& g, const PhysParams& p, SchemeConfig& c);

struct RescalingCoefficients {
  double C_V = 1.0;
  double C_U = 1.0;
  bool V_disabled = false;
  bool U_disabled = false;
};

/// C_V = max|V*_alpha| / max|T(s0)|, C_U = max|U^1| / max|S_U(theta0)|. A zero or
/// non-finite ratio falls back to 1 with a warning.
RescalingCoefficients compute_rescaling_coefficients(const Eigen::Ref<const Vec>& V_star_alpha,
                                                     const Eigen::Ref<const Vec>& T_s0,
                                                     const Eigen::Ref<const Vec>& U1,
                                                     const Eigen::Ref<const Vec>& S_U_theta0);

/// One Lawson (integrating factor) RK4 step of y' = -lambda y + N(y) for
/// spectral unknowns with per-mode decay rates lambda >= 0.
template <class Nonlinear>
CVec lawson_rk4_step(const CVec& y, const Vec& lambda, double h, Nonlinear&& N) {
  const CVec e_half = (-0.5 * h * lambda.array()).exp().cast<Complex>().matrix();
  const CVec e_full = (-h * lambda.array()).exp().cast<Complex>().matrix();
  const CVec k1 = N(y);
  const CVec k2 = N(CVec(e_half.cwiseProduct(y + 0.5 * h * k1)));
  const CVec k3 = N(CVec(e_half.cwiseProduct(y) + 0.5 * h * k2));
  const CVec k4 = N(CVec(e_full.cwiseProduct(y) + h * e_half.cwiseProduct(k3)));
  return e_full.cwiseProduct(y) +
         (h / 6.0) * (e_full.cwiseProduct(k1) + 2.0 * e_half.cwiseProduct(k2 + k3) + k4);
}

}  // namespace ibssd
