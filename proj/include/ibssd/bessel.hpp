#pragma once

// Modified Bessel functions of the second kind, the unsteady Stokes kernel G,
// and the leading-order Fourier symbols used by the small-scale decomposition.

#include <utility>

#include "ibssd/types.hpp"

namespace ibssd {

/// K_order(x) for order 0, 1, 2 and x > 0. Returns 0 once the value underflows (x > 700).
double bessel_k(int order, double x);
double bessel_k0(double x);
double bessel_k1(double x);

/// Fourier multiplier 1/sqrt(beta^2 + k^2) of f -> (1/pi) int K0(beta|a - a'|) f(a') da'.
double k0_convolution_symbol(double beta, double k);

/// Fundamental tensor of the unsteady (Brinkman) Stokes operator with parameter lambda.
Mat2 unsteady_kernel_G(const Vec2& r, double lambda);

/// Frozen coefficients of the SSD symbols. lambda^2 = rho / (mu dt).
struct SsdSymbolParams {
  double S_b = 1.0;
  double mu = 1.0;
  double rho = 1.0;
  double dt = 1.0;
  double lambda = 1.0;
  double s_min = 1.0;
  double s_max_excess = 0.0;  // max(s_alpha - 1)
  double gamma = 0.0;         // max(1 - 1/s_alpha)

  void validate() const;
};

/// Builds the parameter set from the current s_alpha samples.
SsdSymbolParams make_ssd_params(double S_b, double mu, double rho, double dt, const Eigen::Ref<const Vec>& s_alpha);

/// Leading-order symbol for the s_alpha equation (first order, lambda).
double ssd_symbol_T(double k, const SsdSymbolParams& p);
/// Leading-order symbol for the theta equation (first order, lambda).
double ssd_symbol_S(double k, const SsdSymbolParams& p);

struct SsdSymbolPair {
  double T = 0.0;
  double S = 0.0;
};

/// Second-order scheme symbols: lambda_bar^2 = 2 rho / (mu dt), prefactors with 4 rho.
SsdSymbolPair ssd_symbol_second_order(double k, const SsdSymbolParams& p);

}  // namespace ibssd
