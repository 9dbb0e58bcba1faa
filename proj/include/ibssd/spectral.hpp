#pragma once

// Periodic discrete Fourier transforms and operators that are diagonal in
// Fourier space, for interface samples (1D) and grid fields (2D).
//
// Normalization: the forward transform carries 1/N, the inverse carries no
// factor. Spectra are stored in FFT order: slot j holds wavenumber j for
// j <= N/2 and j - N above, so the represented set is {-N/2+1, ..., N/2}.
// The unmatched Nyquist mode k = N/2 only keeps the real part of a symbol,
// which zeroes it under odd symbols (ik, -i sgn k) and keeps it under even ones.

#include <cmath>
#include <utility>

#include "ibssd/types.hpp"
#include "ibssd/work_counters.hpp"

namespace ibssd {

enum class Axis { x, y };

/// Signed integer wavenumber stored in FFT slot j of a length-n transform.
inline Eigen::Index wavenumber(Eigen::Index j, Eigen::Index n) { return j <= n / 2 ? j : j - n; }

/// Physical wavenumbers 2*pi*k/period for every FFT slot.
Vec wavenumbers(Eigen::Index n, double period = kTwoPi);

void require_even_length(Eigen::Index n);

CVec forward_1d(const Eigen::Ref<const Vec>& f);
CVec forward_1d(const Eigen::Ref<const CVec>& f);
/// Real part of the inverse transform.
Vec inverse_1d(const Eigen::Ref<const CVec>& coeffs);
CVec inverse_1d_complex(const Eigen::Ref<const CVec>& coeffs);

/// Drops the imaginary part of the Nyquist product and checks that
/// symbol(-k) = conj(symbol(k)) for the matched modes.
template <class Symbol>
Vec apply_symbol_1d(const Eigen::Ref<const Vec>& f, Symbol&& symbol, double period = kTwoPi) {
  const Eigen::Index n = f.size();
  require_even_length(n);
  CVec c = forward_1d(f);
  const double scale = kTwoPi / period;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = wavenumber(j, n);
    const Complex s = symbol(scale * static_cast<double>(k));
    if (k == 0 && s.imag() != 0.0) {
      throw Error(ErrorKind::symmetry, "symbol must be real at k=0 for real output");
    }
    if (k > 0 && k < n / 2) {
      const Complex mirror = symbol(-scale * static_cast<double>(k));
      if (std::abs(mirror - std::conj(s)) > 1e-12 * (1.0 + std::abs(s))) {
        throw Error(ErrorKind::symmetry, "symbol is not conjugate-symmetric at k=" + std::to_string(k));
      }
    }
    c(j) *= (k == n / 2) ? Complex(s.real(), 0.0) : s;
  }
  return inverse_1d(c);
}

/// Multiplies a 1D spectrum (FFT order) by real per-slot multipliers.
inline CVec scale_spectrum(const Eigen::Ref<const CVec>& c, const Eigen::Ref<const Vec>& multiplier) {
  return c.cwiseProduct(multiplier.cast<Complex>());
}

Vec spectral_derivative_1d(const Eigen::Ref<const Vec>& f, int order = 1, double period = kTwoPi);
Vec hilbert_transform(const Eigen::Ref<const Vec>& f);

/// g with g' = f spectrally and g(0) = value_at_zero. The mean of f
/// contributes mean(f) * alpha, so g is periodic only for mean-free f.
Vec spectral_antiderivative(const Eigen::Ref<const Vec>& f, double value_at_zero, double period = kTwoPi);

/// 2/3-rule truncation of a 1D spectrum: zeroes |k| > n/3.
void apply_two_thirds_filter(CVec& coeffs);

// -- 2D --------------------------------------------------------------------

CGrid forward_2d(const Eigen::Ref<const Grid>& field);
CGrid forward_2d(const Eigen::Ref<const CGrid>& field);
Grid inverse_2d(const Eigen::Ref<const CGrid>& coeffs);
CGrid inverse_2d_complex(const Eigen::Ref<const CGrid>& coeffs);

/// Spectra of two real fields computed with a single complex transform.
std::pair<CGrid, CGrid> forward_2d_pair(const Eigen::Ref<const Grid>& a, const Eigen::Ref<const Grid>& b);
/// Inverse of two Hermitian spectra with a single complex transform.
std::pair<Grid, Grid> inverse_2d_pair(const Eigen::Ref<const CGrid>& a, const Eigen::Ref<const CGrid>& b);

Grid spectral_derivative_2d(const Eigen::Ref<const Grid>& field, Axis axis, double domain_length = 1.0);

}  // namespace ibssd
