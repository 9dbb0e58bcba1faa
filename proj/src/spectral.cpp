#include "ibssd/spectral.hpp"

#include <vector>

#include <unsupported/Eigen/FFT>

namespace ibssd {

namespace {

// Plans are cached inside the engine; one engine per thread keeps the
// transforms themselves free of shared state.
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

void transform_inplace(Complex* data, Eigen::Index n, bool forward, std::vector<Complex>& scratch) {
  scratch.assign(data, data + n);
  if (forward) {
    engine().fwd(data, scratch.data(), static_cast<int>(n));
  } else {
    engine().inv(data, scratch.data(), static_cast<int>(n));
  }
}

// Column-major N x N: columns are contiguous (transform along x), rows are strided.
void transform_2d(CGrid& g, bool forward) {
  const Eigen::Index n = g.rows();
  std::vector<Complex> scratch(static_cast<std::size_t>(n));
  std::vector<Complex> line(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    transform_inplace(g.col(j).data(), n, forward, scratch);
  }
  const Eigen::Index m = g.cols();
  line.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) line[static_cast<std::size_t>(j)] = g(i, j);
    transform_inplace(line.data(), m, forward, scratch);
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = line[static_cast<std::size_t>(j)];
  }
  ++work_counters().fft_2d;
}

void require_square_even(Eigen::Index rows, Eigen::Index cols) {
  if (rows != cols) {
    throw Error(ErrorKind::invalid_grid,
                "grid must be square, got " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  require_even_length(rows);
}

}  // namespace

void require_even_length(Eigen::Index n) {
  if (n <= 0 || n % 2 != 0) {
    throw Error(ErrorKind::invalid_grid, "length must be positive and even, got " + std::to_string(n));
  }
}

Vec wavenumbers(Eigen::Index n, double period) {
  Vec k(n);
  const double scale = kTwoPi / period;
  for (Eigen::Index j = 0; j < n; ++j) k(j) = scale * static_cast<double>(wavenumber(j, n));
  return k;
}

CVec forward_1d(const Eigen::Ref<const Vec>& f) { return forward_1d(CVec(f.cast<Complex>())); }

CVec forward_1d(const Eigen::Ref<const CVec>& f) {
  const Eigen::Index n = f.size();
  require_even_length(n);
  CVec out(n);
  CVec in = f;
  engine().fwd(out.data(), in.data(), static_cast<int>(n));
  ++work_counters().fft_1d;
  return out / static_cast<double>(n);
}

CVec inverse_1d_complex(const Eigen::Ref<const CVec>& coeffs) {
  const Eigen::Index n = coeffs.size();
  require_even_length(n);
  CVec out(n);
  CVec in = coeffs;
  engine().inv(out.data(), in.data(), static_cast<int>(n));
  ++work_counters().fft_1d;
  return out;
}

Vec inverse_1d(const Eigen::Ref<const CVec>& coeffs) { return inverse_1d_complex(coeffs).real(); }

Vec spectral_derivative_1d(const Eigen::Ref<const Vec>& f, int order, double period) {
  if (order < 1) throw Error(ErrorKind::parameter, "derivative order must be positive");
  const Eigen::Index n = f.size();
  require_even_length(n);
  CVec c = forward_1d(f);
  const Vec k = wavenumbers(n, period);
  const Complex i(0.0, 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (wavenumber(j, n) == n / 2 && order % 2 == 1) {
      c(j) = 0.0;
    } else {
      c(j) *= std::pow(i * k(j), order);
    }
  }
  return inverse_1d(c);
}

Vec hilbert_transform(const Eigen::Ref<const Vec>& f) {
  const Eigen::Index n = f.size();
  require_even_length(n);
  CVec c = forward_1d(f);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = wavenumber(j, n);
    if (k == 0 || k == n / 2) {
      c(j) = 0.0;
    } else {
      c(j) *= Complex(0.0, k > 0 ? -1.0 : 1.0);
    }
  }
  return inverse_1d(c);
}

Vec spectral_antiderivative(const Eigen::Ref<const Vec>& f, double value_at_zero, double period) {
  const Eigen::Index n = f.size();
  require_even_length(n);
  CVec c = forward_1d(f);
  const Complex mean = c(0);
  const Vec k = wavenumbers(n, period);
  c(0) = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    c(j) = (wavenumber(j, n) == n / 2) ? Complex(0.0) : c(j) / Complex(0.0, k(j));
  }
  Vec g = inverse_1d(c);
  const double offset = value_at_zero - g(0);
  const double dalpha = period / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j) g(j) += offset + mean.real() * dalpha * static_cast<double>(j);
  return g;
}

void apply_two_thirds_filter(CVec& coeffs) {
  const Eigen::Index n = coeffs.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (3 * std::abs(wavenumber(j, n)) > n) coeffs(j) = 0.0;
  }
}

CGrid forward_2d(const Eigen::Ref<const Grid>& field) { return forward_2d(CGrid(field.cast<Complex>())); }

CGrid forward_2d(const Eigen::Ref<const CGrid>& field) {
  require_square_even(field.rows(), field.cols());
  CGrid g = field;
  transform_2d(g, true);
  g /= static_cast<double>(g.rows() * g.cols());
  return g;
}

CGrid inverse_2d_complex(const Eigen::Ref<const CGrid>& coeffs) {
  require_square_even(coeffs.rows(), coeffs.cols());
  CGrid g = coeffs;
  transform_2d(g, false);
  return g;
}

Grid inverse_2d(const Eigen::Ref<const CGrid>& coeffs) { return inverse_2d_complex(coeffs).real(); }

std::pair<CGrid, CGrid> forward_2d_pair(const Eigen::Ref<const Grid>& a, const Eigen::Ref<const Grid>& b) {
  require_square_even(a.rows(), a.cols());
  if (b.rows() != a.rows() || b.cols() != a.cols()) {
    throw Error(ErrorKind::shape_mismatch, "paired fields differ in shape");
  }
  CGrid packed(a.rows(), a.cols());
  packed.real() = a;
  packed.imag() = b;
  transform_2d(packed, true);
  packed /= static_cast<double>(a.rows() * a.cols());
  const Eigen::Index n = a.rows();
  CGrid fa(n, n), fb(n, n);
  // Z = A + iB with A, B Hermitian: A(k) = (Z(k) + conj Z(-k))/2, B(k) = (Z(k) - conj Z(-k))/(2i).
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jm = (n - j) % n;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index im = (n - i) % n;
      const Complex z = packed(i, j);
      const Complex zm = std::conj(packed(im, jm));
      fa(i, j) = 0.5 * (z + zm);
      fb(i, j) = Complex(0.0, -0.5) * (z - zm);
    }
  }
  return {std::move(fa), std::move(fb)};
}

std::pair<Grid, Grid> inverse_2d_pair(const Eigen::Ref<const CGrid>& a, const Eigen::Ref<const CGrid>& b) {
  require_square_even(a.rows(), a.cols());
  CGrid packed = a + Complex(0.0, 1.0) * b;
  transform_2d(packed, false);
  return {packed.real(), packed.imag()};
}

Grid spectral_derivative_2d(const Eigen::Ref<const Grid>& field, Axis axis, double domain_length) {
  require_square_even(field.rows(), field.cols());
  const Eigen::Index n = field.rows();
  CGrid c = forward_2d(field);
  const Vec k = wavenumbers(n, domain_length);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index slot = axis == Axis::x ? i : j;
      c(i, j) *= (wavenumber(slot, n) == n / 2) ? Complex(0.0) : Complex(0.0, k(slot));
    }
  }
  return inverse_2d(c);
}

}  // namespace ibssd
