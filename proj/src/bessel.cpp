#include "ibssd/bessel.hpp"

#include <cmath>
#include <limits>

namespace ibssd {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kUnderflow = 700.0;

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw Error(ErrorKind::domain, std::string(what) + " must be positive");
}

// Ascending series, x <= 2.
//   K0 = -(ln(x/2) + gamma) I0 + sum_k H_k q^k / (k!)^2,             q = x^2/4
//   K1 = 1/x + ln(x/2) I1 - (x/4) sum_k (psi(k+1) + psi(k+2)) q^k / (k!(k+1)!)
std::pair<double, double> k01_series(double x) {
  const double q = 0.25 * x * x;
  const double lg = std::log(0.5 * x);
  double t0 = 1.0;  // q^k / (k!)^2
  double t1 = 1.0;  // q^k / (k!(k+1)!)
  double i0 = 1.0, i1 = 1.0;
  double h = 0.0;  // harmonic number H_k
  double s0 = 0.0;
  double s1 = -2.0 * kEulerGamma + 1.0;  // psi(1) + psi(2)
  for (int k = 1; k < 60; ++k) {
    t0 *= q / (double(k) * k);
    t1 *= q / (double(k) * (k + 1));
    h += 1.0 / k;
    i0 += t0;
    i1 += t1;
    s0 += h * t0;
    s1 += (2.0 * h - 2.0 * kEulerGamma + 1.0 / (k + 1)) * t1;
    if (t0 < 1e-17 * i0) break;
  }
  i1 *= 0.5 * x;
  const double k0 = -(lg + kEulerGamma) * i0 + s0;
  const double k1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
  return {k0, k1};
}

// Steed's continued fraction (CF2) with Temme's normalization sum, order 0, x > 2.
std::pair<double, double> k01_continued_fraction(double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-16) break;
  }
  h *= a1;
  const double k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

std::pair<double, double> k01(double x) {
  require_positive(x, "Bessel K argument");
  if (x > kUnderflow) return {0.0, 0.0};
  return x <= 2.0 ? k01_series(x) : k01_continued_fraction(x);
}

}  // namespace

double bessel_k0(double x) { return k01(x).first; }
double bessel_k1(double x) { return k01(x).second; }

double bessel_k(int order, double x) {
  const auto [k0, k1] = k01(x);
  switch (order) {
    case 0: return k0;
    case 1: return k1;
    case 2: return k0 + 2.0 * k1 / x;
    default: throw Error(ErrorKind::domain, "Bessel K order must be 0, 1 or 2");
  }
}

double k0_convolution_symbol(double beta, double k) {
  require_positive(beta, "beta");
  return 1.0 / std::sqrt(beta * beta + k * k);
}

Mat2 unsteady_kernel_G(const Vec2& r, double lambda) {
  require_positive(lambda, "lambda");
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) throw Error(ErrorKind::singular_point, "unsteady kernel evaluated at r = 0");
  const double rn = std::sqrt(r2);
  const Mat2 rr = r * r.transpose();
  Mat2 g = Mat2::Identity() / r2 - 2.0 * rr / (r2 * r2);
  const double z = lambda * rn;
  if (z <= kUnderflow) {
    const auto [k0, k1] = k01(z);
    const double k2 = k0 + 2.0 * k1 / z;
    g += 0.5 * lambda * lambda * (k0 + k2) * rr / r2;
    g -= lambda * k1 * (Mat2::Identity() / rn - rr / (r2 * rn));
  }
  return g;
}

void SsdSymbolParams::validate() const {
  const bool finite = std::isfinite(S_b) && std::isfinite(mu) && std::isfinite(rho) && std::isfinite(dt) &&
                      std::isfinite(lambda) && std::isfinite(s_min) && std::isfinite(s_max_excess) &&
                      std::isfinite(gamma);
  if (!finite || !(lambda > 0.0) || !(s_min > 0.0) || !(gamma < 1.0)) {
    throw Error(ErrorKind::parameter, "invalid SSD symbol parameters");
  }
}

SsdSymbolParams make_ssd_params(double S_b, double mu, double rho, double dt, const Eigen::Ref<const Vec>& s_alpha) {
  if (!(mu > 0.0) || !(rho > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorKind::parameter, "mu, rho and dt must be positive");
  }
  SsdSymbolParams p;
  p.S_b = S_b;
  p.mu = mu;
  p.rho = rho;
  p.dt = dt;
  p.lambda = std::sqrt(rho / (mu * dt));
  p.s_min = s_alpha.minCoeff();
  p.s_max_excess = s_alpha.maxCoeff() - 1.0;
  p.gamma = (1.0 - s_alpha.array().inverse()).maxCoeff();
  p.validate();
  return p;
}

namespace {

// (beta^2 k^2 + k^4)/sqrt(beta^2 + k^2) - |k|^3, written to avoid cancellation at large k.
double t_bracket(double k, double beta) {
  const double ak = std::abs(k);
  const double root = std::sqrt(beta * beta + k * k);
  // k^2 root - |k|^3 = k^2 beta^2 / (root + |k|)
  return k * k * (beta * beta / (root + ak));
}

// |k|^3 - k^4/sqrt(beta^2 + k^2) = |k|^3 beta^2 / (root (root + |k|))
double s_bracket(double k, double beta) {
  const double ak = std::abs(k);
  const double root = std::sqrt(beta * beta + k * k);
  return ak * ak * ak * beta * beta / (root * (root + ak));
}

}  // namespace

double ssd_symbol_T(double k, const SsdSymbolParams& p) {
  const double beta = p.lambda * p.s_min;
  return -(p.S_b * p.dt) / (2.0 * p.rho * p.s_min * p.s_min) * t_bracket(k, beta);
}

double ssd_symbol_S(double k, const SsdSymbolParams& p) {
  const double beta = p.lambda * p.s_min;
  return -(p.S_b * p.dt * p.s_max_excess) / (2.0 * p.rho * p.s_min * p.s_min) * s_bracket(k, beta);
}

SsdSymbolPair ssd_symbol_second_order(double k, const SsdSymbolParams& p) {
  const double beta = std::sqrt(2.0) * p.lambda * p.s_min;
  const double s2 = p.s_min * p.s_min;
  SsdSymbolPair out;
  out.T = -(p.S_b * p.dt) / (4.0 * p.rho * s2) * t_bracket(k, beta);
  out.S = -(p.S_b * p.dt * p.s_max_excess) / (4.0 * p.rho * s2 * p.s_min) * s_bracket(k, beta);
  return out;
}

}  // namespace ibssd
