#pragma once

// Test-only reference implementations, kept deliberately independent of the
// spectral code paths they check: direct O(n^2) transforms, direct
// convolution, and 1-D quadrature of closed forms.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

// Direct evaluation of c_k = (1/n) sum_j f_j e^{-i xi_k x_j} with
// x_j = -L/2 + jL/n, xi_k = 2 pi k / L, k in FFT storage order.
inline std::vector<Complex> direct_analyze(double L, const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  std::vector<Complex> out(n, Complex(0, 0));
  for (std::size_t idx = 0; idx < n; ++idx) {
    const long k = idx < n / 2 ? static_cast<long>(idx) : static_cast<long>(idx) - static_cast<long>(n);
    const double xi = 2.0 * std::numbers::pi * static_cast<double>(k) / L;
    Complex acc(0, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = -0.5 * L + static_cast<double>(j) * L / static_cast<double>(n);
      acc += samples[j] * std::polar(1.0, -xi * x);
    }
    out[idx] = acc / static_cast<double>(n);
  }
  return out;
}

// Direct synthesis f_j = sum_k c_k e^{i xi_k x_j}.
inline std::vector<double> direct_synthesize(double L, const std::vector<Complex>& coeffs) {
  const std::size_t n = coeffs.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = -0.5 * L + static_cast<double>(j) * L / static_cast<double>(n);
    Complex acc(0, 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
      const long k = idx < n / 2 ? static_cast<long>(idx) : static_cast<long>(idx) - static_cast<long>(n);
      const double xi = 2.0 * std::numbers::pi * static_cast<double>(k) / L;
      acc += coeffs[idx] * std::polar(1.0, xi * x);
    }
    out[j] = acc.real();
  }
  return out;
}

// Exact coefficient convolution (c_f * c_g)_k = sum_m c_f[m] c_g[k-m] over the
// full signed lattice, no wraparound: the spectrum of the pointwise product.
inline std::vector<Complex> direct_convolution(const std::vector<Complex>& cf,
                                               const std::vector<Complex>& cg) {
  const long n = static_cast<long>(cf.size());
  const long half = n / 2;
  auto get = [&](const std::vector<Complex>& c, long k) -> Complex {
    if (k < -half || k >= half) return Complex(0, 0);
    return c[k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + n)];
  };
  std::vector<Complex> out(cf.size(), Complex(0, 0));
  for (long k = -half; k < half; ++k) {
    Complex acc(0, 0);
    for (long m = -half; m < half; ++m) acc += get(cf, m) * get(cg, k - m);
    out[k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + n)] = acc;
  }
  return out;
}

// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t panels = 4096) {
  if (panels % 2 == 1) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) acc += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double theta_line(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 12.0 + x2 * x2 / 360.0;
  }
  return 2.0 * (1.0 - std::cos(x)) / (x * x);
}

// || f ||_{H^s}^2 of a function with line transform fhat supported on
// [lo, hi] (+ mirror): 2 * 2 pi * int_lo^hi (1+xi^2)^s |fhat|^2 dxi.
inline double hs_band_integral(const std::function<double(double)>& fhat, double lo, double hi,
                               double s, std::size_t panels = 1 << 16) {
  return 4.0 * std::numbers::pi *
         simpson([&](double xi) { return std::pow(1.0 + xi * xi, s) * fhat(xi) * fhat(xi); }, lo,
                 hi, panels);
}

}  // namespace oracle
