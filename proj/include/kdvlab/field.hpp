#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "kdvlab/errors.hpp"
#include "kdvlab/fft.hpp"
#include "kdvlab/grid.hpp"

namespace kdvlab {

using Complex = std::complex<double>;

/// Transform convention, fixed once for the whole library:
///
///     f(x) = sum_k c_k e^{i xi_k x},   xi_k = 2 pi k / L,
///
/// which discretizes the line transform pair f(x) = int fhat(xi) e^{i x xi} dxi
/// via fhat(xi_k) ~ c_k / dxi. Under this convention the tent spectrum
/// (1-|xi|) on [-1,1] synthesizes to 2(1-cos x)/x^2, and Parseval reads
/// int f g dx = L sum_k c_k conj(c_k(g)).
///
/// Coefficients are stored in FFT order (k = 0..n/2-1, -n/2..-1). A field is
/// real-valued by construction; Hermitian symmetry c_{-k} = conj(c_k) is
/// enforced whenever a field is built from raw coefficients.
class SpectralField {
 public:
  static SpectralField zero(const Grid& grid) {
    return SpectralField(grid, std::vector<double>(grid.size(), 0.0),
                         std::vector<Complex>(grid.size(), Complex(0.0, 0.0)));
  }

  static SpectralField from_samples(const Grid& grid, std::vector<double> samples) {
    if (samples.size() != grid.size())
      throw InvalidArgument("from_samples: sample count does not match grid");
    std::vector<Complex> coeffs = analyze(grid, samples);
    return SpectralField(grid, std::move(samples), std::move(coeffs));
  }

  static SpectralField from_coefficients(const Grid& grid, std::vector<Complex> coeffs) {
    if (coeffs.size() != grid.size())
      throw InvalidArgument("from_coefficients: coefficient count does not match grid");
    hermitize(grid, coeffs);
    std::vector<double> samples = synthesize(grid, coeffs);
    return SpectralField(grid, std::move(samples), std::move(coeffs));
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& samples() const { return samples_; }
  const std::vector<Complex>& coefficients() const { return coeffs_; }

  /// Coefficient by signed wavenumber k in [-n/2, n/2).
  Complex coefficient(long k) const { return coeffs_[grid_.index_of(k)]; }

  /// Largest |xi_k| carrying more than rel_tol of the peak coefficient
  /// magnitude; 0 for an (essentially) empty spectrum.
  double max_populated_frequency(double rel_tol = 1e-13) const {
    double peak = 0.0;
    for (const Complex& c : coeffs_) peak = std::max(peak, std::abs(c));
    if (peak == 0.0) return 0.0;
    double maxfreq = 0.0;
    for (std::size_t j = 0; j < coeffs_.size(); ++j)
      if (std::abs(coeffs_[j]) > rel_tol * peak)
        maxfreq = std::max(maxfreq, std::abs(grid_.xi(j)));
    return maxfreq;
  }

  /// c_k = (1/n) (-1)^k sum_j f_j e^{-2 pi i j k / n}; the parity factor
  /// accounts for the domain starting at x = -L/2.
  static std::vector<Complex> analyze(const Grid& grid, const std::vector<double>& samples) {
    const std::size_t n = grid.size();
    if (samples.size() != n) throw InvalidArgument("analyze: length mismatch");
    std::vector<Complex> tmp(n), out(n);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = Complex(samples[j], 0.0);
    FftEngine::local().forward(n, tmp.data(), out.data());
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) out[j] *= (j % 2 == 0 ? inv_n : -inv_n);
    return out;
  }

  /// Inverse of analyze; returns collocation samples (real parts; the
  /// imaginary residue of a Hermitian spectrum is rounding noise).
  static std::vector<double> synthesize(const Grid& grid, const std::vector<Complex>& coeffs) {
    const std::size_t n = grid.size();
    if (coeffs.size() != n) throw InvalidArgument("synthesize: length mismatch");
    std::vector<Complex> tmp(n), out(n);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = (j % 2 == 0 ? coeffs[j] : -coeffs[j]);
    FftEngine::local().backward(n, tmp.data(), out.data());
    std::vector<double> samples(n);
    for (std::size_t j = 0; j < n; ++j) samples[j] = out[j].real();
    return samples;
  }

 private:
  SpectralField(const Grid& grid, std::vector<double> samples, std::vector<Complex> coeffs)
      : grid_(grid), samples_(std::move(samples)), coeffs_(std::move(coeffs)) {}

  /// Exact Hermitian symmetrization: c_k <- (c_k + conj(c_{-k}))/2, with the
  /// k=0 and Nyquist modes forced real.
  static void hermitize(const Grid& grid, std::vector<Complex>& c) {
    const std::size_t n = grid.size();
    c[0] = Complex(c[0].real(), 0.0);
    c[n / 2] = Complex(c[n / 2].real(), 0.0);
    for (std::size_t j = 1; j < n / 2; ++j) {
      const Complex avg = 0.5 * (c[j] + std::conj(c[n - j]));
      c[j] = avg;
      c[n - j] = std::conj(avg);
    }
  }

  Grid grid_;
  std::vector<double> samples_;
  std::vector<Complex> coeffs_;
};

// ---------------------------------------------------------------------------
// Field algebra
// ---------------------------------------------------------------------------

inline SpectralField operator+(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "operator+");
  std::vector<Complex> c = f.coefficients();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] += g.coefficients()[j];
  return SpectralField::from_coefficients(f.grid(), std::move(c));
}

inline SpectralField operator-(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "operator-");
  std::vector<Complex> c = f.coefficients();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] -= g.coefficients()[j];
  return SpectralField::from_coefficients(f.grid(), std::move(c));
}

inline SpectralField operator*(double a, const SpectralField& f) {
  std::vector<Complex> c = f.coefficients();
  for (Complex& ck : c) ck *= a;
  return SpectralField::from_coefficients(f.grid(), std::move(c));
}

/// Spectral derivative: coefficients multiplied by (i xi_k)^order. For odd
/// orders the unmatched Nyquist mode is zeroed, the standard choice that keeps
/// the result real.
inline SpectralField derivative(const SpectralField& f, unsigned order) {
  if (order == 0) return f;
  const Grid& grid = f.grid();
  std::vector<Complex> c = f.coefficients();
  for (std::size_t j = 0; j < c.size(); ++j) {
    const Complex factor = std::pow(Complex(0.0, grid.xi(j)), static_cast<double>(order));
    c[j] *= factor;
  }
  if (order % 2 == 1) c[grid.size() / 2] = Complex(0.0, 0.0);
  return SpectralField::from_coefficients(grid, std::move(c));
}

enum class DealiasPolicy {
  /// Refuse products whose exact spectral support would exceed the Nyquist
  /// frequency of the grid.
  kRequireExact,
  /// Return the orthogonal projection of the exact product onto the resolved
  /// band (retained modes are still alias-free).
  kProject,
};

/// Coefficient-level zero-padded product: the spectrum of f*g projected back
/// onto the base lattice, alias-free for everything the padded lattice can
/// hold. No support checking; callers pick the policy.
inline std::vector<Complex> product_coefficients(const Grid& grid, const std::vector<Complex>& cf,
                                                 const std::vector<Complex>& cg,
                                                 std::size_t padding = 2) {
  const std::size_t n = grid.size();
  const std::size_t m = padding * n;
  const Grid big(grid.length(), m);
  std::vector<Complex> bf(m, Complex(0, 0)), bg(m, Complex(0, 0));
  for (std::size_t j = 0; j < n; ++j) {
    const long k = grid.wavenumber(j);
    bf[big.index_of(k)] = cf[j];
    bg[big.index_of(k)] = cg[j];
  }
  std::vector<double> sf = SpectralField::synthesize(big, bf);
  const std::vector<double> sg = SpectralField::synthesize(big, bg);
  for (std::size_t j = 0; j < m; ++j) sf[j] *= sg[j];
  const std::vector<Complex> cp = SpectralField::analyze(big, sf);
  std::vector<Complex> out(n, Complex(0, 0));
  for (std::size_t j = 0; j < n; ++j) out[j] = cp[big.index_of(grid.wavenumber(j))];
  out[n / 2] = Complex(0.0, 0.0);  // headroom mode stays empty
  return out;
}

/// Pointwise product via zero-padded transforms. With the default padding
/// factor 2 the product of two fields is computed alias-free whenever its
/// exact spectrum fits on the padded lattice, which holds for any pair of
/// fields resolved on the base grid; composing two such products covers cubic
/// terms exactly.
inline SpectralField product(const SpectralField& f, const SpectralField& g,
                             DealiasPolicy policy = DealiasPolicy::kRequireExact,
                             std::size_t padding = 2) {
  require_same_grid(f.grid(), g.grid(), "product");
  const Grid& grid = f.grid();
  if (padding < 2) throw InvalidArgument("product: padding factor must be >= 2");

  if (policy == DealiasPolicy::kRequireExact) {
    const double support = f.max_populated_frequency() + g.max_populated_frequency();
    if (support >= grid.nyquist())
      throw AliasingError("product: exact support " + std::to_string(support) +
                          " reaches Nyquist " + std::to_string(grid.nyquist()));
  }
  return SpectralField::from_coefficients(
      grid, product_coefficients(grid, f.coefficients(), g.coefficients(), padding));
}

/// int f g dx on the torus, by collocation quadrature (L/n) sum_j f_j g_j.
/// Equals the spectral form L sum_k c_k(f) conj(c_k(g)) to rounding.
inline double pair(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "pair");
  const std::size_t n = f.grid().size();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += f.samples()[j] * g.samples()[j];
  return acc * f.grid().length() / static_cast<double>(n);
}

/// Spectral-side pairing L sum_k c_k(f) conj(c_k(g)) (real part).
inline double pair_spectral(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "pair_spectral");
  double acc = 0.0;
  for (std::size_t j = 0; j < f.grid().size(); ++j)
    acc += (f.coefficients()[j] * std::conj(g.coefficients()[j])).real();
  return acc * f.grid().length();
}

/// Discrete H^s norm ( L sum_k (1+xi_k^2)^s |c_k|^2 )^{1/2}; the s = 0 case
/// is the torus L^2 norm, and the sum discretizes
/// ( 2 pi int (1+xi^2)^s |fhat(xi)|^2 dxi )^{1/2} under the fixed convention.
inline double sobolev_norm(const SpectralField& f, double s) {
  const Grid& grid = f.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double xi = grid.xi(j);
    acc += std::pow(1.0 + xi * xi, s) * std::norm(f.coefficients()[j]);
  }
  return std::sqrt(grid.length() * acc);
}

inline double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0.0); }

/// int u^p dx by collocation quadrature on a zero-padded grid; exact for
/// band-limited u as long as p * max_freq stays short of the padded lattice
/// period 2 * padding * nyquist.
inline double moment(const SpectralField& u, unsigned power, std::size_t padding = 4) {
  const Grid& grid = u.grid();
  const std::size_t n = grid.size();
  const std::size_t m = padding * n;
  const Grid big(grid.length(), m);
  std::vector<Complex> cu(m, Complex(0, 0));
  for (std::size_t j = 0; j < n; ++j) cu[big.index_of(grid.wavenumber(j))] = u.coefficients()[j];
  const std::vector<double> su = SpectralField::synthesize(big, cu);
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double t = 1.0;
    for (unsigned q = 0; q < power; ++q) t *= su[j];
    acc += t;
  }
  return acc * grid.length() / static_cast<double>(m);
}

/// int w * u^p dx evaluated by collocation quadrature on a zero-padded grid.
/// With padding >= (p+1)/2 rounded up suitably the integrand's spectrum stays
/// clear of the padded lattice period, so the quadrature is exact for
/// band-limited u; padding 4 covers every power used by the diagnostics (p <= 6).
inline double windowed_moment(const SpectralField& u, const SpectralField& w, unsigned power,
                              std::size_t padding = 4) {
  require_same_grid(u.grid(), w.grid(), "windowed_moment");
  const Grid& grid = u.grid();
  const std::size_t n = grid.size();
  const std::size_t m = padding * n;
  const Grid big(grid.length(), m);
  std::vector<Complex> cu(m, Complex(0, 0)), cw(m, Complex(0, 0));
  for (std::size_t j = 0; j < n; ++j) {
    const long k = grid.wavenumber(j);
    cu[big.index_of(k)] = u.coefficients()[j];
    cw[big.index_of(k)] = w.coefficients()[j];
  }
  const std::vector<double> su = SpectralField::synthesize(big, cu);
  const std::vector<double> sw = SpectralField::synthesize(big, cw);
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double t = 1.0;
    for (unsigned q = 0; q < power; ++q) t *= su[j];
    acc += sw[j] * t;
  }
  return acc * grid.length() / static_cast<double>(m);
}

}  // namespace kdvlab
