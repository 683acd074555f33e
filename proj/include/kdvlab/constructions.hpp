#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "kdvlab/errors.hpp"
#include "kdvlab/field.hpp"
#include "kdvlab/grid.hpp"

namespace kdvlab {

/// Band-limited packet with flat spectrum on the half-open frequency band
/// [N, N+1), mirrored to negative frequencies: c_k = eps * dxi there, zero
/// elsewhere. Real, even, with L^2 norm eps * 2 sqrt(pi) independent of N.
inline SpectralField make_h_band(const Grid& grid, double band_start, double eps) {
  const double N = band_start;
  if (!(N > 0.0)) throw InvalidArgument("make_h_band: band start must be positive");
  if (!(N + 1.0 < 0.5 * grid.nyquist() - 1.0))
    throw InvalidArgument("make_h_band: band too close to Nyquist (no room for the quadratic image)");
  std::size_t modes_in_band = 0;
  std::vector<Complex> c(grid.size(), Complex(0, 0));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double a = std::abs(grid.xi(j));
    if (a >= N && a < N + 1.0) {
      c[j] = Complex(eps * grid.dxi(), 0.0);
      ++modes_in_band;
    }
  }
  if (modes_in_band < 32)  // 16 per sign of xi
    throw InvalidArgument("make_h_band: band under-resolved (" +
                          std::to_string(modes_in_band / 2) + " lattice modes)");
  return SpectralField::from_coefficients(grid, std::move(c));
}

/// Tent-spectrum profile: c_k = dxi * (1-|xi_k|) for |xi_k| <= 1. Its
/// collocation samples agree with 2(1-cos x)/x^2 up to domain periodization.
inline SpectralField make_theta(const Grid& grid) {
  if (!(grid.nyquist() > 1.0)) throw InvalidArgument("make_theta: Nyquist must exceed 1");
  std::vector<Complex> c(grid.size(), Complex(0, 0));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double a = std::abs(grid.xi(j));
    if (a <= 1.0) c[j] = Complex(grid.dxi() * (1.0 - a), 0.0);
  }
  return SpectralField::from_coefficients(grid, std::move(c));
}

/// Closed form of the tent-spectrum profile on the line.
inline double theta_closed_form(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;  // 2(1-cos x)/x^2 = 1 - x^2/12 + x^4/360 - ...
    return 1.0 - x2 / 12.0 + x2 * x2 / 360.0;
  }
  return 2.0 * (1.0 - std::cos(x)) / (x * x);
}

/// Unit tents (in line-transform units) centered at +-(2N+1):
/// c_k = dxi * (1 - ||xi_k| - (2N+1)|)_+ .
inline SpectralField make_alpha(const Grid& grid, double N) {
  if (!(2.0 * N + 2.0 < grid.nyquist()))
    throw InvalidArgument("make_alpha: tent support exceeds Nyquist");
  std::vector<Complex> c(grid.size(), Complex(0, 0));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double d = std::abs(std::abs(grid.xi(j)) - (2.0 * N + 1.0));
    if (d < 1.0) c[j] = Complex(grid.dxi() * (1.0 - d), 0.0);
  }
  return SpectralField::from_coefficients(grid, std::move(c));
}

namespace detail {
/// exp(-1/x) for x > 0, else 0; the standard smooth cutoff kernel.
inline double cutoff_kernel(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
/// Smooth step: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
inline double smooth_step(double t) {
  const double a = cutoff_kernel(t);
  const double b = cutoff_kernel(1.0 - t);
  return a / (a + b);
}
}  // namespace detail

/// Smooth window: identically 1 on [-R, R], supported in (-2R, 2R),
/// 0 <= phi <= 1, built from exp(-1/x) transitions and sampled on the grid.
inline SpectralField make_bump(const Grid& grid, double R) {
  if (!(R > 0.0)) throw InvalidArgument("make_bump: radius must be positive");
  if (!(2.0 * R < 0.5 * grid.length()))
    throw InvalidArgument("make_bump: support exceeds half the domain");
  std::vector<double> s(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double a = std::abs(grid.x(j));
    s[j] = a <= R ? 1.0 : detail::smooth_step((2.0 * R - a) / R);
  }
  return SpectralField::from_samples(grid, std::move(s));
}

/// Test function phi = bump(R=1) * theta: smooth, compactly supported in
/// (-2, 2), equal to theta on [-1, 1].
inline SpectralField make_test_function(const Grid& grid) {
  const SpectralField bump = make_bump(grid, 1.0);
  const SpectralField theta = make_theta(grid);
  return product(bump, theta, DealiasPolicy::kProject);
}

/// Periodic antiderivative of the mean-removed window: h with
/// h' = bump(R) - mean(bump(R)). On the torus only a zero-mean derivative has
/// a periodic antiderivative; the removed constant re-enters the local mass
/// balance only through exactly conserved quantities, so the balance identity
/// stays exact. h itself is normalized to zero mean.
inline SpectralField make_window_antiderivative(const Grid& grid, double R) {
  const SpectralField b = make_bump(grid, R);
  std::vector<Complex> c(grid.size(), Complex(0, 0));
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (j == grid.size() / 2) continue;  // Nyquist stays empty
    c[j] = b.coefficients()[j] / Complex(0.0, grid.xi(j));
  }
  return SpectralField::from_coefficients(grid, std::move(c));
}

/// The quadratic map u -> u_x + u^2 linking the two flows.
inline SpectralField miura(const SpectralField& u,
                           DealiasPolicy policy = DealiasPolicy::kRequireExact) {
  return derivative(u, 1) + product(u, u, policy);
}

/// Exact spectral split of miura(eps * h_band(N)). The derivative part lives
/// on the band [N, N+1), the quadratic part splits into a low-frequency tent
/// on [-1, 1] (fitted against theta, coefficient c_theta) and tents near
/// +-(2N+1) (compared against alpha, fitted amplitude alpha_fit).
struct MiuraDecomposition {
  SpectralField derivative_part;  // eps h'
  SpectralField low_part;         // eps^2 c_theta theta
  SpectralField high_part;        // modes near +-(2N+1)
  SpectralField residual;         // whatever remains
  double c_theta = 0.0;           // fitted low-frequency coefficient
  double alpha_fit = 0.0;         // fitted amplitude of the high tents
  double residual_rel = 0.0;      // ||residual||_L2 / ||miura||_L2
};

inline MiuraDecomposition decompose_miura(const Grid& grid, double N, double eps,
                                          double residual_tol = 1e-10) {
  if (!(N > 2.0)) throw InvalidArgument("decompose_miura: bands overlap for N <= 2");
  if (!(2.0 * N + 2.0 < grid.nyquist()))
    throw InvalidArgument("decompose_miura: quadratic image exceeds Nyquist");
  const SpectralField h = make_h_band(grid, N, eps);
  const SpectralField w = miura(h);
  const SpectralField theta = make_theta(grid);
  const SpectralField alpha = make_alpha(grid, N);

  const std::size_t n = grid.size();
  std::vector<Complex> cd(n, Complex(0, 0)), chigh(n, Complex(0, 0));
  double low_dot = 0.0, low_nrm = 0.0, high_dot = 0.0, high_nrm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::abs(grid.xi(j));
    const Complex wk = w.coefficients()[j];
    if (a >= N && a < N + 1.0) {
      cd[j] = wk;
    } else if (a <= 1.0) {
      low_dot += (wk * std::conj(theta.coefficients()[j])).real();
      low_nrm += std::norm(theta.coefficients()[j]);
    } else if (std::abs(a - (2.0 * N + 1.0)) <= 1.0) {
      chigh[j] = wk;
      high_dot += (wk * std::conj(alpha.coefficients()[j])).real();
      high_nrm += std::norm(alpha.coefficients()[j]);
    }
  }

  MiuraDecomposition d{
      SpectralField::from_coefficients(grid, std::move(cd)),
      SpectralField::zero(grid),
      SpectralField::from_coefficients(grid, std::move(chigh)),
      SpectralField::zero(grid),
  };
  d.c_theta = low_dot / (eps * eps * low_nrm);
  d.alpha_fit = high_dot / (eps * eps * high_nrm);
  d.low_part = (eps * eps * d.c_theta) * theta;
  d.residual = w - d.derivative_part - d.low_part - d.high_part;
  d.residual_rel = l2_norm(d.residual) / l2_norm(w);
  if (!(d.residual_rel <= residual_tol))
    throw DecompositionError("decompose_miura: residual " + std::to_string(d.residual_rel) +
                             " exceeds tolerance (convention or dealiasing bug)");
  return d;
}

}  // namespace kdvlab
