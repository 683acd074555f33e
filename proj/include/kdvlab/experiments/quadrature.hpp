#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>

namespace kdvlab::oracles {

/// Composite Simpson rule; panels rounded up to even.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t panels = 4096) {
  if (panels % 2 == 1) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i)
    acc += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// H^s mass of a line function whose transform is fhat on [lo, hi] plus the
/// mirrored band: 2 * 2 pi * int_lo^hi (1+xi^2)^s fhat(xi)^2 dxi.
inline double hs_band_mass(const std::function<double(double)>& fhat, double lo, double hi,
                           double s, std::size_t panels = 1 << 14) {
  return 4.0 * std::numbers::pi *
         simpson([&](double xi) { return std::pow(1.0 + xi * xi, s) * fhat(xi) * fhat(xi); }, lo,
                 hi, panels);
}

/// 1-D quadrature prediction of || miura(eps h_N) - eps^2 c_theta theta ||_{H^s}:
/// the derivative band at [N, N+1] plus the quadratic tents at 2N+1.
inline double miura_tail_distance(double N, double s, double eps) {
  const double band = hs_band_mass([](double xi) { return xi; }, N, N + 1.0, s);
  const double tents = hs_band_mass(
      [N](double xi) { return 1.0 - std::abs(xi - (2.0 * N + 1.0)); }, 2.0 * N, 2.0 * N + 2.0, s);
  return std::sqrt(eps * eps * band + eps * eps * eps * eps * tents);
}

/// int_{-1}^{1} theta^2 dx of theta(x) = 2(1-cos x)/x^2, the lower-bound mass
/// of the windowed observable.
inline double theta_inner_mass() {
  auto theta = [](double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 12.0;
    return 2.0 * (1.0 - std::cos(x)) / (x * x);
  };
  return simpson([&](double x) { return theta(x) * theta(x); }, -1.0, 1.0, 1 << 14);
}

}  // namespace kdvlab::oracles
