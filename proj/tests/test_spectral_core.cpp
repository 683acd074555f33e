#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "kdvlab/constructions.hpp"
#include "kdvlab/field.hpp"
#include "kdvlab/grid.hpp"
#include "oracles.hpp"

using namespace kdvlab;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

SpectralField random_real_field(const Grid& grid, unsigned seed, double max_freq) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Complex> c(grid.size(), Complex(0, 0));
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (std::abs(grid.xi(j)) <= max_freq && j != grid.size() / 2)
      c[j] = Complex(dist(rng), dist(rng));
  return SpectralField::from_coefficients(grid, std::move(c));  // hermitized inside
}
}  // namespace

TEST_CASE("grid frequency lattice and preconditions") {
  const Grid g(2.0 * kPi, 16);
  CHECK(g.dxi() == Approx(1.0).margin(1e-15));
  CHECK(g.wavenumber(0) == 0);
  CHECK(g.wavenumber(7) == 7);
  CHECK(g.wavenumber(8) == -8);
  CHECK(g.wavenumber(15) == -1);
  CHECK(g.xi(8) == Approx(-8.0));

  const Grid big(128.0 * kPi, 8192);
  CHECK(big.dxi() == Approx(1.0 / 64.0));
  CHECK(big.nyquist() == Approx(64.0));

  CHECK_THROWS_AS(Grid(2.0 * kPi, 15), InvalidArgument);
  CHECK_THROWS_AS(Grid(2.0 * kPi, 8), InvalidArgument);
  CHECK_THROWS_AS(Grid(-1.0, 16), InvalidArgument);
  CHECK_THROWS_AS(Grid(0.0, 16), InvalidArgument);
}

TEST_CASE("analyze picks out cosine modes") {
  const Grid g(2.0 * kPi, 16);
  std::vector<double> s(16);
  for (std::size_t j = 0; j < 16; ++j) s[j] = std::cos(g.x(j));
  const SpectralField f = SpectralField::from_samples(g, s);
  CHECK(f.coefficient(1).real() == Approx(0.5).margin(1e-14));
  CHECK(f.coefficient(-1).real() == Approx(0.5).margin(1e-14));
  for (long k = -8; k < 8; ++k) {
    if (k == 1 || k == -1) continue;
    CHECK(std::abs(f.coefficient(k)) < 1e-14);
  }
}

TEST_CASE("zero field has zero coefficients") {
  const Grid g(2.0 * kPi, 32);
  const SpectralField z = SpectralField::from_samples(g, std::vector<double>(32, 0.0));
  for (const Complex& c : z.coefficients()) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("analyze matches the direct transform and round-trips") {
  for (std::size_t n : {16u, 32u, 64u}) {
    const double L = 8.0 * kPi;
    const Grid g(L, n);
    std::mt19937 rng(1234 + n);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> s(n);
    for (double& v : s) v = dist(rng);

    const SpectralField f = SpectralField::from_samples(g, s);
    const std::vector<Complex> ref = oracle::direct_analyze(L, s);
    double scale = 0.0, err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      err = std::max(err, std::abs(f.coefficients()[j] - ref[j]));
      scale = std::max(scale, std::abs(ref[j]));
    }
    CHECK(err <= 1e-12 * scale);

    const std::vector<double> back = SpectralField::synthesize(g, f.coefficients());
    double serr = 0.0, snorm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      serr = std::max(serr, std::abs(back[j] - s[j]));
      snorm = std::max(snorm, std::abs(s[j]));
    }
    CHECK(serr <= 1e-12 * snorm);
  }
}

TEST_CASE("analyze and synthesize reject length mismatches") {
  const Grid g(2.0 * kPi, 16);
  CHECK_THROWS_AS(SpectralField::from_samples(g, std::vector<double>(15, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(SpectralField::from_coefficients(g, std::vector<Complex>(17)), InvalidArgument);
}

TEST_CASE("spectral derivative") {
  const Grid g(2.0 * kPi, 64);
  std::vector<double> s(64), c(64);
  for (std::size_t j = 0; j < 64; ++j) s[j] = std::sin(g.x(j)), c[j] = std::cos(g.x(j));
  const SpectralField f = SpectralField::from_samples(g, s);

  SECTION("d/dx sin = cos") {
    const SpectralField df = derivative(f, 1);
    for (std::size_t j = 0; j < 64; ++j)
      CHECK(df.samples()[j] == Approx(c[j]).margin(1e-12));
  }
  SECTION("derivative of a constant vanishes") {
    const SpectralField one = SpectralField::from_samples(g, std::vector<double>(64, 3.5));
    const SpectralField d = derivative(one, 1);
    for (double v : d.samples()) CHECK(std::abs(v) < 1e-13);
  }
  SECTION("third derivative multiplies mode 3 by (3i)^3 = -27i") {
    std::vector<Complex> ck(64, Complex(0, 0));
    ck[3] = Complex(0.25, 0.0);
    ck[64 - 3] = Complex(0.25, 0.0);
    const SpectralField m = SpectralField::from_coefficients(g, std::move(ck));
    const SpectralField d3 = derivative(m, 3);
    CHECK(d3.coefficient(3).real() == Approx(0.0).margin(1e-14));
    CHECK(d3.coefficient(3).imag() == Approx(-27.0 * 0.25).margin(1e-12));
  }
}

TEST_CASE("product: sin * sin = (1 - cos 2x)/2 alias-free") {
  const Grid g(2.0 * kPi, 32);
  std::vector<double> s(32);
  for (std::size_t j = 0; j < 32; ++j) s[j] = std::sin(g.x(j));
  const SpectralField f = SpectralField::from_samples(g, s);
  const SpectralField p = product(f, f);
  for (std::size_t j = 0; j < 32; ++j)
    CHECK(p.samples()[j] == Approx(0.5 * (1.0 - std::cos(2.0 * g.x(j)))).margin(1e-13));
}

TEST_CASE("product of a band packet populates exactly the difference and sum bands") {
  const Grid g(128.0 * kPi, 8192);
  const double N = 8.0;
  const SpectralField h = make_h_band(g, N, 1.0);
  const SpectralField p = product(h, h);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double a = std::abs(g.xi(j));
    const bool in_low = a <= 1.0;
    const bool in_high = a >= 2.0 * N && a <= 2.0 * N + 2.0;
    if (!(in_low || in_high)) CHECK(std::abs(p.coefficients()[j]) < 1e-16);
  }
  CHECK(std::abs(p.coefficient(0)) > 0.0);
  CHECK(std::abs(p.coefficient(static_cast<long>((2 * N + 1) * 64))) > 0.0);
}

TEST_CASE("product matches the direct convolution oracle") {
  const Grid g(4.0 * kPi, 64);
  const SpectralField f = random_real_field(g, 7, g.nyquist() / 2.0 - g.dxi());
  const SpectralField h = random_real_field(g, 8, g.nyquist() / 2.0 - g.dxi());
  const SpectralField p = product(f, h);
  const std::vector<Complex> ref = oracle::direct_convolution(f.coefficients(), h.coefficients());
  double scale = 0.0;
  for (const Complex& c : ref) scale = std::max(scale, std::abs(c));
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == g.size() / 2) continue;  // headroom mode kept empty by policy
    CHECK(std::abs(p.coefficients()[j] - ref[j]) <= 1e-12 * scale);
  }
}

TEST_CASE("product flags spectra that overflow Nyquist, projects on request") {
  const Grid g(4.0 * kPi, 64);
  const SpectralField f = random_real_field(g, 9, g.nyquist() * 0.75);
  CHECK_THROWS_AS(product(f, f), AliasingError);
  CHECK_NOTHROW(product(f, f, DealiasPolicy::kProject));
  // the projection agrees with the oracle on the retained band
  const SpectralField p = product(f, f, DealiasPolicy::kProject);
  const std::vector<Complex> ref = oracle::direct_convolution(f.coefficients(), f.coefficients());
  double scale = 0.0;
  for (const Complex& c : ref) scale = std::max(scale, std::abs(c));
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == g.size() / 2) continue;
    CHECK(std::abs(p.coefficients()[j] - ref[j]) <= 1e-12 * scale);
  }
}

TEST_CASE("pair quadrature") {
  const Grid g(2.0 * kPi, 64);
  std::vector<double> s(64);
  for (std::size_t j = 0; j < 64; ++j) s[j] = std::sin(g.x(j));
  const SpectralField f = SpectralField::from_samples(g, s);
  CHECK(pair(f, f) == Approx(kPi).margin(1e-12));

  const SpectralField one = SpectralField::from_samples(g, std::vector<double>(64, 1.0));
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> r(64);
  double mean = 0.0;
  for (double& v : r) mean += (v = dist(rng));
  mean /= 64.0;
  const SpectralField rf = SpectralField::from_samples(g, r);
  CHECK(pair(rf, one) == Approx(mean * g.length()).margin(1e-12));
}

TEST_CASE("pair(theta, theta) is consistent with the L2 norm") {
  const Grid g(128.0 * kPi, 8192);
  const SpectralField theta = make_theta(g);
  const double n0 = sobolev_norm(theta, 0.0);
  CHECK(pair(theta, theta) == Approx(n0 * n0).epsilon(1e-10));
  CHECK(pair_spectral(theta, theta) == Approx(n0 * n0).epsilon(1e-12));
}

TEST_CASE("sobolev norm: zero field, theta against the quadrature oracle") {
  const Grid g(128.0 * kPi, 8192);
  for (double s : {-2.0, -0.5, 0.0, 1.0})
    CHECK(sobolev_norm(SpectralField::zero(g), s) == 0.0);

  const SpectralField theta = make_theta(g);
  // Oracle: int theta(x)^2 dx over |x| <= 1e4, graded composite Simpson.
  const double head = oracle::simpson([](double x) { return oracle::theta_line(x) * oracle::theta_line(x); },
                                      -50.0, 50.0, 1 << 16);
  const double tail = 2.0 * oracle::simpson([](double x) { return oracle::theta_line(x) * oracle::theta_line(x); },
                                            50.0, 1e4, 1 << 18);
  const double l2 = std::sqrt(head + tail);
  CHECK(l2 == Approx(std::sqrt(4.0 * kPi / 3.0)).epsilon(1e-4));
  // torus value vs line value: difference is domain periodization, O(1/L^2)
  CHECK(sobolev_norm(theta, 0.0) == Approx(l2).epsilon(1e-3));
}

TEST_CASE("band packet L2 norm is N-independent: 2 sqrt(pi)") {
  const Grid g(128.0 * kPi, 8192);
  for (double N : {8.0, 12.5, 16.0, 24.0}) {
    const SpectralField h = make_h_band(g, N, 1.0);
    CHECK(sobolev_norm(h, 0.0) == Approx(2.0 * std::sqrt(kPi)).margin(1e-8));
  }
}

TEST_CASE("negative-index Sobolev norms of the band packet follow the band integral") {
  const Grid g(128.0 * kPi, 8192);
  const double s = -1.5;
  for (double N : {8.0, 16.0, 24.0}) {
    const SpectralField h = make_h_band(g, N, 1.0);
    const double measured = sobolev_norm(h, s);
    const double ref = std::sqrt(oracle::hs_band_integral([](double) { return 1.0; }, N, N + 1.0, s));
    CHECK(measured == Approx(ref).epsilon(0.02));
    // normalized form tends to the flat-band constant
    const double normalized = measured / std::pow(1.0 + N * N, s / 2.0);
    CHECK(normalized == Approx(2.0 * std::sqrt(kPi)).epsilon(0.2));
  }
}

TEST_CASE("property: Parseval ties quadrature to coefficients") {
  const Grid g(16.0 * kPi, 256);
  for (unsigned seed : {1u, 2u, 3u}) {
    const SpectralField f = random_real_field(g, seed, g.nyquist() - g.dxi());
    double quad = 0.0;
    for (double v : f.samples()) quad += v * v;
    quad *= g.length() / static_cast<double>(g.size());
    double spec = 0.0;
    for (const Complex& c : f.coefficients()) spec += std::norm(c);
    spec *= g.length();
    CHECK(std::abs(quad - spec) <= 1e-10 * std::abs(quad));
  }
}

TEST_CASE("property: derivative is a derivation over products") {
  const Grid g(16.0 * kPi, 256);
  const double cut = g.nyquist() / 2.0 - g.dxi();
  for (unsigned seed : {11u, 12u}) {
    const SpectralField f = random_real_field(g, seed, cut);
    const SpectralField h = random_real_field(g, 100 + seed, cut);
    const SpectralField lhs = derivative(product(f, h), 1);
    const SpectralField rhs = product(derivative(f, 1), h) + product(f, derivative(h, 1));
    const double scale = sobolev_norm(lhs, 0.0);
    CHECK(sobolev_norm(lhs - rhs, 0.0) <= 1e-10 * scale);
  }
}

TEST_CASE("property: sobolev norm is monotone in s") {
  const Grid g(16.0 * kPi, 256);
  const SpectralField f = random_real_field(g, 21, g.nyquist() - g.dxi());
  double prev = sobolev_norm(f, -2.0);
  for (double s : {-1.5, -1.0, -0.25, 0.0, 0.5, 1.0}) {
    const double cur = sobolev_norm(f, s);
    CHECK(cur >= prev * (1.0 - 1e-12));
    prev = cur;
  }
}

TEST_CASE("property: constructed fields are real and even") {
  const Grid g(128.0 * kPi, 8192);
  for (const SpectralField& f :
       {make_h_band(g, 8.0, 0.5), make_theta(g), make_alpha(g, 8.0)}) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(std::abs(f.coefficients()[j].imag()) < 1e-15);
      CHECK(std::abs(f.coefficients()[j] - f.coefficients()[g.index_of(-g.wavenumber(j))]) <
            1e-15);
    }
  }
}
