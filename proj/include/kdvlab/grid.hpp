#pragma once

#include <cstddef>
#include <numbers>
#include <string>

#include "kdvlab/errors.hpp"

namespace kdvlab {

/// Periodic computational domain [-L/2, L/2) with n equispaced collocation
/// points and the frequency lattice xi_k = 2*pi*k/L, k = -n/2 .. n/2-1.
///
/// The torus stands in for the real line: constructions choose L large enough
/// that their target functions have decayed at |x| = L/2, and n large enough
/// that every populated frequency sits well under the Nyquist frequency
/// pi*n/L.
class Grid {
 public:
  Grid(double length, std::size_t num_points) : length_(length), n_(num_points) {
    if (!(length > 0.0)) throw InvalidArgument("Grid: length must be positive");
    if (num_points < 16) throw InvalidArgument("Grid: need at least 16 points");
    if (num_points % 2 != 0) throw InvalidArgument("Grid: num_points must be even");
  }

  double length() const { return length_; }
  std::size_t size() const { return n_; }

  double dx() const { return length_ / static_cast<double>(n_); }
  /// Frequency spacing 2*pi/L.
  double dxi() const { return 2.0 * std::numbers::pi / length_; }
  /// Nyquist frequency pi*n/L = dxi * n/2.
  double nyquist() const { return std::numbers::pi * static_cast<double>(n_) / length_; }

  /// Collocation point x_j = -L/2 + j*L/n.
  double x(std::size_t j) const { return -0.5 * length_ + static_cast<double>(j) * dx(); }

  /// Signed integer wavenumber for storage index j (FFT ordering:
  /// 0, 1, ..., n/2-1, -n/2, ..., -1).
  long wavenumber(std::size_t j) const {
    return j < n_ / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_);
  }
  /// Frequency xi_k = 2*pi*k/L at storage index j.
  double xi(std::size_t j) const { return dxi() * static_cast<double>(wavenumber(j)); }

  /// Storage index of the signed wavenumber k in [-n/2, n/2).
  std::size_t index_of(long k) const {
    return k >= 0 ? static_cast<std::size_t>(k)
                  : n_ - static_cast<std::size_t>(-k);
  }

  bool operator==(const Grid& other) const {
    return length_ == other.length_ && n_ == other.n_;
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  double length_;
  std::size_t n_;
};

inline Grid make_grid(double length, std::size_t num_points) {
  return Grid(length, num_points);
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

}  // namespace kdvlab
