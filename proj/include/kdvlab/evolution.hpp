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

enum class Equation {
  kKdV,   // v_t + v_xxx - 6 v v_x = 0
  kMKdV,  // u_t + u_xxx - 6 u^2 u_x = 0 (defocusing)
};

inline const char* equation_name(Equation eq) { return eq == Equation::kKdV ? "kdv" : "mkdv"; }

/// Diagonal multiplier e^{i xi_k^3 t}, the exact solution operator of the
/// linear flow u_t + u_xxx = 0 under the fixed convention. Unit modulus per
/// mode; a band packet at frequency xi travels at group velocity -3 xi^2.
inline std::vector<Complex> linear_propagator(const Grid& grid, double t) {
  std::vector<Complex> mult(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double xi = grid.xi(j);
    mult[j] = std::polar(1.0, xi * xi * xi * t);
  }
  return mult;
}

inline SpectralField propagate_linear(const SpectralField& f, double t) {
  const std::vector<Complex> mult = linear_propagator(f.grid(), t);
  std::vector<Complex> c = f.coefficients();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= mult[j];
  return SpectralField::from_coefficients(f.grid(), std::move(c));
}

namespace etd {

// Stage weight functions of the fourth-order exponential scheme, as functions
// of z = lambda*dt. Near z = 0 the closed forms cancel catastrophically, so
// below |z| = 0.1 they are evaluated by truncated Taylor series; the crossover
// is validated against high-precision references in the tests.
inline constexpr double kSeriesThreshold = 0.1;
inline constexpr int kSeriesTerms = 18;

inline Complex series_eval(Complex z, const double* coef, int count) {
  Complex acc(0.0, 0.0), p(1.0, 0.0);
  for (int m = 0; m < count; ++m) {
    acc += coef[m] * p;
    p *= z;
  }
  return acc;
}

struct SeriesTables {
  double g1[kSeriesTerms];  // (e^{z/2}-1)/z
  double a[kSeriesTerms];   // (-4 - z + e^z(4 - 3z + z^2))/z^3
  double b[kSeriesTerms];   // (2 + z + e^z(z - 2))/z^3
  double c[kSeriesTerms];   // (-4 - 3z - z^2 + e^z(4 - z))/z^3
  SeriesTables() {
    double fact[kSeriesTerms + 3];
    fact[0] = 1.0;
    for (int m = 1; m < kSeriesTerms + 3; ++m) fact[m] = fact[m - 1] * m;
    double half_pow = 0.5;
    for (int m = 0; m < kSeriesTerms; ++m) {
      g1[m] = half_pow / fact[m + 1];
      half_pow *= 0.5;
      const int q = m + 3;
      a[m] = 4.0 / fact[q] - 3.0 / fact[q - 1] + 1.0 / fact[q - 2];
      b[m] = 1.0 / fact[q - 1] - 2.0 / fact[q];
      c[m] = 4.0 / fact[q] - 1.0 / fact[q - 1];
    }
  }
};

inline const SeriesTables& tables() {
  static const SeriesTables t;
  return t;
}

inline Complex phi_g1(Complex z) {
  if (std::abs(z) < kSeriesThreshold) return series_eval(z, tables().g1, kSeriesTerms);
  return (std::exp(0.5 * z) - 1.0) / z;
}
inline Complex phi_a(Complex z) {
  if (std::abs(z) < kSeriesThreshold) return series_eval(z, tables().a, kSeriesTerms);
  const Complex z3 = z * z * z;
  return (-4.0 - z + std::exp(z) * (4.0 - 3.0 * z + z * z)) / z3;
}
inline Complex phi_b(Complex z) {
  if (std::abs(z) < kSeriesThreshold) return series_eval(z, tables().b, kSeriesTerms);
  const Complex z3 = z * z * z;
  return (2.0 + z + std::exp(z) * (z - 2.0)) / z3;
}
inline Complex phi_c(Complex z) {
  if (std::abs(z) < kSeriesThreshold) return series_eval(z, tables().c, kSeriesTerms);
  const Complex z3 = z * z * z;
  return (-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) / z3;
}

}  // namespace etd

struct IntegratorStats {
  long steps_taken = 0;
  int retries = 0;       // drift-guard reruns
  double dt_used = 0.0;  // dt of the accepted run
  int scheme_order = 4;
  double l2_drift = 0.0;  // max relative drift of the accepted run
};

struct Trajectory {
  Equation equation = Equation::kMKdV;
  Grid grid{2.0 * std::numbers::pi, 16};
  std::vector<double> times;                    // strictly increasing
  std::vector<std::vector<Complex>> snapshots;  // full coefficient vectors
  IntegratorStats stats;

  std::size_t size() const { return times.size(); }
  SpectralField field(std::size_t i) const {
    return SpectralField::from_coefficients(grid, snapshots[i]);
  }
  /// Index of the snapshot closest to time t; throws if off by more than tol.
  std::size_t index_at(double t, double tol = 1e-9) const {
    std::size_t best = 0;
    double dist = std::abs(times[0] - t);
    for (std::size_t i = 1; i < times.size(); ++i)
      if (std::abs(times[i] - t) < dist) dist = std::abs(times[i] - t), best = i;
    if (dist > tol) throw InvalidArgument("Trajectory: no snapshot at t = " + std::to_string(t));
    return best;
  }
};

struct EvolutionProblem {
  Equation equation = Equation::kMKdV;
  Grid grid{2.0 * std::numbers::pi, 16};
  SpectralField initial = SpectralField::zero(grid);
  double dt = 1e-4;              // negative dt integrates backward in time
  double t_end = 0.1;            // same sign as dt
  double snapshot_stride = 0.0;  // 0: snapshot every step
  std::size_t padding = 2;
  double drift_guard = 1e-6;  // max relative L2 drift before dt halving
  int max_retries = 3;
};

namespace detail {

/// One ETDRK4 run at fixed dt, half-spectrum state, zero-padded power
/// evaluation for the flux-form nonlinearity 3(v^2)_x resp. 2(u^3)_x.
class Etdrk4Runner {
 public:
  Etdrk4Runner(const EvolutionProblem& p, double dt)
      : p_(p),
        dt_(dt),
        n_(p.grid.size()),
        m_(p.padding * p.grid.size()),
        nh_(n_ / 2 + 1),
        mh_(m_ / 2 + 1) {
    const unsigned degree = p.equation == Equation::kKdV ? 2 : 3;
    const double flux_coef = p.equation == Equation::kKdV ? 3.0 : 2.0;
    degree_ = degree;
    E_.resize(nh_), E2_.resize(nh_), Q_.resize(nh_);
    f1_.resize(nh_), f2_.resize(nh_), f3_.resize(nh_), flux_.resize(nh_);
    for (std::size_t k = 0; k < nh_; ++k) {
      const double xi = p.grid.dxi() * static_cast<double>(k);
      const Complex z = Complex(0.0, xi * xi * xi) * dt_;
      E_[k] = std::exp(z);
      E2_[k] = std::exp(0.5 * z);
      Q_[k] = dt_ * etd::phi_g1(z);
      f1_[k] = dt_ * etd::phi_a(z);
      f2_[k] = dt_ * etd::phi_b(z);
      f3_[k] = dt_ * etd::phi_c(z);
      flux_[k] = Complex(0.0, flux_coef * xi);
    }
    u_.resize(nh_), a_.resize(nh_), b_.resize(nh_), c_.resize(nh_);
    nu_.resize(nh_), na_.resize(nh_), nb_.resize(nh_), nc_.resize(nh_);
    big_.resize(mh_);
    sreal_.resize(m_);
  }

  Trajectory run() {
    // raw half-spectrum state: d_k = (-1)^k c_k, k = 0..n/2
    const std::vector<Complex>& c0 = p_.initial.coefficients();
    for (std::size_t k = 0; k < nh_; ++k) u_[k] = (k % 2 == 0 ? c0[k] : -c0[k]);
    u_[nh_ - 1] = Complex(0.0, 0.0);

    const long total_steps = std::llround(p_.t_end / dt_);
    const long snap_steps =
        p_.snapshot_stride > 0.0 ? std::llround(p_.snapshot_stride / std::abs(dt_)) : 1;

    Trajectory traj;
    traj.equation = p_.equation;
    traj.grid = p_.grid;
    emit(traj, 0.0);
    for (long step = 1; step <= total_steps; ++step) {
      advance();
      if (step % snap_steps == 0 || step == total_steps) {
        emit(traj, static_cast<double>(step) * dt_);
        if (!std::isfinite(std::norm(u_[0]) + std::norm(u_[nh_ / 2])) || !finite_state())
          throw IntegrationError(std::string("integrate: non-finite state at t = ") +
                                 std::to_string(static_cast<double>(step) * dt_) + " (" +
                                 equation_name(p_.equation) + ", dt = " + std::to_string(dt_) + ")");
      }
    }
    if (dt_ < 0.0) {  // keep times strictly increasing
      std::reverse(traj.times.begin(), traj.times.end());
      std::reverse(traj.snapshots.begin(), traj.snapshots.end());
    }
    traj.stats.steps_taken = total_steps;
    traj.stats.dt_used = dt_;
    return traj;
  }

 private:
  void advance() {
    nonlinear(u_, nu_);
    for (std::size_t k = 0; k < nh_; ++k) a_[k] = E2_[k] * u_[k] + Q_[k] * nu_[k];
    nonlinear(a_, na_);
    for (std::size_t k = 0; k < nh_; ++k) b_[k] = E2_[k] * u_[k] + Q_[k] * na_[k];
    nonlinear(b_, nb_);
    for (std::size_t k = 0; k < nh_; ++k)
      c_[k] = E2_[k] * a_[k] + Q_[k] * (2.0 * nb_[k] - nu_[k]);
    nonlinear(c_, nc_);
    for (std::size_t k = 0; k < nh_; ++k)
      u_[k] = E_[k] * u_[k] + f1_[k] * nu_[k] + 2.0 * f2_[k] * (na_[k] + nb_[k]) + f3_[k] * nc_[k];
  }

  void nonlinear(const std::vector<Complex>& d, std::vector<Complex>& out) {
    for (std::size_t k = 0; k < nh_ - 1; ++k) big_[k] = d[k];
    for (std::size_t k = nh_ - 1; k < mh_; ++k) big_[k] = Complex(0.0, 0.0);
    FftEngine::local().c2r(m_, big_.data(), sreal_.data());
    if (degree_ == 2)
      for (double& s : sreal_) s *= s;
    else
      for (double& s : sreal_) s = s * s * s;
    FftEngine::local().r2c(m_, sreal_.data(), big_.data());
    const double inv_m = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < nh_; ++k) out[k] = flux_[k] * (big_[k] * inv_m);
    out[nh_ - 1] = Complex(0.0, 0.0);
  }

  void emit(Trajectory& traj, double t) {
    std::vector<Complex> full(n_);
    for (std::size_t k = 0; k < nh_ - 1; ++k) {
      const Complex ck = (k % 2 == 0 ? u_[k] : -u_[k]);
      full[k] = ck;
      if (k > 0) full[n_ - k] = std::conj(ck);
    }
    full[0] = Complex(full[0].real(), 0.0);
    full[n_ / 2] = Complex(0.0, 0.0);
    traj.times.push_back(t);
    traj.snapshots.push_back(std::move(full));
  }

  bool finite_state() const {
    for (const Complex& v : u_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  const EvolutionProblem& p_;
  double dt_;
  std::size_t n_, m_, nh_, mh_;
  unsigned degree_;
  std::vector<Complex> E_, E2_, Q_, f1_, f2_, f3_, flux_;
  std::vector<Complex> u_, a_, b_, c_, nu_, na_, nb_, nc_, big_;
  std::vector<double> sreal_;
};

}  // namespace detail

/// Max relative L2 drift over the trajectory snapshots.
inline double l2_drift(const Trajectory& traj, double l2_initial) {
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    double acc = 0.0;
    for (const Complex& c : traj.snapshots[i]) acc += std::norm(c);
    worst = std::max(worst, std::abs(std::sqrt(traj.grid.length() * acc) - l2_initial));
  }
  return l2_initial > 0.0 ? worst / l2_initial : worst;
}

/// Fourth-order exponential integrator for both flows: the stiff linear phase
/// is applied exactly through the Airy multiplier, the nonlinearity enters in
/// flux form through the fourth-order stage weights. If the relative L2 drift
/// of a run exceeds the guard, dt is halved and the run repeated, up to
/// max_retries times.
inline Trajectory integrate(const EvolutionProblem& problem) {
  if (problem.dt == 0.0) throw InvalidArgument("integrate: dt must be nonzero");
  if (problem.t_end * problem.dt <= 0.0)
    throw InvalidArgument("integrate: t_end and dt must have the same sign");
  require_same_grid(problem.grid, problem.initial.grid(), "integrate");
  const double steps = problem.t_end / problem.dt;
  if (std::abs(steps - std::round(steps)) > 1e-6)
    throw InvalidArgument("integrate: t_end must be an integer multiple of dt");
  if (problem.snapshot_stride > 0.0) {
    const double per = problem.snapshot_stride / std::abs(problem.dt);
    if (std::abs(per - std::round(per)) > 1e-6 || per < 0.5)
      throw InvalidArgument("integrate: snapshot stride must be a positive multiple of dt");
  }
  if (problem.padding < 2) throw InvalidArgument("integrate: padding factor must be >= 2");
  const double alias_need =
      (problem.equation == Equation::kKdV ? 2.0 : 3.0) * problem.initial.max_populated_frequency();
  if (alias_need >= static_cast<double>(problem.padding) * problem.grid.nyquist())
    throw AliasingError("integrate: initial data too wide for the padded nonlinearity");

  const double l2_0 = l2_norm(problem.initial);
  EvolutionProblem attempt = problem;
  for (int retry = 0;; ++retry) {
    detail::Etdrk4Runner runner(attempt, attempt.dt);
    Trajectory traj = runner.run();
    traj.stats.retries = retry;
    traj.stats.l2_drift = l2_drift(traj, l2_0);
    if (traj.stats.l2_drift <= problem.drift_guard || l2_0 == 0.0) return traj;
    if (retry >= problem.max_retries)
      throw IntegrationError("integrate: L2 drift " + std::to_string(traj.stats.l2_drift) +
                             " above guard after " + std::to_string(retry) + " dt halvings");
    attempt.dt *= 0.5;
  }
}

/// Exact linear trajectory (Airy flow) at the given times; the reference for
/// small-amplitude checks and the closed-form window functionals.
inline Trajectory linear_trajectory(const SpectralField& u0, const std::vector<double>& times,
                                    Equation eq = Equation::kMKdV) {
  Trajectory traj;
  traj.equation = eq;
  traj.grid = u0.grid();
  for (double t : times) {
    const std::vector<Complex> mult = linear_propagator(u0.grid(), t);
    std::vector<Complex> c = u0.coefficients();
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= mult[j];
    traj.times.push_back(t);
    traj.snapshots.push_back(std::move(c));
  }
  traj.stats.scheme_order = 0;
  return traj;
}

/// Merge a backward trajectory (times <= 0) and a forward one (times >= 0)
/// into one time-increasing trajectory, dropping the duplicate t = 0.
inline Trajectory merge_trajectories(const Trajectory& backward, const Trajectory& forward) {
  require_same_grid(backward.grid, forward.grid, "merge_trajectories");
  Trajectory out = backward;
  for (std::size_t i = 0; i < forward.size(); ++i) {
    if (!out.times.empty() && std::abs(forward.times[i] - out.times.back()) < 1e-12) continue;
    out.times.push_back(forward.times[i]);
    out.snapshots.push_back(forward.snapshots[i]);
  }
  return out;
}

struct ConservationReport {
  std::vector<double> times;
  std::vector<double> mean;    // int u dx
  std::vector<double> l2;      // torus L2 norm
  std::vector<double> energy;  // int(u_x^2/2 + u^4/2) for mkdv, int(v_x^2/2 + v^3) for kdv
  double max_rel_drift_mean = 0.0;
  double max_rel_drift_l2 = 0.0;
  double max_rel_drift_energy = 0.0;
};

inline ConservationReport conservation_report(const Trajectory& traj) {
  if (traj.size() == 0) throw InvalidArgument("conservation_report: empty trajectory");
  ConservationReport rep;
  rep.times = traj.times;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const SpectralField u = traj.field(i);
    rep.mean.push_back(traj.grid.length() * u.coefficients()[0].real());
    rep.l2.push_back(l2_norm(u));
    const SpectralField ux = derivative(u, 1);
    const double kinetic = 0.5 * moment(ux, 2, 2);
    const double potential = traj.equation == Equation::kKdV ? moment(u, 3, 2)
                                                             : 0.5 * moment(u, 4, 2);
    rep.energy.push_back(kinetic + potential);
  }
  auto drift = [](const std::vector<double>& q, double floor) {
    double worst = 0.0;
    for (double v : q) worst = std::max(worst, std::abs(v - q.front()));
    return worst / std::max(std::abs(q.front()), floor);
  };
  rep.max_rel_drift_mean = drift(rep.mean, 1.0);
  rep.max_rel_drift_l2 = drift(rep.l2, 1e-30);
  rep.max_rel_drift_energy = drift(rep.energy, 1e-30);
  return rep;
}

}  // namespace kdvlab
