#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <utility>

namespace kdvlab {

/// Thread-local cache of FFTW plans, one per (size, kind). Plan creation is
/// serialized through a global mutex (the FFTW planner is not thread-safe);
/// execution is lock-free. Plans are created with FFTW_ESTIMATE so that the
/// chosen algorithm, and therefore the rounding of results, depends only on
/// the transform size. All transforms are unnormalized.
class FftEngine {
 public:
  static FftEngine& local() {
    thread_local FftEngine engine;
    return engine;
  }

  /// out_k = sum_j in_j e^{-2 pi i j k / n} (FFTW_FORWARD).
  void forward(std::size_t n, const std::complex<double>* in, std::complex<double>* out) {
    execute_c2c(n, FFTW_FORWARD, in, out);
  }
  /// out_j = sum_k in_k e^{+2 pi i j k / n} (FFTW_BACKWARD).
  void backward(std::size_t n, const std::complex<double>* in, std::complex<double>* out) {
    execute_c2c(n, FFTW_BACKWARD, in, out);
  }

  /// Real-to-halfcomplex: out has n/2+1 entries, out_k = sum_j in_j e^{-2 pi i j k / n}.
  void r2c(std::size_t n, const double* in, std::complex<double>* out) {
    Plan& p = plan(n, kR2c);
    auto* pin = static_cast<double*>(p.in);
    auto* pout = static_cast<fftw_complex*>(p.out);
    for (std::size_t j = 0; j < n; ++j) pin[j] = in[j];
    fftw_execute(p.plan);
    auto* o = reinterpret_cast<std::complex<double>*>(pout);
    for (std::size_t k = 0; k <= n / 2; ++k) out[k] = o[k];
  }

  /// Halfcomplex-to-real inverse of r2c (unnormalized): in has n/2+1 entries.
  void c2r(std::size_t n, const std::complex<double>* in, double* out) {
    Plan& p = plan(n, kC2r);
    auto* pin = reinterpret_cast<std::complex<double>*>(p.in);
    auto* pout = static_cast<double*>(p.out);
    for (std::size_t k = 0; k <= n / 2; ++k) pin[k] = in[k];
    fftw_execute(p.plan);
    for (std::size_t j = 0; j < n; ++j) out[j] = pout[j];
  }

  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  ~FftEngine() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.plan);
      fftw_free(p.in);
      fftw_free(p.out);
    }
  }

 private:
  FftEngine() = default;

  enum Kind : int { kFwd = 0, kBwd = 1, kR2c = 2, kC2r = 3 };

  struct Plan {
    fftw_plan plan = nullptr;
    void* in = nullptr;
    void* out = nullptr;
  };

  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  Plan& plan(std::size_t n, Kind kind) {
    auto key = std::make_pair(n, static_cast<int>(kind));
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::lock_guard<std::mutex> lock(planner_mutex());
    Plan p;
    switch (kind) {
      case kFwd:
      case kBwd:
        p.in = fftw_malloc(sizeof(fftw_complex) * n);
        p.out = fftw_malloc(sizeof(fftw_complex) * n);
        p.plan = fftw_plan_dft_1d(static_cast<int>(n), static_cast<fftw_complex*>(p.in),
                                  static_cast<fftw_complex*>(p.out),
                                  kind == kFwd ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
      case kR2c:
        p.in = fftw_malloc(sizeof(double) * n);
        p.out = fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1));
        p.plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), static_cast<double*>(p.in),
                                      static_cast<fftw_complex*>(p.out), FFTW_ESTIMATE);
        break;
      case kC2r:
        p.in = fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1));
        p.out = fftw_malloc(sizeof(double) * n);
        p.plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), static_cast<fftw_complex*>(p.in),
                                      static_cast<double*>(p.out), FFTW_ESTIMATE);
        break;
    }
    return plans_.emplace(key, p).first->second;
  }

  void execute_c2c(std::size_t n, int sign, const std::complex<double>* in,
                   std::complex<double>* out) {
    Plan& p = plan(n, sign == FFTW_FORWARD ? kFwd : kBwd);
    auto* pin = reinterpret_cast<std::complex<double>*>(p.in);
    auto* pout = reinterpret_cast<std::complex<double>*>(p.out);
    for (std::size_t j = 0; j < n; ++j) pin[j] = in[j];
    fftw_execute(p.plan);
    for (std::size_t j = 0; j < n; ++j) out[j] = pout[j];
  }

  std::map<std::pair<std::size_t, int>, Plan> plans_;
};

}  // namespace kdvlab
