#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace fracsob {

using cplx = std::complex<double>;

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n1, int n2, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::tuple{n1, n2, sign};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(static_cast<std::size_t>(n1) * n2);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(n2, n1, buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

}  // namespace detail

// In-place 2D transform of an n2-by-n1 row-major array (axis 1 fastest).
inline void fft2(std::vector<cplx>& data, int n1, int n2, bool inverse) {
  fftw_plan plan =
      detail::PlanCache::instance().get(n1, n2, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

// Signed integer frequency of index i on an axis with n samples; the
// Nyquist index n/2 maps to -n/2.
inline int signed_freq(int i, int n) { return i < n / 2 ? i : i - n; }

}  // namespace fracsob
