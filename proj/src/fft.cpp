#include "fft.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <stdexcept>

namespace ostrovsky::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(int size) : size_(size) {
  if (size < 2) throw std::invalid_argument("RealFft: size must be >= 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(static_cast<std::size_t>(size));
  spec_ = fftw_alloc_complex(static_cast<std::size_t>(size / 2 + 1));
  if (real_ == nullptr || spec_ == nullptr) {
    fftw_free(real_);
    fftw_free(spec_);
    throw std::bad_alloc();
  }
  // FFTW_ESTIMATE never times candidate plans, so the chosen algorithm (and
  // therefore every rounding) is the same on every thread and every run.
  forward_ = fftw_plan_dft_r2c_1d(size, real_, spec_, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r_1d(size, spec_, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(backward_);
  fftw_destroy_plan(forward_);
  fftw_free(spec_);
  fftw_free(real_);
}

void RealFft::forward() { fftw_execute_dft_r2c(forward_, real_, spec_); }

void RealFft::backward() { fftw_execute_dft_c2r(backward_, spec_, real_); }

RealFft& thread_fft(int size) {
  thread_local std::map<int, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<RealFft>(size);
  return *slot;
}

}  // namespace ostrovsky::detail
