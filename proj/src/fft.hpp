#pragma once

// Thin RAII wrapper over FFTW's 1-D real transforms. Plans are created once
// per (thread, size) and executed with the new-array interface, which FFTW
// documents as thread safe. Plan creation itself is serialized.

#include <fftw3.h>

#include <complex>
#include <span>

namespace ostrovsky::detail {

class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }

  /// Buffers owned by the plan, aligned as FFTW expects.
  std::span<double> real() { return {real_, static_cast<std::size_t>(size_)}; }
  std::span<std::complex<double>> spectrum() {
    return {reinterpret_cast<std::complex<double>*>(spec_),
            static_cast<std::size_t>(size_ / 2 + 1)};
  }

  /// real -> spectrum, unnormalized: X_k = sum_j x_j exp(-2 pi i jk / L).
  void forward();
  /// spectrum -> real, unnormalized: x_j = sum_k X_k exp(2 pi i jk / L).
  void backward();

 private:
  int size_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Per-thread cached transform of the given length.
RealFft& thread_fft(int size);

}  // namespace ostrovsky::detail
