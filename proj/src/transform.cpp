#include "ostrovsky/transform.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace ostrovsky {

namespace {
constexpr Complex kI{0.0, 1.0};
}

int fft_friendly_size(int min_size) {
  if (min_size < 2) min_size = 2;
  for (int L = min_size + (min_size % 2);; L += 2) {
    int r = L;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return L;
  }
}

int dealiased_size(int cutoff) { return fft_friendly_size(2 * (2 * cutoff + 1)); }

std::vector<double> to_physical(const SpectralState& state, int gridpoints) {
  const int N = state.cutoff();
  if (gridpoints < 2 * N + 2) {
    throw std::invalid_argument("to_physical: " + std::to_string(gridpoints) +
                                " grid points alias cutoff " + std::to_string(N) +
                                " (need >= " + std::to_string(2 * N + 2) + ")");
  }
  auto& fft = detail::thread_fft(gridpoints);
  auto spec = fft.spectrum();
  std::fill(spec.begin(), spec.end(), Complex{});
  for (int n = 1; n <= N; ++n) spec[static_cast<std::size_t>(n)] = state[n];
  fft.backward();
  const auto real = fft.real();
  return {real.begin(), real.end()};
}

SpectralState from_physical(std::span<const double> samples, int cutoff) {
  const int M = static_cast<int>(samples.size());
  if (cutoff < 1) throw std::invalid_argument("from_physical: cutoff must be >= 1");
  if (M < 2 * cutoff + 2) {
    throw std::invalid_argument("from_physical: " + std::to_string(M) +
                                " samples cannot resolve cutoff " + std::to_string(cutoff));
  }
  auto& fft = detail::thread_fft(M);
  std::copy(samples.begin(), samples.end(), fft.real().begin());
  fft.forward();
  const auto spec = fft.spectrum();
  std::vector<Complex> modes(static_cast<std::size_t>(cutoff));
  for (int n = 1; n <= cutoff; ++n) modes[static_cast<std::size_t>(n - 1)] = spec[static_cast<std::size_t>(n)] / double(M);
  return SpectralState(std::move(modes));
}

namespace detail {

void nonlinear_term_into(std::span<const Complex> modes, std::span<Complex> out) {
  const int N = static_cast<int>(modes.size());
  auto& fft = thread_fft(dealiased_size(N));
  const int L = fft.size();
  auto spec = fft.spectrum();
  std::fill(spec.begin(), spec.end(), Complex{});
  std::copy(modes.begin(), modes.end(), spec.begin() + 1);
  fft.backward();
  for (double& u : fft.real()) u *= u;
  fft.forward();
  // (u u_x)^(n) = (i n / 2) (u^2)^(n); mode 0 is never written.
  const double scale = 0.5 / L;
  for (int n = 1; n <= N; ++n) {
    out[static_cast<std::size_t>(n - 1)] = -kI * (scale * n) * spec[static_cast<std::size_t>(n)];
  }
}

}  // namespace detail

SpectralState nonlinear_term(const SpectralState& state) {
  std::vector<Complex> out(static_cast<std::size_t>(state.cutoff()));
  detail::nonlinear_term_into(state.modes(), out);
  return SpectralState(std::move(out));
}

SpectralState convolution_direct(const SpectralState& state, int max_cutoff) {
  const int N = state.cutoff();
  if (N > max_cutoff) {
    throw std::invalid_argument("convolution_direct: cutoff " + std::to_string(N) +
                                " exceeds bound " + std::to_string(max_cutoff));
  }
  std::vector<Complex> out(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) {
    Complex sum{};
    for (int n1 = n - N; n1 <= N; ++n1) {
      const int n2 = n - n1;
      if (n1 == 0 || n2 == 0) continue;
      sum += state[n1] * state[n2];
    }
    out[static_cast<std::size_t>(n - 1)] = -kI * (0.5 * n) * sum;
  }
  return SpectralState(std::move(out));
}

}  // namespace ostrovsky
