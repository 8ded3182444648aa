#include "ostrovsky/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "ostrovsky/transform.hpp"

namespace ostrovsky {

namespace {
void require_finite(Complex z, int n) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::invalid_argument("SpectralState: non-finite amplitude at mode " +
                                std::to_string(n));
  }
}
}  // namespace

SpectralState::SpectralState(int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("SpectralState: cutoff must be >= 1");
  modes_.assign(static_cast<std::size_t>(cutoff), Complex{});
}

SpectralState::SpectralState(std::vector<Complex> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw std::invalid_argument("SpectralState: cutoff must be >= 1");
  for (std::size_t k = 0; k < modes_.size(); ++k) require_finite(modes_[k], static_cast<int>(k) + 1);
}

Complex SpectralState::operator[](int n) const {
  const int N = cutoff();
  if (n == 0 || n > N || n < -N) return {};
  return n > 0 ? modes_[static_cast<std::size_t>(n - 1)]
               : std::conj(modes_[static_cast<std::size_t>(-n - 1)]);
}

void SpectralState::set_mode(int n, Complex value) {
  if (n < 1 || n > cutoff()) {
    throw std::out_of_range("SpectralState::set_mode: mode " + std::to_string(n) +
                            " outside 1.." + std::to_string(cutoff()));
  }
  require_finite(value, n);
  modes_[static_cast<std::size_t>(n - 1)] = value;
}

double dispersion(int n) {
  if (n == 0) throw std::domain_error("dispersion: m(0) is undefined");
  const double x = n;
  return x * x * x - 1.0 / x;
}

DispersionTable::DispersionTable(int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("DispersionTable: cutoff must be >= 1");
  values_.resize(static_cast<std::size_t>(cutoff));
  for (int n = 1; n <= cutoff; ++n) values_[static_cast<std::size_t>(n - 1)] = dispersion(n);
}

double DispersionTable::operator()(int n) const {
  if (n == 0) throw std::domain_error("DispersionTable: m(0) is undefined");
  if (n > cutoff() || -n > cutoff()) throw std::out_of_range("DispersionTable: mode outside table");
  return n > 0 ? values_[static_cast<std::size_t>(n - 1)] : -values_[static_cast<std::size_t>(-n - 1)];
}

SpectralState project(const SpectralState& state, int m) {
  if (m < 1) throw std::invalid_argument("project: cutoff must be >= 1");
  SpectralState out = state;
  for (int n = m + 1; n <= state.cutoff(); ++n) out.set_mode(n, {});
  return out;
}

double mode_energy(const SpectralState& state) {
  double sum = 0.0;
  for (const Complex& a : state.modes()) sum += std::norm(a);
  return sum;
}

double l2_norm(const SpectralState& state) {
  return std::sqrt(4.0 * std::numbers::pi * mode_energy(state));
}

double cubic_integral(const SpectralState& state) {
  const int N = state.cutoff();
  auto& fft = detail::thread_fft(fft_friendly_size(3 * N + 1));
  auto spec = fft.spectrum();
  std::fill(spec.begin(), spec.end(), Complex{});
  for (int n = 1; n <= N; ++n) spec[static_cast<std::size_t>(n)] = state[n];
  fft.backward();
  double sum = 0.0;
  for (double u : fft.real()) sum += u * u * u;
  return 2.0 * std::numbers::pi * sum / fft.size();
}

EnergyParts energy_parts(const SpectralState& state) {
  EnergyParts parts;
  const auto modes = state.modes();
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double n2 = static_cast<double>(k + 1) * static_cast<double>(k + 1);
    const double e = std::norm(modes[k]);
    parts.dispersive += n2 * e;
    parts.nonlocal += e / n2;
  }
  // Each sum over n >= 1 stands for the pair (n, -n) and integral = 2 pi sum.
  parts.dispersive *= 2.0 * std::numbers::pi;
  parts.nonlocal *= 2.0 * std::numbers::pi;
  parts.cubic = cubic_integral(state);
  return parts;
}

double hamiltonian(const SpectralState& state) {
  const EnergyParts p = energy_parts(state);
  return p.dispersive + p.nonlocal - p.cubic / 6.0;
}

double flow_energy(const SpectralState& state) {
  const EnergyParts p = energy_parts(state);
  return p.dispersive - p.nonlocal + p.cubic / 6.0;
}

}  // namespace ostrovsky
