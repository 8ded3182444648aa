#include "ostrovsky/norms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ostrovsky {

double japanese_bracket(double n) { return std::sqrt(1.0 + n * n); }

double sobolev_norm(std::span<const Complex> spectrum, double s) {
  double sum = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    sum += 2.0 * std::pow(1.0 + n * n, s) * std::norm(spectrum[k]);
  }
  return std::sqrt(2.0 * std::numbers::pi * sum);
}

double sobolev_norm(const SpectralState& state, double s) { return sobolev_norm(state.modes(), s); }

int dyadic_block(int n) {
  if (n < 1) throw std::domain_error("dyadic_block: n must be >= 1");
  return std::bit_width(static_cast<unsigned>(n)) - 1;
}

double DyadicProfile::sup() const {
  return block_norms.empty() ? 0.0 : *std::max_element(block_norms.begin(), block_norms.end());
}

double DyadicProfile::sum() const {
  return std::accumulate(block_norms.begin(), block_norms.end(), 0.0);
}

DyadicProfile dyadic_profile(std::span<const Complex> spectrum, double s, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("dyadic_profile: p must be > 1");
  DyadicProfile profile{s, p, {}};
  const int N = static_cast<int>(spectrum.size());
  if (N == 0) return profile;
  std::vector<double> powered(static_cast<std::size_t>(dyadic_block(N) + 1), 0.0);
  const double sp = s * p;
  for (int n = 1; n <= N; ++n) {
    const double weight = std::pow(1.0 + double(n) * n, 0.5 * sp);
    powered[static_cast<std::size_t>(dyadic_block(n))] +=
        2.0 * weight * std::pow(std::abs(spectrum[static_cast<std::size_t>(n - 1)]), p);
  }
  profile.block_norms.reserve(powered.size());
  for (double b : powered) profile.block_norms.push_back(std::pow(b, 1.0 / p));
  return profile;
}

double besov_sup(std::span<const Complex> spectrum, double s, double p) {
  return dyadic_profile(spectrum, s, p).sup();
}
double besov_sup(const SpectralState& state, double s, double p) {
  return besov_sup(state.modes(), s, p);
}

double besov_l1(std::span<const Complex> spectrum, double s, double p) {
  return dyadic_profile(spectrum, s, p).sum();
}
double besov_l1(const SpectralState& state, double s, double p) {
  return besov_l1(state.modes(), s, p);
}

}  // namespace ostrovsky
