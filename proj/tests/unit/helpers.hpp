#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "ostrovsky/spectral.hpp"

namespace ostrovsky::test {

/// Random state with amplitudes of order `scale`, independent of the sampler
/// under test.
inline SpectralState random_state(int N, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  SpectralState s(N);
  for (int n = 1; n <= N; ++n) s.set_mode(n, {u(rng), u(rng)});
  return s;
}

/// u(x) = sum_{0<|n|<=N} a_n e^{inx}, evaluated directly.
inline double field_at(const SpectralState& s, double x) {
  double v = 0.0;
  for (int n = 1; n <= s.cutoff(); ++n) v += 2.0 * std::real(s[n] * std::polar(1.0, n * x));
  return v;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ostrovsky_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ostrovsky::test
