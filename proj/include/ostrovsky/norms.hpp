#pragma once

// Norms on truncated spectra. A spectrum is given by its modes n = 1..N
// (index k holds f_hat(k+1)); the conjugate partner at -n has the same
// modulus, so every sum over 0 < |n| <= N counts each stored mode twice.
//
// Dyadic blocks: block j = { n : 2^j <= |n| < 2^{j+1} }, j >= 0.

#include <span>
#include <vector>

#include "ostrovsky/spectral.hpp"

namespace ostrovsky {

/// <n> = (1 + n^2)^{1/2}.
double japanese_bracket(double n);

/// (2 pi)^{1/2} (sum_{0<|n|<=N} <n>^{2s} |a_n|^2)^{1/2}.
double sobolev_norm(std::span<const Complex> spectrum, double s);
double sobolev_norm(const SpectralState& state, double s);

/// Block j of n >= 1, i.e. floor(log2 n).
int dyadic_block(int n);

struct DyadicProfile {
  double s = 0.0;
  double p = 2.0;
  /// (sum_{|n| in block j} <n>^{sp} |f_hat(n)|^p)^{1/p}, j = 0..J.
  std::vector<double> block_norms;

  double sup() const;
  double sum() const;
};

/// Requires p > 1 (std::invalid_argument otherwise). Blocks that contain no
/// mode up to N are absent, so an N = 0 spectrum has an empty profile.
DyadicProfile dyadic_profile(std::span<const Complex> spectrum, double s, double p);

/// sup over blocks: the b^s_{p,inf} norm.
double besov_sup(std::span<const Complex> spectrum, double s, double p);
double besov_sup(const SpectralState& state, double s, double p);

/// Sum over blocks: the b^s_{p,1} norm.
double besov_l1(std::span<const Complex> spectrum, double s, double p);
double besov_l1(const SpectralState& state, double s, double p);

/// Default (s, p) = (-0.49, 2.05): sp = -1.0045 < -1, the regime in which the
/// white noise is supported.
inline constexpr double kDefaultS = -0.49;
inline constexpr double kDefaultP = 2.05;

}  // namespace ostrovsky
