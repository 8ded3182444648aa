#pragma once

// Fourier-side representation of real, mean-zero fields on the torus [0, 2pi)
// and the quantities computed directly from it.
//
// Convention: f_hat(n) = (1/2pi) * integral f(x) exp(-inx) dx, so that
// u(x) = sum_{0<|n|<=N} a_n exp(inx) with a_{-n} = conj(a_n) and a_0 = 0.

#include <complex>
#include <span>
#include <vector>

namespace ostrovsky {

using Complex = std::complex<double>;

/// Truncated spectrum of a real mean-zero field. Only a_1..a_N are stored;
/// a_0 is identically zero and negative modes are conjugate views.
class SpectralState {
 public:
  SpectralState() = default;

  /// Zero state with the given cutoff (N >= 1).
  explicit SpectralState(int cutoff);

  /// Takes a_1..a_N; throws std::invalid_argument on empty input or
  /// non-finite amplitudes.
  explicit SpectralState(std::vector<Complex> modes);

  int cutoff() const { return static_cast<int>(modes_.size()); }

  /// a_n for -N <= n <= N; zero outside the band and at n = 0.
  Complex operator[](int n) const;

  /// Sets a_n for 1 <= n <= N.
  void set_mode(int n, Complex value);

  /// Stored modes, index k holds a_{k+1}.
  std::span<const Complex> modes() const { return modes_; }

  bool operator==(const SpectralState&) const = default;

 private:
  std::vector<Complex> modes_;
};

/// m(n) = n^3 - 1/n, the symbol of the linear part: free modes evolve as
/// exp(-i m(n) t). Throws std::domain_error for n = 0.
double dispersion(int n);

/// m(n) tabulated for n = 1..N, extended to negative n by oddness.
class DispersionTable {
 public:
  explicit DispersionTable(int cutoff);
  int cutoff() const { return static_cast<int>(values_.size()); }
  double operator()(int n) const;
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Zeroes every mode with |n| > m. Requires m >= 1.
SpectralState project(const SpectralState& state, int m);

/// (integral u^2 dx)^{1/2} = sqrt(4 pi sum_{n>=1} |a_n|^2).
double l2_norm(const SpectralState& state);

/// sum_{n=1}^N |a_n|^2.
double mode_energy(const SpectralState& state);

/// integral u^3 dx by trapezoid quadrature on a grid of at least 3N+1 points,
/// which is exact for a cubic of a degree-N trigonometric polynomial.
double cubic_integral(const SpectralState& state);

/// The three integrals making up the Hamiltonian functionals.
struct EnergyParts {
  double dispersive = 0.0;  ///< (1/2) integral u_x^2
  double nonlocal = 0.0;    ///< (1/2) integral (d_x^{-1} u)^2
  double cubic = 0.0;       ///< integral u^3
};

EnergyParts energy_parts(const SpectralState& state);

/// H(u) = (1/2) int u_x^2 + (1/2) int (d_x^{-1}u)^2 - (1/6) int u^3.
double hamiltonian(const SpectralState& state);

/// E(u) = (1/2) int u_x^2 - (1/2) int (d_x^{-1}u)^2 + (1/6) int u^3.
///
/// This is the functional the flow with dispersion m(n) = n^3 - 1/n actually
/// conserves (u_t = d_x dE/du up to sign). It differs from hamiltonian() in
/// the relative sign of the dispersive term; hamiltonian() is not invariant
/// under that flow. See README "Conserved quantities".
double flow_energy(const SpectralState& state);

}  // namespace ostrovsky
