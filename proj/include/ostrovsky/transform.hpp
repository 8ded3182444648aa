#pragma once

#include <span>
#include <vector>

#include "ostrovsky/spectral.hpp"

namespace ostrovsky {

/// Samples u(x_j), x_j = 2 pi j / M. Requires M >= 2N+2, otherwise the grid
/// cannot resolve the band and std::invalid_argument is thrown.
std::vector<double> to_physical(const SpectralState& state, int gridpoints);

/// Inverse of to_physical: the modes 1..N of a real periodic sample vector.
/// Requires samples.size() >= 2N+2.
SpectralState from_physical(std::span<const double> samples, int cutoff);

/// Smallest 2^a 3^b 5^c that is even and >= min_size.
int fft_friendly_size(int min_size);

/// Transform length used for the quadratic term: >= 2(2N+1), so the product
/// of two degree-N polynomials is resolved without aliasing.
int dealiased_size(int cutoff);

/// Spectrum of -P_N(u u_x): mode n equals -(i n / 2) sum_{n1+n2=n} a_n1 a_n2
/// over 0 < |n1|, |n2| <= N. Evaluated with a zero-padded real transform.
SpectralState nonlinear_term(const SpectralState& state);

/// Same contract as nonlinear_term via the explicit O(N^2) double loop.
/// Refuses cutoffs above max_cutoff with std::invalid_argument.
SpectralState convolution_direct(const SpectralState& state, int max_cutoff = 64);

namespace detail {

/// In-place variant used by the time stepper: writes -P_N(u u_x) for the
/// modes in `modes` into `out` (both of length N).
void nonlinear_term_into(std::span<const Complex> modes, std::span<Complex> out);

}  // namespace detail

}  // namespace ostrovsky
