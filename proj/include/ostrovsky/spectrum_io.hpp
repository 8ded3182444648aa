#pragma once

// Spectrum snapshot text format:
//
//   ostrovsky-spectrum v1 N=<N>
//   1,<re>,<im>
//   ...
//   N,<re>,<im>
//
// Rows are ascending in n, floats carry 17 significant digits, '.' decimal
// separator, LF line endings.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ostrovsky/spectral.hpp"

namespace ostrovsky {

class SpectrumParseError : public std::runtime_error {
 public:
  SpectrumParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// 17-significant-digit rendering, independent of the C locale.
std::string format_real(double x);

void write_spectrum(std::ostream& os, std::span<const Complex> modes);
void write_spectrum(const std::filesystem::path& path, const SpectralState& state);

/// Parses a spectrum. N = 0 is accepted and yields an empty vector.
std::vector<Complex> read_spectrum(std::istream& is);
std::vector<Complex> read_spectrum(const std::filesystem::path& path);

/// read_spectrum followed by SpectralState construction (requires N >= 1).
SpectralState load_state(const std::filesystem::path& path);

}  // namespace ostrovsky
