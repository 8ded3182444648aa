#include "ostrovsky/spectrum_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ostrovsky {

namespace {

constexpr std::string_view kMagic = "ostrovsky-spectrum v1 N=";

double parse_real(std::string_view field, int line) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw SpectrumParseError(line, "malformed number '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) throw SpectrumParseError(line, "non-finite amplitude");
  return value;
}

long parse_int(std::string_view field, int line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SpectrumParseError(line, "malformed integer '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

SpectrumParseError::SpectrumParseError(int line, const std::string& what)
    : std::runtime_error("spectrum line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_real(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return {buf, ptr};
}

void write_spectrum(std::ostream& os, std::span<const Complex> modes) {
  os << kMagic << modes.size() << '\n';
  for (std::size_t k = 0; k < modes.size(); ++k) {
    os << (k + 1) << ',' << format_real(modes[k].real()) << ',' << format_real(modes[k].imag()) << '\n';
  }
}

void write_spectrum(const std::filesystem::path& path, const SpectralState& state) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_spectrum(os, state.modes());
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Complex> read_spectrum(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw SpectrumParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(kMagic, 0) != 0) {
    throw SpectrumParseError(1, "expected header '" + std::string(kMagic) + "<N>'");
  }
  const long N = parse_int(std::string_view(line).substr(kMagic.size()), 1);
  if (N < 0) throw SpectrumParseError(1, "negative cutoff");

  std::vector<Complex> modes;
  modes.reserve(static_cast<std::size_t>(N));
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view view(line);
    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos) {
      throw SpectrumParseError(line_no, "expected 'n,re,im'");
    }
    const long n = parse_int(view.substr(0, c1), line_no);
    if (n != static_cast<long>(modes.size()) + 1) {
      throw SpectrumParseError(line_no, "expected mode " + std::to_string(modes.size() + 1) +
                                            ", found " + std::to_string(n));
    }
    if (n > N) throw SpectrumParseError(line_no, "more rows than N=" + std::to_string(N));
    const double re = parse_real(view.substr(c1 + 1, c2 - c1 - 1), line_no);
    const double im = parse_real(view.substr(c2 + 1), line_no);
    modes.emplace_back(re, im);
  }
  if (static_cast<long>(modes.size()) != N) {
    throw SpectrumParseError(line_no, "expected " + std::to_string(N) + " rows, found " +
                                          std::to_string(modes.size()));
  }
  return modes;
}

std::vector<Complex> read_spectrum(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_spectrum(is);
}

SpectralState load_state(const std::filesystem::path& path) {
  auto modes = read_spectrum(path);
  if (modes.empty()) throw std::invalid_argument(path.string() + ": spectrum has N=0");
  return SpectralState(std::move(modes));
}

}  // namespace ostrovsky
