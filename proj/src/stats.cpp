#include "ostrovsky/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace ostrovsky::stats {

MeanEstimate mean_estimate(std::span<const double> values) {
  MeanEstimate est;
  est.count = values.size();
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / values.size();
  if (values.size() < 2) return est;
  double ss = 0.0;
  for (double v : values) ss += (v - est.mean) * (v - est.mean);
  est.std_error = std::sqrt(ss / (values.size() - 1) / values.size());
  return est;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series is useless for small lambda; use the theta
  // function form of the CDF there.
  if (lambda < 1.18) {
    const double y = std::exp(-1.2337005501361697 / (lambda * lambda));  // -pi^2/8
    const double cdf = 2.5066282746310002 / lambda *
                       (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {
double ks_p_value(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}
}  // namespace

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = a.size(), nb = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::vector<double> a(x.begin(), x.end());
  std::sort(a.begin(), a.end());
  const double n = a.size();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, ks_p_value(d, n)};
}

ChiSquareResult chi_square_gof(std::span<const double> values, int bins,
                               const std::function<double(double)>& quantile) {
  if (bins < 2) throw std::invalid_argument("chi_square_gof: need >= 2 bins");
  if (values.empty()) throw std::invalid_argument("chi_square_gof: empty sample");
  std::vector<double> edges;
  for (int k = 1; k < bins; ++k) edges.push_back(quantile(double(k) / bins));
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    const auto cell = std::upper_bound(edges.begin(), edges.end(), v) - edges.begin();
    ++counts[static_cast<std::size_t>(cell)];
  }
  const double expected = double(values.size()) / bins;
  double stat = 0.0;
  for (auto c : counts) stat += (c - expected) * (c - expected) / expected;
  ChiSquareResult r{stat, bins - 1, 1.0};
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), stat));
  return r;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.rmse = std::sqrt(sse / n);
  return fit;
}

double empirical_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const auto rank = static_cast<std::size_t>(std::ceil(q * sorted.size()));
  return sorted[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace ostrovsky::stats
