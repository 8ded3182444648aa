#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ostrovsky::stats {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(n)
  std::size_t count = 0;
};

MeanEstimate mean_estimate(std::span<const double> values);

/// Survival function of the Kolmogorov distribution,
/// Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;  ///< sup |F_x - F_y|
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction of the effective size).
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// One-sample test against a continuous CDF.
KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of `values` to a continuous law, using `bins`
/// equiprobable cells (edges from the quantile function).
ChiSquareResult chi_square_gof(std::span<const double> values, int bins,
                               const std::function<double(double)>& quantile);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rmse = 0.0;  ///< root mean square residual
  std::size_t points = 0;
};

/// Ordinary least squares y ~ intercept + slope x. Needs >= 2 points with
/// distinct x (std::invalid_argument otherwise).
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Lower empirical quantile inf{ v : F_n(v) >= q } of `sorted` (ascending),
/// with q <= 0 pinned to the minimum.
double empirical_quantile(std::span<const double> sorted, double q);

}  // namespace ostrovsky::stats
