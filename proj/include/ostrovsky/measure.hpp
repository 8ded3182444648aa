#pragma once

// Sampling of the truncated white-noise measure
//
//   dQ_N ~ exp(-1/2 sum_{n=1}^N |a_n|^2) prod da_n,
//
// i.e. a_n i.i.d. complex Gaussian with independent real and imaginary parts
// of variance 1 (E|a_n|^2 = 2), and Monte-Carlo tests of its invariance,
// tail and growth under the truncated flow.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ostrovsky/integrator.hpp"
#include "ostrovsky/norms.hpp"
#include "ostrovsky/spectral.hpp"

namespace ostrovsky {

/// One SplitMix64 step from state x (Steele, Lea, Flood 2014): x + gamma, then the mixer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of ensemble member `index`: splitmix64(splitmix64(base) + index).
std::uint64_t member_seed(std::uint64_t base, std::uint64_t index);

/// One draw from Q_N. Deterministic in `seed` (std::mt19937_64 feeding
/// std::normal_distribution, Re then Im for n = 1..N). Requires N >= 1.
SpectralState sample_white_noise(int N, std::uint64_t seed);

/// -1/2 sum |a_n|^2, without the normalization constant.
double log_density(const SpectralState& state);

struct Ensemble {
  SimConfig config;
  std::vector<SpectralState> members;
  std::vector<std::uint64_t> member_seeds;
  std::vector<std::size_t> failures;  ///< members whose evolution blew up
};

/// M members drawn with member_seed(config.seed, i).
Ensemble sample_ensemble(const SimConfig& config, std::size_t M, int jobs = 0);

/// <dir>/ensemble.json plus <dir>/member_<i>/ in the trajectory layout (a
/// single t=0 snapshot). Returns the files written.
std::vector<std::filesystem::path> save_ensemble(const std::filesystem::path& dir,
                                                 const Ensemble& ensemble);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict verdict);

/// Shared exclusion policy: a report is inconclusive when fewer than 80% of
/// the requested members survived.
inline constexpr double kMinSurvivingFraction = 0.8;

// ---------------------------------------------------------------- invariance

struct InvarianceOptions {
  SimConfig sim;                  ///< N, dt, physics and base seed
  std::size_t samples = 10000;    ///< M
  std::vector<double> times{0.5, 1.0};
  std::vector<int> ks_modes;      ///< modes for the KS tests; empty = all
  double alpha = 0.01;            ///< family-wise level before Bonferroni
  double moment_sigmas = 3.0;     ///< tolerance of the moment test in SEs
  int chi_square_bins = 20;
  int jobs = 0;
};

/// One row per (observable, mode, time). `mode` is 0 for whole-state
/// observables. p_value is NaN for the moment test.
struct TestRow {
  std::string observable;
  int mode = 0;
  double time = 0.0;
  double statistic = 0.0;
  double p_value = 0.0;
  double std_error = 0.0;
  double threshold = 0.0;  ///< moment: allowed |mean-2|; others: corrected level
  bool pass = false;
};

struct InvarianceReport {
  std::string observable = "white-noise invariance";
  std::size_t requested = 0;
  std::size_t used = 0;
  std::vector<double> times;
  std::vector<TestRow> rows;
  std::vector<std::size_t> failures;  ///< excluded member indices
  bool inconclusive = false;

  std::size_t failed_rows() const;
  Verdict verdict() const;
};

/// Draws M members, evolves each through the requested times and compares
/// with M fresh draws (seeds member_seed(seed, M + i)) by
///   (a) |a_n(t)|^2 means against 2 within moment_sigmas empirical SEs,
///   (b) two-sample KS on Re a_n(t) and Im a_n(t), Bonferroni over all KS tests,
///   (c) Pearson chi-square of sum |a_n(t)|^2 against chi^2_{2N},
///       Bonferroni over times.
/// Members whose CFL bound is below dt, or that blow up, are excluded.
InvarianceReport invariance_test(const InvarianceOptions& options);

void write_report_csv(std::ostream& os, const InvarianceReport& report);

// ---------------------------------------------------------------------- tail

struct TailOptions {
  int N = 64;
  std::size_t samples = 100000;
  std::vector<double> K_grid;  ///< empty = 0.25, 0.5, ..., 8
  double s = kDefaultS;
  double p = kDefaultP;
  std::uint64_t seed = 0;
  double min_r_squared = 0.95;
  int jobs = 0;
};

struct TailPoint {
  double K = 0.0;
  double exceedance = 0.0;  ///< P(norm > K)
  bool used_in_fit = false;
};

struct TailReport {
  TailOptions options;
  std::vector<TailPoint> points;
  double c = 0.0;          ///< minus the fitted slope of log P against K^2
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t fit_points = 0;
  bool degenerate = false;  ///< fewer than 3 usable grid points

  Verdict verdict() const;
};

/// Empirical exceedance of the b^s_{p,inf} norm of M draws over K_grid.
/// Points with 10/M <= P <= 1/2 enter a least-squares fit of log P on K^2;
/// passes when c > 0 and R^2 exceeds options.min_r_squared.
TailReport tail_test(const TailOptions& options);

void write_report_csv(std::ostream& os, const TailReport& report);

// -------------------------------------------------------------------- growth

struct GrowthOptions {
  SimConfig sim;  ///< N, dt and base seed; sim.T is ignored
  std::size_t samples = 1000;
  std::vector<double> horizons{1.0, 10.0};  ///< the T values
  std::vector<double> eps_grid{0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
  double s = kDefaultS;
  double p = kDefaultP;
  int jobs = 0;
};

struct GrowthPoint {
  double T = 0.0;
  double eps = 0.0;
  double quantile = 0.0;  ///< (1-eps)-quantile of sup_{t<=T} norm
  double log_T_over_eps = 0.0;
};

struct GrowthReport {
  GrowthOptions options;
  std::size_t used = 0;
  std::vector<std::size_t> failures;
  std::vector<GrowthPoint> points;
  double slope = 0.0;  ///< quantile^2 against log(T/eps)
  double intercept = 0.0;
  double rmse = 0.0;
  bool monotone = false;     ///< nondecreasing in T and as eps decreases
  bool log_ordered = false;  ///< nondecreasing in log(T/eps) up to 3 rmse
  bool sublinear_in_T = false;
  bool inconclusive = false;

  Verdict verdict() const;
};

/// Evolves M draws to max(horizons), tracking the running sup of the
/// b^s_{p,inf} norm at every step, and fits quantile^2 = a + b log(T/eps).
/// Passes when b > 0, the quantiles are monotone, and between consecutive
/// horizons quantile^2 grows by at most b log(T2/T1) + 3 rmse.
GrowthReport growth_test(const GrowthOptions& options);

void write_report_csv(std::ostream& os, const GrowthReport& report);

/// Precomputed weights for repeated b^s_{p,inf} evaluation on a fixed N.
class BesovSupEvaluator {
 public:
  BesovSupEvaluator(int N, double s, double p);
  double operator()(std::span<const Complex> modes);

 private:
  double half_p_;
  double inv_p_;
  std::vector<double> weight_;
  std::vector<int> block_;
  std::vector<double> acc_;
};

}  // namespace ostrovsky
