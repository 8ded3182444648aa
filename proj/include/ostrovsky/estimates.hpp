#pragma once

// Numerical certification of the frequency-side lemmas behind the bilinear
// estimate. Every implicit constant is an explicit argument:
//   "X << Y"  ->  X < c0 * Y,   "0+" -> eps or delta,   "1-" -> zeta.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ostrovsky::estimates {

inline constexpr double kDefaultC0 = 0.1;
inline constexpr double kDefaultEps = 0.01;
inline constexpr double kDefaultDelta = 0.01;
inline constexpr double kDefaultZeta = 0.95;

/// Named scalar (parameter value, measured quantity, ...).
using Field = std::pair<std::string, double>;

struct EstimateReport {
  std::string lemma;                ///< resonance, weight, gtv, sum, omega-set, omega-weight
  std::vector<Field> ranges;        ///< scan bounds
  std::vector<Field> witness;       ///< arg-extremum
  std::string value_name;
  double value = 0.0;               ///< observed extremal ratio or constant
  std::vector<Field> details;       ///< further measured quantities
  bool pass = false;
  std::vector<std::string> columns; ///< per-scan table
  std::vector<std::vector<double>> rows;

  double field(const std::string& name) const;  ///< witness, range or detail by name
};

/// CSV block: "# key=value" header lines followed by the table.
void write_report_csv(std::ostream& os, const EstimateReport& report);

/// "<lemma> PASS value=... witness=(...)".
std::string verdict_line(const EstimateReport& report);

// ------------------------------------------------------------- resonance

/// max{|tau + m(n)|, |tau1 + m(n1)|, |tau - tau1 + m(n - n1)|}.
/// std::domain_error unless n, n1 and n - n1 are all nonzero.
double resonance_gap(int n, int n1, double tau, double tau1);

/// D = m(n) - m(n1) - m(n2) with n2 = n - n1.
double resonance_defect(int n, int n1);

/// (tau, tau1) minimizing resonance_gap for fixed (n, n1): all three terms
/// equal |D|/3.
std::pair<double, double> resonance_worst_tau(int n, int n1);

/// min over 0 < |n|, |n1| <= L, n1 != n of min_tau sigma / |n n1 n2|, with
/// the table of minima at L' = 2, 4, ..., L. Passes when the minimum is
/// positive and moves by less than 1% from L/2 to L. Requires L >= 2.
EstimateReport resonance_min_ratio(int L, int jobs = 0);

// ---------------------------------------------------------------- weight

enum class WeightWindow {
  Curve,  ///< A_k: <tau - n^3 + 1/n + 3n(n-k)k> < c0 <n>^{1/100}
  Tight,  ///< |(n-k)k + (tau - n^3 + 1/n)/(3n)| < c0 <n>^{-99/100}
};

/// Nonzero k for which (n, tau) lies in the chosen window, ascending.
std::vector<long long> weight_members(int n, double tau, double c0,
                                      WeightWindow window = WeightWindow::Curve);

/// v(n, tau) = 1 + sum_{k in weight_members} min(<k>, <n-k>)^delta.
/// n != 0, delta > 0, c0 > 0.
double weight_v(int n, double tau, double delta, double c0,
                WeightWindow window = WeightWindow::Curve);

/// Curve-window default: since <.> >= 1, the window <.> < c0 <n>^{1/100} with
/// the generic c0 = 0.1 is empty for every |n| < 10^100, so the sets A_k
/// would all be empty.
inline constexpr double kDefaultCurveC0 = 2.0;

struct WeightScanOptions {
  int n_max = 64;
  int k_span = 64;       ///< shifted curves k = -k_span..k_span
  double eps = kDefaultEps;
  double delta = kDefaultDelta;
  double c0 = kDefaultCurveC0;
  double tight_c0 = kDefaultC0;
  int jobs = 0;
};

/// sup of v / <tau - n^3 + 1/n>^eps over 1 <= |n| <= n_max on the curve, on
/// each shifted curve, at offsets off them, and on a log grid. Passes when the
/// sup is finite, changes by < 1% under halving the offset grid, does not
/// increase when c0 is halved, and no (n, tau) has more than two tight-window
/// members.
EstimateReport weight_bound_check(const WeightScanOptions& options);

// ------------------------------------------------------------------- gtv

/// int_R <tau>^{-2 alpha} <tau - a>^{-2 beta} dtau. Requires
/// 0 <= alpha <= beta and alpha + beta > 1/2 (std::invalid_argument).
/// Absolute accuracy about 1e-10.
double gtv_integral(double alpha, double beta, double a);

/// gamma = 2 alpha - [1 - 2 beta]_+, with [0]_+ = eps.
double gtv_gamma(double alpha, double beta, double eps);

/// sup over a in {0} U {10^{j/4} : 0 <= j <= 4 log10(a_max)} of
/// gtv_integral * <a>^gamma. Passes when extending the grid by the last
/// decade changes the sup by < 1%.
EstimateReport gtv_bound_check(double alpha, double beta, double a_max = 1e6,
                               double eps = kDefaultEps);

// ------------------------------------------------------------ multiplier

struct MultiplierSum {
  double partial = 0.0;     ///< sum over 0 < |n1| <= cutoff, n1 != n
  double tail_lower = 0.0;  ///< integral bounds on the rest
  double tail_upper = 0.0;
  long long cutoff = 0;

  double upper() const { return partial + tail_upper; }  ///< rigorous upper bound
  double gap() const { return tail_upper - tail_lower; }
};

/// sum_{n1 != 0, n} <n1>^{-l1} <lambda + n1(n - n1)>^{-l2}. Beyond the
/// cutoff the summand is monotone, so the remainder lies between the
/// integrals from cutoff+1 and from cutoff; the cutoff is raised until that
/// gap is below `gap` (or the cutoff reaches max_cutoff).
/// Requires l1, l2 > 0 and l1 + 2 l2 > 1; n != 0.
MultiplierSum multiplier_sum(double l1, double l2, int n, double lambda, double gap = 1e-8,
                             long long max_cutoff = 1LL << 30);

struct MultiplierSearchOptions {
  double l1 = 0.5;
  double l2 = 0.5;
  int n_max = 16;
  double lambda_max = 256.0;
  double grid_step = 1.0;  ///< uniform lambda grid spacing
  double gap = 1e-6;       ///< per-evaluation tail gap
  int jobs = 0;
};

/// sup over 0 < |n| <= n_max, |lambda| <= lambda_max. Candidates: the
/// integer-root values lambda = k(k - n) and their half-way points, the
/// uniform grid, then golden-section refinement around the best candidates.
/// Passes when halving grid_step moves the sup by < 1%.
EstimateReport multiplier_sup_search(const MultiplierSearchOptions& options);

// ----------------------------------------------------------------- omega

/// Lebesgue measure of { s : M <= |s| < 2M } intersected with the union
/// over integers n1 of [-3 n n1 n2 - w, -3 n n1 n2 + w],
/// w = c0 <n n1 n2>^{1/100}, n2 = n - n1. Requires n != 0, M >= 1, c0 > 0.
double resonance_set_measure(int n, double M, double c0 = kDefaultC0);

struct OmegaScanOptions {
  int n_max = 64;
  int log2_M_min = 4;
  int log2_M_max = 20;
  double c0 = kDefaultC0;
  double zeta = kDefaultZeta;
  int jobs = 0;
};

/// sup of resonance_set_measure / M^{3/4} over the scan, with the fitted
/// growth exponent of the per-M maximum. Passes when the sup is unchanged
/// (< 1%) by the last dyadic M and the fitted exponent is below 3/4.
EstimateReport resonance_set_scan(const OmegaScanOptions& options);

struct WeightIntegral {
  double core = 0.0;        ///< exact union, |n1| <= cutoff
  double tail_bound = 0.0;  ///< analytic bound on |n1| > cutoff
  double nearest_shell = 0.0;  ///< part with |s| < 2 (the innermost shells)
  long long cutoff = 0;

  double value() const { return core + tail_bound; }
};

/// int <s>^{-zeta} over the interval union of resonance_set_measure (all s).
/// Requires zeta in (0.9, 1), n != 0, c0 > 0.
WeightIntegral resonance_weight_integral(int n, double zeta = kDefaultZeta,
                                         double c0 = kDefaultC0, long long cutoff = 100000);

/// sup over 0 < |n| <= n_max of resonance_weight_integral. Passes when the
/// sup over |n| <= n_max equals that over |n| <= n_max/2 within 1%.
EstimateReport resonance_weight_scan(const OmegaScanOptions& options);

}  // namespace ostrovsky::estimates
