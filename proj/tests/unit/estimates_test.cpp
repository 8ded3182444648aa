#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ostrovsky/estimates.hpp"
#include "ostrovsky/spectral.hpp"

using namespace ostrovsky;
using namespace ostrovsky::estimates;

namespace {

constexpr double kPi = std::numbers::pi;

double bracket(double x) { return std::sqrt(1.0 + x * x); }

double max_column(const EstimateReport& r, std::size_t col) {
  double m = -1.0;
  for (const auto& row : r.rows) m = std::max(m, row[col]);
  return m;
}

}  // namespace

TEST_SUITE("estimates") {

TEST_CASE("resonance defect identity") {
  CHECK(resonance_defect(2, 1) == 7.5);
  for (int n : {-7, -2, 3, 11}) {
    for (int n1 : {-5, -1, 1, 4, 9}) {
      if (n1 == n) continue;
      const double n2 = n - n1;
      const double expect = 3.0 * n * n1 * n2 + (1.0 / n1 + 1.0 / n2 - 1.0 / n);
      CHECK(resonance_defect(n, n1) == doctest::Approx(expect).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(resonance_gap(0, 1, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(resonance_gap(2, 0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(resonance_gap(2, 2, 0.0, 0.0), std::domain_error);
}

TEST_CASE("two terms zeroed leaves the full defect") {
  // tau = -m(n), tau1 = -m(n1) kills the first two terms.
  for (auto [n, n1] : {std::pair{2, 1}, {5, -3}, {-4, 7}}) {
    const double gap = resonance_gap(n, n1, -dispersion(n), -dispersion(n1));
    CHECK(gap == doctest::Approx(std::abs(resonance_defect(n, n1))).epsilon(1e-14));
  }
  // At (2, 1, 1): sigma >= 2.5 and the ratio to |n n1 n2| = 2 is >= 1.25.
  auto [tau, tau1] = resonance_worst_tau(2, 1);
  CHECK(resonance_gap(2, 1, tau, tau1) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("pigeonhole bound on random tuples") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> freq(-40, 40);
  std::uniform_real_distribution<double> shift(-2e4, 2e4);
  int checked = 0;
  while (checked < 5000) {
    const int n = freq(rng), n1 = freq(rng);
    if (n == 0 || n1 == 0 || n1 == n) continue;
    const double tau = shift(rng), tau1 = shift(rng);
    const double bound = std::abs(resonance_defect(n, n1)) / 3.0;
    CHECK(resonance_gap(n, n1, tau, tau1) >= bound * (1 - 1e-14));
    auto [wt, wt1] = resonance_worst_tau(n, n1);
    CHECK(resonance_gap(n, n1, wt, wt1) == doctest::Approx(bound).epsilon(1e-12));
    ++checked;
  }
}

TEST_CASE("resonance minimum at L = 2 is 65/64") {
  // Hand enumeration: the minimum sits at (n, n1, n2) = (+-2, -+2, +-4), where
  // |D| / (3 |n n1 n2|) = 48.75 / 48.
  auto r = resonance_min_ratio(2);
  CHECK(r.value == doctest::Approx(65.0 / 64.0).epsilon(1e-14));
  CHECK(std::abs(r.field("n")) == 2.0);
  CHECK(r.field("n1") == -r.field("n"));
  CHECK(r.field("n2") == 2.0 * r.field("n"));
  CHECK(r.value >= 1.0);
  CHECK(r.pass);
  CHECK_THROWS_AS(resonance_min_ratio(1), std::invalid_argument);
}

TEST_CASE("resonance ratio tends to 1 on the balanced diagonal") {
  for (int n : {8, 64, 512}) {
    const double ratio = std::abs(resonance_defect(n, n / 2)) / (3.0 * n * (n / 2.0) * (n / 2.0));
    CHECK(ratio > 1.0);
    CHECK(ratio - 1.0 < 2.0 / (double(n) * n * n));
  }
}

TEST_CASE("resonance scan stabilizes and its witness reproduces") {
  auto r = resonance_min_ratio(32);
  CHECK(r.pass);
  CHECK(r.field("change_from_half_L") < 0.01);
  const int n = static_cast<int>(r.field("n")), n1 = static_cast<int>(r.field("n1"));
  CHECK(std::abs(n) <= 32);
  CHECK(std::abs(n1) <= 32);
  const double prod = std::abs(double(n) * n1 * (n - n1));
  CHECK(std::abs(resonance_gap(n, n1, r.field("tau"), r.field("tau1")) / prod - r.value) <= 1e-12 * r.value);
  CHECK(std::abs(r.rows.back()[1] - r.value) <= 1e-12 * r.value);
  for (std::size_t k = 1; k < r.rows.size(); ++k) CHECK(r.rows[k][1] <= r.rows[k - 1][1]);
}

TEST_CASE("weight: off-curve value is one") {
  const double tau = dispersion(3) + 10.5;
  CHECK(weight_members(3, tau, kDefaultCurveC0).empty());
  CHECK(weight_v(3, tau, kDefaultDelta, kDefaultCurveC0) == 1.0);
  CHECK(weight_v(5, 1e9 + 0.5, kDefaultDelta, kDefaultCurveC0) == 1.0);
}

TEST_CASE("weight: construction places the point in A_k0") {
  for (auto [n, k0] : {std::pair{5, 2}, {7, -3}, {-6, 4}, {12, 30}}) {
    const double tau = dispersion(n) - 3.0 * n * double(n - k0) * k0;
    auto members = weight_members(n, tau, kDefaultCurveC0);
    CHECK(std::find(members.begin(), members.end(), k0) != members.end());
    const double floor_value = 1.0 + std::pow(std::min(bracket(k0), bracket(n - k0)), kDefaultDelta);
    CHECK(weight_v(n, tau, kDefaultDelta, kDefaultCurveC0) >= floor_value);
  }
}

TEST_CASE("weight: v >= 1, monotone in c0, at most two tight members") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> freq(-64, 64);
  std::uniform_int_distribution<int> kd(-64, 64);
  std::uniform_real_distribution<double> off(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const int n = freq(rng);
    if (n == 0) continue;
    const int k = kd(rng);
    const double tau = dispersion(n) - 3.0 * n * double(n - k) * k + off(rng);
    const double v = weight_v(n, tau, kDefaultDelta, kDefaultCurveC0);
    CHECK(v >= 1.0);
    CHECK(weight_v(n, tau, kDefaultDelta, kDefaultCurveC0 / 2) <= v);
    CHECK(weight_members(n, tau, kDefaultC0, WeightWindow::Tight).size() <= 2);
    for (long long m : weight_members(n, tau, kDefaultCurveC0)) CHECK(m != 0);
  }
}

TEST_CASE("weight: small c0 empties the curve window") {
  const int n = 5;
  CHECK(weight_members(n, dispersion(n), kDefaultC0).empty());
  CHECK(weight_v(n, dispersion(n), kDefaultDelta, kDefaultC0) == 1.0);
  CHECK(weight_members(n, dispersion(n), kDefaultCurveC0) == std::vector<long long>{n});
}

TEST_CASE("weight bound check on a small range") {
  WeightScanOptions o;
  o.n_max = 8;
  o.k_span = 8;
  auto r = weight_bound_check(o);
  CHECK(r.pass);
  CHECK(r.value >= 1.0);
  CHECK(r.field("sup_at_half_c0") <= r.value * (1 + 1e-12));
  CHECK(r.field("max_tight_window_members") <= 2.0);
  const double tau_w = r.field("tau");
  const int n_w = static_cast<int>(r.field("n"));
  CHECK(std::abs(n_w) <= 8);
  const double again = weight_v(n_w, tau_w, o.delta, o.c0) / std::pow(bracket(tau_w - dispersion(n_w)), o.eps);
  CHECK(std::abs(again - r.value) <= 1e-12 * r.value);
  CHECK(std::abs(r.rows[1][2] - r.value) <= 1e-12 * r.value);
  const double on_curve = r.field("on_curve_v_n1");
  CHECK(on_curve <= 1.0 + 2.0 * std::pow(bracket(1.0), o.delta));
}

TEST_CASE("gtv integral closed forms") {
  CHECK(gtv_integral(0.5, 0.5, 0.0) == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(std::abs(gtv_integral(0.5, 0.5, 0.0) - kPi) < 1e-9);
  // alpha = 0, beta = 1: a shifted Cauchy integral.
  for (double a : {0.0, 3.0, 1e5}) CHECK(gtv_integral(0.0, 1.0, a) == doctest::Approx(kPi).epsilon(1e-9));
  // alpha = beta = 1: convolution of two Cauchy kernels, 2 pi / (a^2 + 4).
  for (double a : {0.0, 1.0, 10.0, 1e4}) {
    CHECK(gtv_integral(1.0, 1.0, a) == doctest::Approx(2.0 * kPi / (a * a + 4.0)).epsilon(1e-9));
  }
}

TEST_CASE("gtv integral is positive and even") {
  for (auto [al, be] : {std::pair{0.5, 0.5}, {0.3, 0.6}, {0.1, 0.45}, {0.0, 0.7}}) {
    for (double a : {0.5, 7.0, 1e3, 1e6}) {
      const double v = gtv_integral(al, be, a);
      CHECK(v > 0.0);
      CHECK(gtv_integral(al, be, -a) == doctest::Approx(v).epsilon(1e-10));
    }
  }
}

TEST_CASE("gtv preconditions and gamma") {
  CHECK_THROWS_AS(gtv_integral(0.6, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gtv_integral(-0.1, 0.7, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gtv_integral(0.2, 0.3, 0.0), std::invalid_argument);
  CHECK(gtv_gamma(0.5, 0.5, 0.01) == doctest::Approx(0.99));
  CHECK(gtv_gamma(0.3, 0.6, 0.01) == doctest::Approx(0.6));
  CHECK(gtv_gamma(0.4, 0.3, 0.01) == doctest::Approx(0.4));
}

TEST_CASE("gtv bound check") {
  auto r = gtv_bound_check(0.5, 0.5, 1e6, 0.1);
  CHECK(r.pass);
  CHECK(r.field("value_at_a0") == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(r.rows.front()[0] == 0.0);
  auto beta_branch = gtv_bound_check(0.3, 0.6, 1e8);
  CHECK(beta_branch.field("gamma") == doctest::Approx(0.6));
  CHECK(beta_branch.pass);
  CHECK(beta_branch.field("value_at_a0") == doctest::Approx(gtv_integral(0.3, 0.6, 0.0)).epsilon(1e-15));
  const double a_w = beta_branch.field("a");
  CHECK(std::abs(gtv_integral(0.3, 0.6, a_w) * std::pow(bracket(a_w), 0.6) - beta_branch.value) <=
        1e-12 * beta_branch.value);
}

TEST_CASE("multiplier sum against direct summation") {
  // Direct double-precision sum over 0 < |n1| <= 10^6, n1 != 1, sorted by size.
  const double oracle = 0.3856416829211439;
  auto s = multiplier_sum(2.0, 1.0, 1, 0.0);
  CHECK(s.gap() < 1e-8);
  CHECK(s.partial + s.tail_lower <= oracle + 1e-12);
  CHECK(s.upper() >= oracle - 1e-12);

  std::vector<double> terms;
  for (long long n1 = -1000000; n1 <= 1000000; ++n1) {
    if (n1 == 0 || n1 == 1) continue;
    terms.push_back(std::pow(bracket(double(n1)), -2.0) / bracket(double(n1) * double(1 - n1)));
  }
  std::sort(terms.begin(), terms.end());
  double direct = 0.0;
  for (double t : terms) direct += t;
  CHECK(std::abs(direct - oracle) < 1e-13);
}

TEST_CASE("multiplier sum symmetry, positivity, monotonicity") {
  for (int n : {1, 3, 8}) {
    for (double lam : {-20.5, -2.0, 0.0, 6.25, 40.0}) {
      auto a = multiplier_sum(0.5, 0.5, n, lam);
      auto b = multiplier_sum(0.5, 0.5, -n, lam);
      CHECK(a.partial + a.tail_lower > 0.0);
      CHECK(b.partial == doctest::Approx(a.partial).epsilon(1e-12));
      CHECK(b.upper() == doctest::Approx(a.upper()).epsilon(1e-10));
      CHECK(multiplier_sum(0.7, 0.5, n, lam).upper() < a.partial + a.tail_lower);
      CHECK(multiplier_sum(0.5, 0.7, n, lam).upper() < a.partial + a.tail_lower);
    }
  }
}

TEST_CASE("multiplier sum preconditions") {
  CHECK_THROWS_AS(multiplier_sum(0.5, 0.2, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(multiplier_sum(0.0, 1.0, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(multiplier_sum(1.0, 0.0, 1, 0.0), std::invalid_argument);
  CHECK_NOTHROW(multiplier_sum(1.2, 0.05, 1, 0.0, 1e-6));
  MultiplierSearchOptions o;
  o.l1 = 0.5;
  o.l2 = 0.2;
  CHECK_THROWS_AS(multiplier_sup_search(o), std::invalid_argument);
}

TEST_CASE("multiplier sup search") {
  MultiplierSearchOptions small;
  small.n_max = 3;
  small.lambda_max = 16.0;
  auto r = multiplier_sup_search(small);
  CHECK(r.pass);
  CHECK(std::abs(r.field("n")) <= 3);
  CHECK(std::abs(r.field("lambda")) <= 16.0);
  const double again = multiplier_sum(small.l1, small.l2, int(r.field("n")), r.field("lambda"), small.gap).upper();
  CHECK(std::abs(again - r.value) <= 1e-12 * r.value);
  CHECK(max_column(r, 2) == doctest::Approx(r.value).epsilon(1e-12));

  MultiplierSearchOptions sub = small;
  sub.n_max = 2;
  sub.lambda_max = 8.0;
  CHECK(multiplier_sup_search(sub).value <= r.value * (1 + 1e-12));
}

TEST_CASE("resonance set measure") {
  // n = 1: centers -3 n1 (1 - n1) are 0, 6, 18, 36, ...; the shell [8, 16) holds none.
  CHECK(resonance_set_measure(1, 8.0) == 0.0);
  // Shell [4, 8) holds the center 6 (from n1 = 2 and n1 = -1), half-width 0.1 <2>^{1/100}.
  CHECK(resonance_set_measure(1, 4.0) == doctest::Approx(2 * 0.1 * std::pow(5.0, 0.005)).epsilon(1e-14));
  CHECK_THROWS_AS(resonance_set_measure(0, 4.0), std::domain_error);
  CHECK_THROWS_AS(resonance_set_measure(1, 0.5), std::invalid_argument);

  for (int n : {-9, -2, 3, 17}) {
    for (double M : {16.0, 256.0, 4096.0}) {
      int count = 0;
      double widest = 0.0;
      for (long long n1 = -200; n1 <= 200; ++n1) {
        const double x = double(n) * n1 * (n - n1);
        const double w = 0.1 * std::pow(1 + x * x, 0.005);
        if (std::abs(-3 * x) + w >= M && std::abs(-3 * x) - w < 2 * M) {
          ++count;
          widest = std::max(widest, w);
        }
      }
      const double m = resonance_set_measure(n, M);
      CHECK(m >= 0.0);
      CHECK(m <= count * 2 * widest + 1e-12);
      CHECK(m <= M * 2);
      CHECK(resonance_set_measure(n, M, 0.2) >= m);
    }
  }
}

TEST_CASE("resonance set scan") {
  OmegaScanOptions o;
  o.n_max = 8;
  o.log2_M_max = 14;
  auto r = resonance_set_scan(o);
  CHECK(std::isfinite(r.value));
  CHECK(r.field("fitted_exponent_max_over_n") < 0.75);
  CHECK(max_column(r, 3) == doctest::Approx(r.value).epsilon(1e-12));
  CHECK(std::abs(r.field("n")) <= 8);
  CHECK(r.field("M") >= 16.0);
  CHECK(r.field("M") <= 16384.0);
}

TEST_CASE("resonance weight integral") {
  for (int n : {-5, 1, 2, 9}) {
    auto w = resonance_weight_integral(n);
    CHECK(w.value() >= w.nearest_shell);
    CHECK(w.core >= w.nearest_shell);
    CHECK(w.tail_bound > 0.0);
    CHECK(w.tail_bound < 1e-2);
    CHECK(resonance_weight_integral(n, kDefaultZeta, 0.2).value() > w.value());
    CHECK(resonance_weight_integral(-n, kDefaultZeta).core == doctest::Approx(w.core).epsilon(1e-12));
  }
  CHECK_THROWS_AS(resonance_weight_integral(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(resonance_weight_integral(1, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(resonance_weight_integral(0), std::domain_error);
}

TEST_CASE("resonance weight scan") {
  OmegaScanOptions o;
  o.n_max = 8;
  auto r = resonance_weight_scan(o);
  CHECK(std::isfinite(r.value));
  CHECK(max_column(r, 3) == doctest::Approx(r.value).epsilon(1e-12));
}

TEST_CASE("report serialization") {
  auto r = resonance_min_ratio(32);
  std::ostringstream os;
  write_report_csv(os, r);
  const auto text = os.str();
  CHECK(text.rfind("# lemma=resonance\n", 0) == 0);
  CHECK(text.find("\nL,min_ratio,n,n1\n") != std::string::npos);
  CHECK(verdict_line(r).rfind("resonance PASS min_ratio=", 0) == 0);
  CHECK(verdict_line(r).find("witness=(n=") != std::string::npos);
  CHECK_THROWS_AS(r.field("nope"), std::out_of_range);
}

}
