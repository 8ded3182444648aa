#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "ostrovsky/measure.hpp"
#include "ostrovsky/stats.hpp"

using namespace ostrovsky;

namespace {

InvarianceOptions small_invariance(std::size_t M, std::vector<double> times) {
  InvarianceOptions o;
  o.sim.N = 8;
  o.sim.dt = 1e-3;
  o.sim.seed = 21;
  o.samples = M;
  o.times = std::move(times);
  return o;
}

}  // namespace

TEST_SUITE("measure") {

TEST_CASE("splitmix64 reference outputs") {
  // First two outputs of the SplitMix64 generator seeded with 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
  CHECK(member_seed(5, 3) == splitmix64(splitmix64(5) + 3));
}

TEST_CASE("member seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base : {0ULL, 1ULL, 2ULL}) {
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(member_seed(base, i));
  }
  CHECK(seen.size() == 30000);
}

TEST_CASE("sampler is deterministic") {
  CHECK(sample_white_noise(16, 9) == sample_white_noise(16, 9));
  CHECK_FALSE(sample_white_noise(16, 9) == sample_white_noise(16, 10));
  CHECK_THROWS_AS(sample_white_noise(0, 1), std::invalid_argument);
  auto a = sample_white_noise(4, 3);
  CHECK(a[0] == Complex{});
}

TEST_CASE("sampler moments") {
  const int N = 32;
  const std::size_t M = 100000;
  std::vector<double> sq(N + 1, 0.0), re(N + 1, 0.0), im(N + 1, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    auto s = sample_white_noise(N, member_seed(1, i));
    for (int n = 1; n <= N; ++n) {
      sq[n] += std::norm(s[n]);
      re[n] += s[n].real();
      im[n] += s[n].imag();
    }
  }
  const double tol = 3.0 * 2.0 / std::sqrt(static_cast<double>(M));
  for (int n = 1; n <= N; ++n) {
    CHECK(std::abs(sq[n] / M - 2.0) < tol);
    CHECK(std::abs(re[n] / M) < 3.0 / std::sqrt(static_cast<double>(M)));
    CHECK(std::abs(im[n] / M) < 3.0 / std::sqrt(static_cast<double>(M)));
  }
}

TEST_CASE("distinct seeds give uncorrelated streams") {
  const std::size_t M = 20000;
  const int N = 8;
  for (std::uint64_t pair = 0; pair < 4; ++pair) {
    double cross = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      auto a = sample_white_noise(N, member_seed(100 + 2 * pair, i));
      auto b = sample_white_noise(N, member_seed(101 + 2 * pair, i));
      cross += a[3].real() * b[3].real();
    }
    CHECK(std::abs(cross / M) < 3.0 / std::sqrt(static_cast<double>(M)));
  }
}

TEST_CASE("log density") {
  CHECK(log_density(SpectralState(4)) == 0.0);
  SpectralState s(1);
  s.set_mode(1, 1.0);
  CHECK(log_density(s) == -0.5);
  auto w = sample_white_noise(10, 4);
  CHECK(log_density(w) == doctest::Approx(-0.5 * mode_energy(w)).epsilon(1e-15));
}

TEST_CASE("ensemble sampling and persistence") {
  SimConfig c;
  c.N = 4;
  c.seed = 77;
  auto ens = sample_ensemble(c, 5, 2);
  REQUIRE(ens.members.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(ens.member_seeds[i] == member_seed(77, i));
    CHECK(ens.members[i] == sample_white_noise(4, member_seed(77, i)));
  }
  CHECK(sample_ensemble(c, 5, 1).members == ens.members);
  auto dir = test::scratch_dir("ensemble");
  auto files = save_ensemble(dir, ens);
  CHECK(std::filesystem::exists(dir / "ensemble.json"));
  auto back = load_trajectory(dir / "member_3");
  CHECK(back.snapshots.front() == ens.members[3]);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
}

TEST_CASE("invariance at time zero passes trivially") {
  auto o = small_invariance(1000, {0.0});
  o.sim.seed = 1;
  auto r = invariance_test(o);
  CHECK(r.verdict() == Verdict::Pass);
  CHECK(r.used == 1000);
  CHECK(r.failures.empty());
  CHECK_FALSE(r.rows.empty());
  for (const auto& row : r.rows) CHECK(row.time == 0.0);

  // The moment statistic at t = 0 is the plain ensemble mean of |a_n|^2.
  std::vector<double> mean(9, 0.0);
  for (std::size_t i = 0; i < 1000; ++i) {
    auto s = sample_white_noise(8, member_seed(1, i));
    for (int n = 1; n <= 8; ++n) mean[n] += std::norm(s[n]) / 1000.0;
  }
  for (const auto& row : r.rows) {
    if (row.observable == "second_moment") CHECK(row.statistic == doctest::Approx(mean[row.mode]).epsilon(1e-12));
  }
}

TEST_CASE("invariance under the linear flow") {
  auto o = small_invariance(400, {0.5, 3.0});
  o.sim.physics = Physics::LinearOnly;
  auto r = invariance_test(o);
  CHECK(r.verdict() == Verdict::Pass);
  std::set<std::string> observables;
  for (const auto& row : r.rows) observables.insert(row.observable);
  CHECK(observables == std::set<std::string>{"chi_square_energy", "ks_im", "ks_re", "second_moment"});
}

TEST_CASE("invariance under the full flow at small size") {
  auto r = invariance_test(small_invariance(300, {0.2}));
  CHECK(r.verdict() == Verdict::Pass);
  CHECK(r.used + r.failures.size() == 300);
}

TEST_CASE("invariance report is independent of the worker count") {
  auto o = small_invariance(120, {0.1});
  o.jobs = 1;
  auto a = invariance_test(o);
  o.jobs = 4;
  auto b = invariance_test(o);
  std::ostringstream sa, sb;
  write_report_csv(sa, a);
  write_report_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("observable,mode,time,statistic,p_value,std_error,threshold,pass\n", 0) == 0);
}

TEST_CASE("invariance marks heavy exclusion as inconclusive") {
  auto o = small_invariance(100, {0.1});
  o.sim.dt = 0.5;  // above the CFL bound of nearly every draw
  auto r = invariance_test(o);
  CHECK(r.failures.size() > 20);
  CHECK(r.inconclusive);
  CHECK(r.verdict() == Verdict::Inconclusive);
}

TEST_CASE("invariance preconditions") {
  CHECK_THROWS_AS(invariance_test(small_invariance(99, {0.0})), std::invalid_argument);
  CHECK_THROWS_AS(invariance_test(small_invariance(100, {})), std::invalid_argument);
  CHECK_THROWS_AS(invariance_test(small_invariance(100, {-1.0})), std::invalid_argument);
  auto o = small_invariance(100, {0.0});
  o.ks_modes = {9};
  CHECK_THROWS_AS(invariance_test(o), std::invalid_argument);
}

TEST_CASE("invariance detects a wrong law") {
  // A dt far beyond the accuracy regime but within the CFL bound distorts the
  // moments at long times; the report must not pass silently.
  auto o = small_invariance(400, {2.0});
  o.sim.N = 16;
  o.sim.dt = 2e-3;
  auto r = invariance_test(o);
  CHECK(r.verdict() != Verdict::Pass);
}

TEST_CASE("tail exceedance is monotone and the fit is well formed") {
  TailOptions o;
  o.N = 16;
  o.samples = 20000;
  o.seed = 8;
  auto r = tail_test(o);
  REQUIRE(r.points.size() == 32);
  CHECK(r.points.front().K == 0.25);
  CHECK(r.points.back().K == 8.0);
  for (std::size_t k = 1; k < r.points.size(); ++k) CHECK(r.points[k].exceedance <= r.points[k - 1].exceedance);
  for (const auto& pt : r.points) {
    if (pt.used_in_fit) {
      CHECK(pt.exceedance >= 10.0 / o.samples);
      CHECK(pt.exceedance <= 0.5);
    }
  }
  CHECK(r.c > 0.0);
  CHECK(r.verdict() == Verdict::Pass);
}

TEST_CASE("tail below the median") {
  TailOptions o;
  o.N = 16;
  o.samples = 10000;
  o.seed = 9;
  std::vector<double> norms;
  BesovSupEvaluator eval(o.N, o.s, o.p);
  for (std::size_t i = 0; i < o.samples; ++i) norms.push_back(eval(sample_white_noise(o.N, member_seed(o.seed, i)).modes()));
  std::sort(norms.begin(), norms.end());
  const double median = stats::empirical_quantile(norms, 0.5);
  o.K_grid = {0.5 * median, 0.99 * median, 2.0 * median};
  auto r = tail_test(o);
  CHECK(r.points[0].exceedance >= 0.5);
  CHECK(r.points[1].exceedance >= 0.5);
  CHECK(r.points[2].exceedance < 0.5);
  CHECK(r.degenerate);
  CHECK(r.verdict() == Verdict::Inconclusive);
  o.samples = 9999;
  CHECK_THROWS_AS(tail_test(o), std::invalid_argument);
}

TEST_CASE("growth quantiles") {
  GrowthOptions o;
  o.sim.N = 8;
  o.sim.dt = 1e-3;
  o.sim.seed = 10;
  o.samples = 60;
  o.horizons = {0.05, 0.1};
  o.eps_grid = {1.0, 0.5, 0.1};
  auto r = growth_test(o);
  REQUIRE(r.points.size() == 6);
  CHECK(r.used == 60);
  CHECK(r.monotone);

  // eps = 1 pins the quantile to the minimum over members of the running sup.
  std::vector<double> sup_at_T1;
  BesovSupEvaluator eval(o.sim.N, o.s, o.p);
  for (std::size_t i = 0; i < o.samples; ++i) {
    auto a0 = sample_white_noise(o.sim.N, member_seed(o.sim.seed, i));
    double sup = eval(a0.modes());
    SimConfig c = o.sim;
    c.T = 0.05;
    integrate_through(a0, c, std::vector<double>{0.05}, {},
                      [&](double, std::span<const Complex> m) { sup = std::max(sup, eval(m)); });
    sup_at_T1.push_back(sup);
  }
  const auto& first = r.points.front();
  CHECK(first.eps == 1.0);
  CHECK(first.T == 0.05);
  CHECK(first.quantile == *std::min_element(sup_at_T1.begin(), sup_at_T1.end()));
  for (std::size_t k = 1; k < 3; ++k) CHECK(r.points[k].quantile >= r.points[k - 1].quantile);

  o.eps_grid = {0.0};
  CHECK_THROWS_AS(growth_test(o), std::invalid_argument);
  o.eps_grid = {1.5};
  CHECK_THROWS_AS(growth_test(o), std::invalid_argument);
}

}
