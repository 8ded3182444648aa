#include "ostrovsky/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include "ostrovsky/parallel.hpp"
#include "ostrovsky/spectrum_io.hpp"
#include "ostrovsky/stats.hpp"

namespace ostrovsky {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t member_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) + index);
}

SpectralState sample_white_noise(int N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("sample_white_noise: N must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> modes(static_cast<std::size_t>(N));
  for (auto& z : modes) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z = {re, im};
  }
  return SpectralState(std::move(modes));
}

double log_density(const SpectralState& state) {
  double sum = 0.0;
  for (const auto& z : state.modes()) sum += std::norm(z);
  return -0.5 * sum;
}

Ensemble sample_ensemble(const SimConfig& config, std::size_t M, int jobs) {
  Ensemble ens{config, {}, {}, {}};
  ens.member_seeds.resize(M);
  for (std::size_t i = 0; i < M; ++i) ens.member_seeds[i] = member_seed(config.seed, i);
  std::vector<std::vector<Complex>> drawn(M);
  parallel_for(M, jobs, [&](std::size_t i) {
    const auto st = sample_white_noise(config.N, ens.member_seeds[i]);
    drawn[i].assign(st.modes().begin(), st.modes().end());
  });
  ens.members.reserve(M);
  for (auto& d : drawn) ens.members.emplace_back(std::move(d));
  return ens;
}

std::vector<std::filesystem::path> save_ensemble(const std::filesystem::path& dir,
                                                 const Ensemble& ensemble) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  nlohmann::json meta;
  meta["N"] = ensemble.config.N;
  meta["seed"] = ensemble.config.seed;
  meta["members"] = ensemble.members.size();
  meta["member_seeds"] = ensemble.member_seeds;
  meta["failures"] = ensemble.failures;
  const auto meta_path = dir / "ensemble.json";
  {
    std::ofstream os(meta_path);
    if (!os) throw std::runtime_error("save_ensemble: cannot write " + meta_path.string());
    os << meta.dump(2) << '\n';
  }
  written.push_back(meta_path);
  for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
    SimConfig cfg = ensemble.config;
    cfg.T = 0.0;
    cfg.seed = i < ensemble.member_seeds.size() ? ensemble.member_seeds[i] : 0;
    Trajectory single{cfg, {0.0}, {ensemble.members[i]}};
    const auto files =
        save_trajectory(dir / ("member_" + std::to_string(i)), single);
    written.insert(written.end(), files.begin(), files.end());
  }
  return written;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

bool survived_enough(std::size_t used, std::size_t requested) {
  return static_cast<double>(used) >= kMinSurvivingFraction * static_cast<double>(requested);
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Runs `body` for each member, excluding members whose initial CFL bound is
// below dt or which blow up. Returns per-member success flags.
template <typename Body>
std::vector<char> run_members(std::size_t M, const SimConfig& sim, int jobs, Body&& body) {
  std::vector<char> ok(M, 0);
  parallel_for(M, jobs, [&](std::size_t i) {
    const auto a0 = sample_white_noise(sim.N, member_seed(sim.seed, i));
    if (sim.physics == Physics::Full && sim.dt > cfl_bound(a0)) return;
    try {
      body(i, a0);
      ok[i] = 1;
    } catch (const BlowUpError&) {
    }
  });
  return ok;
}

}  // namespace

// ---------------------------------------------------------------- invariance

std::size_t InvarianceReport::failed_rows() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const TestRow& r) { return !r.pass; }));
}

Verdict InvarianceReport::verdict() const {
  if (inconclusive) return Verdict::Inconclusive;
  return failed_rows() == 0 ? Verdict::Pass : Verdict::Fail;
}

InvarianceReport invariance_test(const InvarianceOptions& options) {
  const SimConfig& sim = options.sim;
  sim.validate();
  const std::size_t M = options.samples;
  if (M < 100) throw std::invalid_argument("invariance_test: need at least 100 samples");
  if (options.times.empty()) throw std::invalid_argument("invariance_test: no times given");
  const int N = sim.N;
  std::vector<int> ks_modes = options.ks_modes;
  if (ks_modes.empty()) {
    for (int n = 1; n <= N; ++n) ks_modes.push_back(n);
  }
  for (int n : ks_modes) {
    if (n < 1 || n > N) throw std::invalid_argument("invariance_test: KS mode out of range");
  }

  InvarianceReport report;
  report.requested = M;
  report.times = sorted_unique(options.times);
  if (report.times.front() < 0.0) throw std::invalid_argument("invariance_test: negative time");
  const std::size_t nt = report.times.size();

  // evolved[k][i] holds member i at times[k].
  std::vector<std::vector<std::vector<Complex>>> evolved(nt, std::vector<std::vector<Complex>>(M));
  const auto ok = run_members(M, sim, options.jobs, [&](std::size_t i, const SpectralState& a0) {
    integrate_through(a0, sim, report.times, [&](std::size_t k, const SpectralState& st) {
      evolved[k][i].assign(st.modes().begin(), st.modes().end());
    });
  });
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < M; ++i) {
    if (ok[i]) used.push_back(i);
    else report.failures.push_back(i);
  }
  report.used = used.size();
  report.inconclusive = !survived_enough(report.used, M) || used.size() < 2;
  if (used.size() < 2) return report;

  std::vector<std::vector<Complex>> fresh(M);
  parallel_for(M, options.jobs, [&](std::size_t i) {
    const auto st = sample_white_noise(N, member_seed(sim.seed, M + i));
    fresh[i].assign(st.modes().begin(), st.modes().end());
  });

  const double ks_level = options.alpha / static_cast<double>(2 * ks_modes.size() * nt);
  const double chi_level = options.alpha / static_cast<double>(nt);
  const boost::math::chi_squared energy_law(2.0 * N);
  const auto energy_quantile = [&](double q) { return boost::math::quantile(energy_law, q); };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> x(used.size()), y(M);
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = report.times[k];
    const auto& states = evolved[k];
    for (int n = 1; n <= N; ++n) {
      const auto idx = static_cast<std::size_t>(n - 1);
      for (std::size_t u = 0; u < used.size(); ++u) x[u] = std::norm(states[used[u]][idx]);
      const auto est = stats::mean_estimate(x);
      const double tol = options.moment_sigmas * est.std_error;
      const double dev = std::abs(est.mean - 2.0);
      report.rows.push_back({"second_moment", n, t, est.mean, nan, est.std_error, tol, dev <= tol});
    }
    for (int n : ks_modes) {
      const auto idx = static_cast<std::size_t>(n - 1);
      for (int part = 0; part < 2; ++part) {
        const auto component = [part](const Complex& z) { return part == 0 ? z.real() : z.imag(); };
        for (std::size_t u = 0; u < used.size(); ++u) x[u] = component(states[used[u]][idx]);
        for (std::size_t i = 0; i < M; ++i) y[i] = component(fresh[i][idx]);
        const auto ks = stats::ks_two_sample(x, y);
        report.rows.push_back({part == 0 ? "ks_re" : "ks_im", n, t, ks.statistic, ks.p_value, nan,
                               ks_level, ks.p_value >= ks_level});
      }
    }
    for (std::size_t u = 0; u < used.size(); ++u) {
      double e = 0.0;
      for (const auto& z : states[used[u]]) e += std::norm(z);
      x[u] = e;
    }
    const auto chi = stats::chi_square_gof(x, options.chi_square_bins, energy_quantile);
    report.rows.push_back({"chi_square_energy", 0, t, chi.statistic, chi.p_value, nan, chi_level,
                           chi.p_value >= chi_level});
  }
  return report;
}

void write_report_csv(std::ostream& os, const InvarianceReport& report) {
  os << "observable,mode,time,statistic,p_value,std_error,threshold,pass\n";
  for (const auto& r : report.rows) {
    os << r.observable << ',' << r.mode << ',' << format_real(r.time) << ','
       << format_real(r.statistic) << ',' << format_real(r.p_value) << ','
       << format_real(r.std_error) << ',' << format_real(r.threshold) << ','
       << (r.pass ? 1 : 0) << '\n';
  }
}

// ---------------------------------------------------------------------- tail

BesovSupEvaluator::BesovSupEvaluator(int N, double s, double p)
    : half_p_(0.5 * p), inv_p_(1.0 / p) {
  if (!(p > 1.0)) throw std::invalid_argument("BesovSupEvaluator: p must be > 1");
  for (int n = 1; n <= N; ++n) {
    weight_.push_back(2.0 * std::pow(1.0 + double(n) * n, 0.5 * s * p));
    block_.push_back(dyadic_block(n));
  }
  acc_.assign(N >= 1 ? static_cast<std::size_t>(dyadic_block(N) + 1) : 0, 0.0);
}

double BesovSupEvaluator::operator()(std::span<const Complex> modes) {
  if (modes.size() != weight_.size()) {
    throw std::invalid_argument("BesovSupEvaluator: spectrum length mismatch");
  }
  std::fill(acc_.begin(), acc_.end(), 0.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    acc_[static_cast<std::size_t>(block_[k])] += weight_[k] * std::pow(std::norm(modes[k]), half_p_);
  }
  double sup = 0.0;
  for (double b : acc_) sup = std::max(sup, b);
  return std::pow(sup, inv_p_);
}

Verdict TailReport::verdict() const {
  if (degenerate) return Verdict::Inconclusive;
  return c > 0.0 && r_squared > options.min_r_squared ? Verdict::Pass : Verdict::Fail;
}

TailReport tail_test(const TailOptions& options) {
  if (options.N < 1) throw std::invalid_argument("tail_test: N must be >= 1");
  if (options.samples < 10000) throw std::invalid_argument("tail_test: need at least 10^4 samples");
  TailReport report;
  report.options = options;
  if (report.options.K_grid.empty()) {
    for (int k = 1; k <= 32; ++k) report.options.K_grid.push_back(0.25 * k);
  }
  const std::size_t M = options.samples;
  std::vector<double> norms(M);
  parallel_for(M, options.jobs, [&](std::size_t i) {
    BesovSupEvaluator eval(options.N, options.s, options.p);
    norms[i] = eval(sample_white_noise(options.N, member_seed(options.seed, i)).modes());
  });
  std::sort(norms.begin(), norms.end());

  std::vector<double> kk, logp;
  for (double K : sorted_unique(report.options.K_grid)) {
    const auto above = norms.end() - std::upper_bound(norms.begin(), norms.end(), K);
    const double P = static_cast<double>(above) / static_cast<double>(M);
    const bool usable = P >= 10.0 / static_cast<double>(M) && P <= 0.5;
    report.points.push_back({K, P, usable});
    if (usable) {
      kk.push_back(K * K);
      logp.push_back(std::log(P));
    }
  }
  report.fit_points = kk.size();
  report.degenerate = kk.size() < 3;
  if (!report.degenerate) {
    const auto fit = stats::linear_fit(kk, logp);
    report.c = -fit.slope;
    report.intercept = fit.intercept;
    report.r_squared = fit.r_squared;
  }
  return report;
}

void write_report_csv(std::ostream& os, const TailReport& report) {
  os << "K,exceedance,used_in_fit\n";
  for (const auto& pt : report.points) {
    os << format_real(pt.K) << ',' << format_real(pt.exceedance) << ',' << (pt.used_in_fit ? 1 : 0)
       << '\n';
  }
}

// -------------------------------------------------------------------- growth

Verdict GrowthReport::verdict() const {
  if (inconclusive) return Verdict::Inconclusive;
  return slope > 0.0 && monotone && log_ordered && sublinear_in_T ? Verdict::Pass : Verdict::Fail;
}

GrowthReport growth_test(const GrowthOptions& options) {
  SimConfig sim = options.sim;
  GrowthReport report;
  report.options = options;
  report.options.horizons = sorted_unique(options.horizons);
  // Largest eps first, so quantiles should come out nondecreasing.
  report.options.eps_grid = sorted_unique(options.eps_grid);
  std::reverse(report.options.eps_grid.begin(), report.options.eps_grid.end());
  const auto& horizons = report.options.horizons;
  const auto& eps_grid = report.options.eps_grid;
  if (horizons.empty() || horizons.front() <= 0.0) {
    throw std::invalid_argument("growth_test: horizons must be positive");
  }
  if (eps_grid.empty() || eps_grid.back() <= 0.0 || eps_grid.front() > 1.0) {
    throw std::invalid_argument("growth_test: eps values must lie in (0, 1]");
  }
  sim.T = horizons.back();
  sim.validate();
  const std::size_t M = options.samples;
  if (M < 1) throw std::invalid_argument("growth_test: need at least one sample");

  // running_sup[i][h]: sup over t <= horizons[h] for member i.
  std::vector<std::vector<double>> running_sup(M);
  const auto ok = run_members(M, sim, options.jobs, [&](std::size_t i, const SpectralState& a0) {
    BesovSupEvaluator eval(sim.N, options.s, options.p);
    double sup = eval(a0.modes());
    std::vector<double> at(horizons.size());
    integrate_through(
        a0, sim, horizons, [&](std::size_t h, const SpectralState&) { at[h] = sup; },
        [&](double, std::span<const Complex> modes) { sup = std::max(sup, eval(modes)); });
    running_sup[i] = std::move(at);
  });
  for (std::size_t i = 0; i < M; ++i) {
    if (!ok[i]) report.failures.push_back(i);
  }
  report.used = M - report.failures.size();
  report.inconclusive = !survived_enough(report.used, M) || report.used == 0;
  if (report.used == 0) return report;

  std::vector<double> x, y;
  std::vector<std::vector<double>> q2(horizons.size());
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    std::vector<double> v;
    for (std::size_t i = 0; i < M; ++i) {
      if (ok[i]) v.push_back(running_sup[i][h]);
    }
    std::sort(v.begin(), v.end());
    for (double eps : eps_grid) {
      const double q = stats::empirical_quantile(v, 1.0 - eps);
      const double l = std::log(horizons[h] / eps);
      report.points.push_back({horizons[h], eps, q, l});
      x.push_back(l);
      y.push_back(q * q);
      q2[h].push_back(q * q);
    }
  }

  report.monotone = true;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      if (e > 0 && q2[h][e] < q2[h][e - 1]) report.monotone = false;
      if (h > 0 && q2[h][e] < q2[h - 1][e]) report.monotone = false;
    }
  }

  const bool fittable = std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end();
  if (!fittable) return report;
  const auto fit = stats::linear_fit(x, y);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.rmse = fit.rmse;

  const double slack = 3.0 * fit.rmse;
  std::vector<std::size_t> order(x.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  report.log_ordered = true;
  double running_max = -std::numeric_limits<double>::infinity();
  for (auto k : order) {
    if (y[k] < running_max - slack) report.log_ordered = false;
    running_max = std::max(running_max, y[k]);
  }

  report.sublinear_in_T = true;
  for (std::size_t h = 1; h < horizons.size(); ++h) {
    const double ratio = horizons[h] / horizons[h - 1];
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      const double lo = q2[h - 1][e], hi = q2[h][e];
      if (hi - lo > std::max(fit.slope, 0.0) * std::log(ratio) + slack) report.sublinear_in_T = false;
      if (lo > 0.0 && hi / lo >= ratio) report.sublinear_in_T = false;
    }
  }
  return report;
}

void write_report_csv(std::ostream& os, const GrowthReport& report) {
  os << "T,eps,quantile,quantile_squared,log_T_over_eps\n";
  for (const auto& pt : report.points) {
    os << format_real(pt.T) << ',' << format_real(pt.eps) << ',' << format_real(pt.quantile) << ','
       << format_real(pt.quantile * pt.quantile) << ',' << format_real(pt.log_T_over_eps) << '\n';
  }
}

}  // namespace ostrovsky
