#include "ostrovsky/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ostrovsky/parallel.hpp"
#include "ostrovsky/spectral.hpp"
#include "ostrovsky/spectrum_io.hpp"

namespace ostrovsky::estimates {

namespace {

double bracket(double x) { return std::sqrt(1.0 + x * x); }

double relative_change(double from, double to) {
  const double scale = std::max(std::abs(from), std::abs(to));
  return scale == 0.0 ? 0.0 : std::abs(to - from) / scale;
}

constexpr double kStableTolerance = 0.01;

}  // namespace

double EstimateReport::field(const std::string& name) const {
  for (const auto* group : {&witness, &ranges, &details}) {
    for (const auto& [key, v] : *group) {
      if (key == name) return v;
    }
  }
  throw std::out_of_range("EstimateReport: no field '" + name + "'");
}

void write_report_csv(std::ostream& os, const EstimateReport& report) {
  os << "# lemma=" << report.lemma << '\n';
  os << "# " << report.value_name << '=' << format_real(report.value) << '\n';
  os << "# pass=" << (report.pass ? 1 : 0) << '\n';
  for (const auto& [k, v] : report.ranges) os << "# range." << k << '=' << format_real(v) << '\n';
  for (const auto& [k, v] : report.witness) os << "# witness." << k << '=' << format_real(v) << '\n';
  for (const auto& [k, v] : report.details) os << "# " << k << '=' << format_real(v) << '\n';
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    os << (c ? "," : "") << report.columns[c];
  }
  os << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_real(row[c]);
    os << '\n';
  }
}

std::string verdict_line(const EstimateReport& report) {
  std::ostringstream os;
  os << report.lemma << ' ' << (report.pass ? "PASS" : "FAIL") << ' ' << report.value_name << '='
     << format_real(report.value) << " witness=(";
  for (std::size_t i = 0; i < report.witness.size(); ++i) {
    os << (i ? ", " : "") << report.witness[i].first << '=' << format_real(report.witness[i].second);
  }
  os << ')';
  return os.str();
}

// ------------------------------------------------------------- resonance

double resonance_gap(int n, int n1, double tau, double tau1) {
  const int n2 = n - n1;
  if (n == 0 || n1 == 0 || n2 == 0) {
    throw std::domain_error("resonance_gap: n, n1 and n - n1 must be nonzero");
  }
  return std::max({std::abs(tau + dispersion(n)), std::abs(tau1 + dispersion(n1)),
                   std::abs(tau - tau1 + dispersion(n2))});
}

double resonance_defect(int n, int n1) {
  const int n2 = n - n1;
  if (n == 0 || n1 == 0 || n2 == 0) {
    throw std::domain_error("resonance_defect: n, n1 and n - n1 must be nonzero");
  }
  return dispersion(n) - dispersion(n1) - dispersion(n2);
}

std::pair<double, double> resonance_worst_tau(int n, int n1) {
  const double d = resonance_defect(n, n1);
  return {d / 3.0 - dispersion(n), -d / 3.0 - dispersion(n1)};
}

EstimateReport resonance_min_ratio(int L, int jobs) {
  if (L < 2) throw std::invalid_argument("resonance_min_ratio: L must be >= 2");
  std::vector<int> levels;
  for (int l = 2; l < L; l *= 2) levels.push_back(l);
  if (L / 2 >= 2) levels.push_back(L / 2);
  levels.push_back(L);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  struct Best {
    double ratio = std::numeric_limits<double>::infinity();
    int n = 0, n1 = 0;
  };
  // best[n index][level]: minimum over pairs whose larger |.| first fits that level.
  std::vector<std::vector<Best>> best(static_cast<std::size_t>(2 * L),
                                      std::vector<Best>(levels.size()));
  parallel_for(best.size(), jobs, [&](std::size_t idx) {
    const int n = static_cast<int>(idx) < L ? static_cast<int>(idx) - L : static_cast<int>(idx) - L + 1;
    for (int n1 = -L; n1 <= L; ++n1) {
      if (n1 == 0 || n1 == n) continue;
      const int n2 = n - n1;
      const double prod = std::abs(double(n) * n1 * n2);
      const double ratio = std::abs(resonance_defect(n, n1)) / (3.0 * prod);
      const int reach = std::max(std::abs(n), std::abs(n1));
      const auto lv = static_cast<std::size_t>(
          std::lower_bound(levels.begin(), levels.end(), reach) - levels.begin());
      if (ratio < best[idx][lv].ratio) best[idx][lv] = {ratio, n, n1};
    }
  });

  std::vector<Best> per_level(levels.size());
  for (std::size_t lv = 0; lv < levels.size(); ++lv) {
    if (lv > 0) per_level[lv] = per_level[lv - 1];
    for (const auto& row : best) {
      if (row[lv].ratio < per_level[lv].ratio) per_level[lv] = row[lv];
    }
  }

  EstimateReport r;
  r.lemma = "resonance";
  r.ranges = {{"L", double(L)}};
  r.value_name = "min_ratio";
  r.columns = {"L", "min_ratio", "n", "n1"};
  for (std::size_t lv = 0; lv < levels.size(); ++lv) {
    r.rows.push_back({double(levels[lv]), per_level[lv].ratio, double(per_level[lv].n),
                      double(per_level[lv].n1)});
  }
  const Best& w = per_level.back();
  const auto [tau, tau1] = resonance_worst_tau(w.n, w.n1);
  const double prod = std::abs(double(w.n) * w.n1 * (w.n - w.n1));
  r.value = resonance_gap(w.n, w.n1, tau, tau1) / prod;
  r.witness = {{"n", double(w.n)}, {"n1", double(w.n1)}, {"n2", double(w.n - w.n1)},
               {"tau", tau}, {"tau1", tau1}};
  bool stable = true;
  if (L / 2 >= 2) {
    const auto half = std::find(levels.begin(), levels.end(), L / 2) - levels.begin();
    const double change = relative_change(per_level[static_cast<std::size_t>(half)].ratio, r.value);
    r.details.push_back({"change_from_half_L", change});
    stable = change < kStableTolerance;
  }
  r.pass = std::isfinite(r.value) && r.value > 0.0 && stable;
  return r;
}

// ---------------------------------------------------------------- weight

std::vector<long long> weight_members(int n, double tau, double c0, WeightWindow window) {
  if (n == 0) throw std::domain_error("weight_members: n must be nonzero");
  if (!(c0 > 0.0)) throw std::invalid_argument("weight_members: c0 must be > 0");
  const double dn = n;
  const double w = tau - dispersion(n);
  const double bn = bracket(dn);

  double R = 0.0;  // half-width of the window for q(k) = (n-k)k around -w/(3n)
  if (window == WeightWindow::Curve) {
    const double top = c0 * std::pow(bn, 0.01);
    if (top <= 1.0) return {};
    R = std::sqrt(top * top - 1.0) / (3.0 * std::abs(dn));
  } else {
    R = c0 * std::pow(bn, -0.99);
  }
  const auto inside = [&](long long k) {
    const double q = (dn - double(k)) * double(k);
    if (window == WeightWindow::Curve) {
      return bracket(w + 3.0 * dn * q) < c0 * std::pow(bn, 0.01);
    }
    return std::abs(q + w / (3.0 * dn)) < R;
  };

  // q(k) = n^2/4 - (k - n/2)^2, so (k - n/2)^2 lies in (C - R, C + R).
  const double C = dn * dn / 4.0 + w / (3.0 * dn);
  if (C + R <= 0.0) return {};
  const double dlo = std::sqrt(std::max(0.0, C - R));
  const double dhi = std::sqrt(C + R);
  std::set<long long> found;
  for (const double sign : {1.0, -1.0}) {
    const double a = dn / 2.0 + sign * dlo, b = dn / 2.0 + sign * dhi;
    const auto lo = static_cast<long long>(std::floor(std::min(a, b))) - 1;
    const auto hi = static_cast<long long>(std::ceil(std::max(a, b))) + 1;
    for (long long k = lo; k <= hi; ++k) {
      if (k != 0 && inside(k)) found.insert(k);
    }
  }
  return {found.begin(), found.end()};
}

double weight_v(int n, double tau, double delta, double c0, WeightWindow window) {
  if (!(delta > 0.0)) throw std::invalid_argument("weight_v: delta must be > 0");
  double v = 1.0;
  for (long long k : weight_members(n, tau, c0, window)) {
    v += std::pow(std::min(bracket(double(k)), bracket(double(n - k))), delta);
  }
  return v;
}

namespace {

struct WeightSup {
  double ratio = 0.0;
  int n = 0;
  double tau = 0.0;
  std::size_t max_tight = 0;
};

std::vector<double> weight_offsets(double step) {
  std::set<double> off;
  const auto count = static_cast<int>(std::lround(4.0 / step));
  for (int i = -count; i <= count; ++i) off.insert(i * step);
  for (double o = 4.0; o <= 1e6; o *= 2.0) {
    off.insert(o);
    off.insert(-o);
  }
  return {off.begin(), off.end()};
}

WeightSup weight_scan(const WeightScanOptions& o, double step, double c0, bool count_tight) {
  std::vector<WeightSup> per_n(static_cast<std::size_t>(2 * o.n_max));
  const auto offsets = weight_offsets(step);
  parallel_for(per_n.size(), o.jobs, [&](std::size_t idx) {
    const int n = static_cast<int>(idx) < o.n_max ? static_cast<int>(idx) - o.n_max
                                                  : static_cast<int>(idx) - o.n_max + 1;
    const double mn = dispersion(n);
    std::vector<double> ws;
    for (int k = -o.k_span; k <= o.k_span; ++k) {
      const double shift = -3.0 * n * double(n - k) * k;
      for (double off : offsets) ws.push_back(shift + off);
    }
    for (int j = 0; j <= 24; ++j) {
      ws.push_back(std::pow(10.0, j / 2.0));
      ws.push_back(-std::pow(10.0, j / 2.0));
    }
    WeightSup best{0.0, n, mn, 0};
    for (double w : ws) {
      const double tau = mn + w;
      const double ratio =
          weight_v(n, tau, o.delta, c0) / std::pow(bracket(tau - mn), o.eps);
      if (ratio > best.ratio) best = {ratio, n, tau, best.max_tight};
      if (count_tight) {
        best.max_tight = std::max(best.max_tight,
                                  weight_members(n, tau, o.tight_c0, WeightWindow::Tight).size());
      }
    }
    per_n[idx] = best;
  });
  WeightSup sup;
  for (const auto& b : per_n) {
    if (b.ratio > sup.ratio) sup = {b.ratio, b.n, b.tau, sup.max_tight};
    sup.max_tight = std::max(sup.max_tight, b.max_tight);
  }
  return sup;
}

}  // namespace

EstimateReport weight_bound_check(const WeightScanOptions& o) {
  if (o.n_max < 1 || o.k_span < 0) throw std::invalid_argument("weight_bound_check: bad ranges");
  if (!(o.eps > 0.0) || !(o.delta > 0.0) || !(o.c0 > 0.0) || !(o.tight_c0 > 0.0)) {
    throw std::invalid_argument("weight_bound_check: eps, delta and c0 must be > 0");
  }
  const WeightSup coarse = weight_scan(o, 0.5, o.c0, true);
  const WeightSup fine = weight_scan(o, 0.25, o.c0, false);
  const WeightSup halved = weight_scan(o, 0.25, o.c0 / 2.0, false);

  EstimateReport r;
  r.lemma = "weight";
  r.ranges = {{"n_max", double(o.n_max)}, {"k_span", double(o.k_span)}, {"eps", o.eps},
              {"delta", o.delta}, {"c0", o.c0}, {"tight_c0", o.tight_c0}};
  r.value_name = "sup_ratio";
  r.value = weight_v(fine.n, fine.tau, o.delta, o.c0) /
            std::pow(bracket(fine.tau - dispersion(fine.n)), o.eps);
  r.witness = {{"n", double(fine.n)}, {"tau", fine.tau}};
  const double refine_change = relative_change(coarse.ratio, fine.ratio);
  r.details = {{"coarse_sup", coarse.ratio},
               {"refinement_change", refine_change},
               {"sup_at_half_c0", halved.ratio},
               {"max_tight_window_members", double(coarse.max_tight)},
               {"on_curve_v_n1", weight_v(1, dispersion(1), o.delta, o.c0)}};
  r.columns = {"grid_step", "c0", "sup_ratio"};
  r.rows = {{0.5, o.c0, coarse.ratio}, {0.25, o.c0, fine.ratio}, {0.25, o.c0 / 2.0, halved.ratio}};
  r.pass = std::isfinite(r.value) && refine_change < kStableTolerance &&
           halved.ratio <= fine.ratio && coarse.max_tight <= 2;
  return r;
}

// ------------------------------------------------------------------- gtv

namespace {

void check_gtv_hypotheses(double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= beta && alpha + beta > 0.5)) {
    throw std::invalid_argument("gtv: need 0 <= alpha <= beta and alpha + beta > 1/2");
  }
}

// int_R^inf <t>^{-2 alpha} <t - a>^{-2 beta} dt for R > 0, via t = 1/u.
double gtv_tail(double alpha, double beta, double a, double R) {
  const double e = 2.0 * alpha + 2.0 * beta - 2.0;
  auto g = [=](double u) {
    const double v = 1.0 - a * u;
    return std::pow(u, e) * std::pow(u * u + 1.0, -alpha) * std::pow(u * u + v * v, -beta);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(g, 0.0, 1.0 / R, 1e-13);
}

}  // namespace

double gtv_integral(double alpha, double beta, double a) {
  check_gtv_hypotheses(alpha, beta);
  if (!std::isfinite(a)) throw std::invalid_argument("gtv_integral: a must be finite");
  auto f = [=](double t) {
    return std::pow(1.0 + t * t, -alpha) * std::pow(1.0 + (t - a) * (t - a), -beta);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double p = std::min(0.0, a), q = std::max(0.0, a);
  std::vector<double> cuts{p - 1.0, p};
  if (q - p > 2.0) {
    cuts.push_back(p + 1.0);
    cuts.push_back(q - 1.0);
  }
  cuts.push_back(q);
  cuts.push_back(q + 1.0);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi - lo > 2.0) {
      boost::math::quadrature::tanh_sinh<double> integrator;
      total += integrator.integrate(f, lo, hi, 1e-13);
    } else {
      total += GK::integrate(f, lo, hi, 15, 1e-13);
    }
  }
  total += gtv_tail(alpha, beta, a, q + 1.0);
  total += gtv_tail(alpha, beta, -a, 1.0 - p);  // mirror t -> -t
  return total;
}

double gtv_gamma(double alpha, double beta, double eps) {
  const double x = 1.0 - 2.0 * beta;
  const double plus = x > 0.0 ? x : (x == 0.0 ? eps : 0.0);
  return 2.0 * alpha - plus;
}

EstimateReport gtv_bound_check(double alpha, double beta, double a_max, double eps) {
  check_gtv_hypotheses(alpha, beta);
  if (!(a_max >= 10.0)) throw std::invalid_argument("gtv_bound_check: a_max must be >= 10");
  if (!(eps > 0.0)) throw std::invalid_argument("gtv_bound_check: eps must be > 0");
  const double gamma = gtv_gamma(alpha, beta, eps);
  const int J = static_cast<int>(std::lround(4.0 * std::log10(a_max)));
  std::vector<double> grid{0.0};
  for (int j = 0; j <= J; ++j) grid.push_back(std::pow(10.0, j / 4.0));

  std::vector<double> scaled(grid.size()), values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = gtv_integral(alpha, beta, grid[i]);
    scaled[i] = values[i] * std::pow(bracket(grid[i]), gamma);
  }
  std::size_t best = 0, best_short = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (scaled[i] > scaled[best]) best = i;
    if (grid[i] <= grid.back() / 10.0 * (1.0 + 1e-12) && scaled[i] > scaled[best_short]) best_short = i;
  }

  EstimateReport r;
  r.lemma = "gtv";
  r.ranges = {{"alpha", alpha}, {"beta", beta}, {"a_max", grid.back()}, {"eps", eps}};
  r.value_name = "sup_scaled";
  r.value = gtv_integral(alpha, beta, grid[best]) * std::pow(bracket(grid[best]), gamma);
  r.witness = {{"a", grid[best]}};
  const double change = relative_change(scaled[best_short], scaled[best]);
  r.details = {{"gamma", gamma}, {"value_at_a0", values[0]}, {"last_decade_change", change}};
  r.columns = {"a", "integral", "scaled"};
  for (std::size_t i = 0; i < grid.size(); ++i) r.rows.push_back({grid[i], values[i], scaled[i]});
  r.pass = std::isfinite(r.value) && change < kStableTolerance;
  return r;
}

// ------------------------------------------------------------ multiplier

namespace {

void check_multiplier_hypotheses(double l1, double l2) {
  if (!(l1 > 0.0 && l2 > 0.0 && l1 + 2.0 * l2 > 1.0)) {
    throw std::invalid_argument("multiplier_sum: need l1, l2 > 0 and l1 + 2 l2 > 1");
  }
}

struct Summand {
  double l1, l2, n, lambda;
  double operator()(double x) const {
    const double p = lambda + x * (n - x);
    return std::pow(1.0 + x * x, -0.5 * l1) * std::pow(1.0 + p * p, -0.5 * l2);
  }
  // log f(x), usable where x^2 overflows.
  double log_at(double x) const {
    const double ax = std::abs(x);
    if (ax < 1e100) return std::log((*this)(x));
    const double lx = std::log(ax);
    const double lp = 2.0 * lx + std::log(std::abs(1.0 - n / x - lambda / (x * x)));
    return -l1 * lx - l2 * lp;
  }
};

// int_K^inf f(sign x) dx via x = K / t, dx = x^2 / K dt.
double summand_tail(const Summand& f, double K, double sign) {
  auto g = [&](double t) {
    const double x = K / t;
    if (!std::isfinite(x)) return 0.0;
    return std::exp(f.log_at(sign * x) + 2.0 * std::log(x) - std::log(K));
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(g, 0.0, 1.0, 1e-12);
}

}  // namespace

MultiplierSum multiplier_sum(double l1, double l2, int n, double lambda, double gap,
                             long long max_cutoff) {
  check_multiplier_hypotheses(l1, l2);
  if (n == 0) throw std::invalid_argument("multiplier_sum: n must be nonzero");
  if (!std::isfinite(lambda) || !(gap > 0.0)) {
    throw std::invalid_argument("multiplier_sum: lambda must be finite and gap > 0");
  }
  const Summand f{l1, l2, double(n), lambda};
  // Past this point both factors decrease in |x| on either side.
  auto K = static_cast<long long>(std::ceil(std::abs(n) + 2.0 * std::sqrt(std::abs(lambda)) + 2.0));
  while (f(double(K)) + f(-double(K)) >= gap && K < max_cutoff) K = std::min(2 * K, max_cutoff);

  MultiplierSum out;
  out.cutoff = K;
  double sum = 0.0;
  for (long long m = K; m >= 1; --m) {
    if (m != n) sum += f(double(m));
    if (-m != n) sum += f(-double(m));
  }
  out.partial = sum;
  const double k = double(K);
  out.tail_upper = summand_tail(f, k, 1.0) + summand_tail(f, k, -1.0);
  out.tail_lower = summand_tail(f, k + 1.0, 1.0) + summand_tail(f, k + 1.0, -1.0);
  return out;
}

namespace {

struct SupResult {
  double value = 0.0;
  int n = 0;
  double lambda = 0.0;
  std::vector<std::vector<double>> rows;  // n, lambda, sup for that n
};

SupResult multiplier_search(const MultiplierSearchOptions& o, double step) {
  std::vector<SupResult> per_n(static_cast<std::size_t>(2 * o.n_max));
  parallel_for(per_n.size(), o.jobs, [&](std::size_t idx) {
    const int n = static_cast<int>(idx) < o.n_max ? static_cast<int>(idx) - o.n_max
                                                  : static_cast<int>(idx) - o.n_max + 1;
    auto eval = [&](double lambda) { return multiplier_sum(o.l1, o.l2, n, lambda, o.gap).upper(); };
    std::set<double> cand;
    const double reach = std::sqrt(o.lambda_max + n * n / 4.0) + 1.0;
    std::vector<double> roots;
    for (auto k = static_cast<long long>(std::floor(n / 2.0 - reach));
         k <= static_cast<long long>(std::ceil(n / 2.0 + reach)); ++k) {
      const double lam = double(k) * double(k - n);
      if (std::abs(lam) <= o.lambda_max) roots.push_back(lam);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    for (std::size_t i = 0; i < roots.size(); ++i) {
      cand.insert(roots[i]);
      if (i + 1 < roots.size()) cand.insert(0.5 * (roots[i] + roots[i + 1]));
    }
    const auto steps = static_cast<long long>(std::floor(2.0 * o.lambda_max / step));
    for (long long i = 0; i <= steps; ++i) cand.insert(-o.lambda_max + double(i) * step);

    std::vector<std::pair<double, double>> scored;
    for (double lam : cand) scored.push_back({eval(lam), lam});
    std::sort(scored.begin(), scored.end(), [](auto& a, auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    double best = scored.front().first, best_lam = scored.front().second;
    // Golden-section refinement on [lam - step, lam + step] around the top few.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t c = 0; c < std::min<std::size_t>(3, scored.size()); ++c) {
      double lo = std::max(-o.lambda_max, scored[c].second - step);
      double hi = std::min(o.lambda_max, scored[c].second + step);
      double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < 40 && hi - lo > 1e-9; ++it) {
        if (f1 > f2) {
          hi = x2; x2 = x1; f2 = f1;
          x1 = hi - phi * (hi - lo); f1 = eval(x1);
        } else {
          lo = x1; x1 = x2; f1 = f2;
          x2 = lo + phi * (hi - lo); f2 = eval(x2);
        }
      }
      for (auto [fx, x] : {std::pair{f1, x1}, std::pair{f2, x2}}) {
        if (fx > best) {
          best = fx;
          best_lam = x;
        }
      }
    }
    per_n[idx] = {best, n, best_lam, {}};
  });
  SupResult out;
  for (const auto& r : per_n) {
    out.rows.push_back({double(r.n), r.lambda, r.value});
    if (r.value > out.value) {
      out.value = r.value;
      out.n = r.n;
      out.lambda = r.lambda;
    }
  }
  return out;
}

}  // namespace

EstimateReport multiplier_sup_search(const MultiplierSearchOptions& o) {
  check_multiplier_hypotheses(o.l1, o.l2);
  if (o.n_max < 1 || !(o.lambda_max > 0.0) || !(o.grid_step > 0.0)) {
    throw std::invalid_argument("multiplier_sup_search: bad ranges");
  }
  const SupResult coarse = multiplier_search(o, o.grid_step);
  const SupResult fine = multiplier_search(o, o.grid_step / 2.0);

  EstimateReport r;
  r.lemma = "sum";
  r.ranges = {{"l1", o.l1}, {"l2", o.l2}, {"n_max", double(o.n_max)},
              {"lambda_max", o.lambda_max}, {"grid_step", o.grid_step}};
  r.value_name = "sup";
  r.value = multiplier_sum(o.l1, o.l2, fine.n, fine.lambda, o.gap).upper();
  r.witness = {{"n", double(fine.n)}, {"lambda", fine.lambda}};
  const double change = relative_change(coarse.value, fine.value);
  r.details = {{"coarse_sup", coarse.value}, {"refinement_change", change}, {"gap", o.gap}};
  r.columns = {"n", "lambda", "sup"};
  r.rows = fine.rows;
  r.pass = std::isfinite(r.value) && change < kStableTolerance;
  return r;
}

// ----------------------------------------------------------------- omega

namespace {

struct Interval {
  double lo, hi;
};

// Intervals [-3x - w, -3x + w], x = n n1 (n - n1), for n1 with |n1 (n - n1)| <= bound.
std::vector<Interval> resonance_intervals(int n, double c0, double bound) {
  const double dn = n;
  const double reach = std::sqrt(dn * dn / 4.0 + bound) + 1.0;
  std::vector<Interval> out;
  for (auto n1 = static_cast<long long>(std::floor(dn / 2.0 - reach));
       n1 <= static_cast<long long>(std::ceil(dn / 2.0 + reach)); ++n1) {
    const double x = dn * double(n1) * double(n - n1);
    const double w = c0 * std::pow(1.0 + x * x, 0.005);
    out.push_back({-3.0 * x - w, -3.0 * x + w});
  }
  return out;
}

std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi) out.back().hi = std::max(out.back().hi, iv.hi);
    else out.push_back(iv);
  }
  return out;
}

double clipped_length(const std::vector<Interval>& merged, double lo, double hi) {
  double len = 0.0;
  for (const auto& iv : merged) len += std::max(0.0, std::min(iv.hi, hi) - std::max(iv.lo, lo));
  return len;
}

}  // namespace

double resonance_set_measure(int n, double M, double c0) {
  if (n == 0) throw std::domain_error("resonance_set_measure: n must be nonzero");
  if (!(M >= 1.0) || !(c0 > 0.0)) throw std::invalid_argument("resonance_set_measure: need M >= 1, c0 > 0");
  const double H = c0 * std::pow(1.0 + 16.0 * M * M, 0.005) + 1.0;
  const auto merged = merge(resonance_intervals(n, c0, (2.0 * M + H) / (3.0 * std::abs(n))));
  // Half-open shell; the endpoints have measure zero.
  return clipped_length(merged, M, 2.0 * M) + clipped_length(merged, -2.0 * M, -M);
}

EstimateReport resonance_set_scan(const OmegaScanOptions& o) {
  if (o.n_max < 1 || o.log2_M_min < 0 || o.log2_M_max <= o.log2_M_min) {
    throw std::invalid_argument("resonance_set_scan: bad ranges");
  }
  const int nM = o.log2_M_max - o.log2_M_min + 1;
  const std::size_t nn = static_cast<std::size_t>(2 * o.n_max);
  std::vector<std::vector<double>> measure(nn, std::vector<double>(static_cast<std::size_t>(nM)));
  auto n_of = [&](std::size_t idx) {
    return static_cast<int>(idx) < o.n_max ? static_cast<int>(idx) - o.n_max
                                           : static_cast<int>(idx) - o.n_max + 1;
  };
  parallel_for(nn, o.jobs, [&](std::size_t idx) {
    for (int j = 0; j < nM; ++j) {
      measure[idx][static_cast<std::size_t>(j)] =
          resonance_set_measure(n_of(idx), std::ldexp(1.0, o.log2_M_min + j), o.c0);
    }
  });

  EstimateReport r;
  r.lemma = "omega-set";
  r.ranges = {{"n_max", double(o.n_max)}, {"M_min", std::ldexp(1.0, o.log2_M_min)},
              {"M_max", std::ldexp(1.0, o.log2_M_max)}, {"c0", o.c0}};
  r.value_name = "sup_measure_over_M^0.75";
  r.columns = {"n", "M", "measure", "ratio"};
  double sup = -1.0, sup_short = -1.0;
  int wn = 0, wj = 0;
  std::vector<double> logM, logmax;
  std::vector<double> max_per_M(static_cast<std::size_t>(nM), 0.0);
  for (std::size_t idx = 0; idx < nn; ++idx) {
    for (int j = 0; j < nM; ++j) {
      const double M = std::ldexp(1.0, o.log2_M_min + j);
      const double m = measure[idx][static_cast<std::size_t>(j)];
      const double ratio = m / std::pow(M, 0.75);
      r.rows.push_back({double(n_of(idx)), M, m, ratio});
      max_per_M[static_cast<std::size_t>(j)] = std::max(max_per_M[static_cast<std::size_t>(j)], m);
      if (ratio > sup) {
        sup = ratio;
        wn = n_of(idx);
        wj = j;
      }
      if (j + 1 < nM) sup_short = std::max(sup_short, ratio);
    }
  }
  const double wM = std::ldexp(1.0, o.log2_M_min + wj);
  r.value = resonance_set_measure(wn, wM, o.c0) / std::pow(wM, 0.75);
  r.witness = {{"n", double(wn)}, {"M", wM}};

  // Exponent fits: the per-M maximum over n, and the witness n alone.
  auto fit_exponent = [&](const std::vector<double>& ms) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (int j = 0; j < nM; ++j) {
      if (ms[static_cast<std::size_t>(j)] <= 0.0) continue;
      const double x = o.log2_M_min + j, y = std::log2(ms[static_cast<std::size_t>(j)]);
      sx += x; sy += y; sxx += x * x; sxy += x * y; ++k;
    }
    if (k < 2) return std::numeric_limits<double>::quiet_NaN();
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
  };
  std::vector<double> witness_series(static_cast<std::size_t>(nM));
  const auto widx = static_cast<std::size_t>(wn < 0 ? wn + o.n_max : wn + o.n_max - 1);
  for (int j = 0; j < nM; ++j) witness_series[static_cast<std::size_t>(j)] = measure[widx][static_cast<std::size_t>(j)];
  const double exp_max = fit_exponent(max_per_M);
  const double exp_witness = fit_exponent(witness_series);
  const double change = relative_change(sup_short, sup);
  r.details = {{"last_M_change", change},
               {"fitted_exponent_max_over_n", exp_max},
               {"fitted_exponent_witness_n", exp_witness}};
  r.pass = std::isfinite(r.value) && change < kStableTolerance && exp_max < 0.75;
  return r;
}

WeightIntegral resonance_weight_integral(int n, double zeta, double c0, long long cutoff) {
  if (n == 0) throw std::domain_error("resonance_weight_integral: n must be nonzero");
  if (!(zeta > 0.9 && zeta < 1.0) || !(c0 > 0.0)) {
    throw std::invalid_argument("resonance_weight_integral: need zeta in (0.9, 1) and c0 > 0");
  }
  const double dn = std::abs(double(n));
  cutoff = std::max<long long>(cutoff, 2 * static_cast<long long>(dn) + 2);
  const double K = double(cutoff);
  const double A = 2.0 * c0 * std::pow(1.0 + 2.0 * dn, 0.01) * std::pow(dn, -zeta);
  if (c0 * std::pow(1.0 + 2.0 * dn, 0.01) * std::pow(K, 0.02) > 0.5 * dn * K * K) {
    throw std::invalid_argument("resonance_weight_integral: cutoff too small for the tail bound");
  }

  std::vector<Interval> ivs;
  for (long long n1 = -cutoff; n1 <= cutoff; ++n1) {
    const double x = double(n) * double(n1) * double(n - n1);
    const double w = c0 * std::pow(1.0 + x * x, 0.005);
    ivs.push_back({-3.0 * x - w, -3.0 * x + w});
  }
  const auto merged = merge(std::move(ivs));
  auto weight = [zeta](double z) { return std::pow(1.0 + z * z, -0.5 * zeta); };
  using Gauss = boost::math::quadrature::gauss<double, 20>;

  WeightIntegral out;
  out.cutoff = cutoff;
  for (const auto& iv : merged) {
    out.core += Gauss::integrate(weight, iv.lo, iv.hi);
    const double lo = std::max(iv.lo, -2.0), hi = std::min(iv.hi, 2.0);
    if (hi > lo) out.nearest_shell += Gauss::integrate(weight, lo, hi);
  }
  const double q = 0.02 - 2.0 * zeta;
  out.tail_bound = 2.0 * A * std::pow(K, q + 1.0) / (-q - 1.0);
  return out;
}

EstimateReport resonance_weight_scan(const OmegaScanOptions& o) {
  if (o.n_max < 1) throw std::invalid_argument("resonance_weight_scan: n_max must be >= 1");
  const std::size_t nn = static_cast<std::size_t>(2 * o.n_max);
  std::vector<WeightIntegral> vals(nn);
  auto n_of = [&](std::size_t idx) {
    return static_cast<int>(idx) < o.n_max ? static_cast<int>(idx) - o.n_max
                                           : static_cast<int>(idx) - o.n_max + 1;
  };
  parallel_for(nn, o.jobs, [&](std::size_t idx) {
    vals[idx] = resonance_weight_integral(n_of(idx), o.zeta, o.c0);
  });

  EstimateReport r;
  r.lemma = "omega-weight";
  r.ranges = {{"n_max", double(o.n_max)}, {"zeta", o.zeta}, {"c0", o.c0}};
  r.value_name = "sup_integral";
  r.columns = {"n", "core", "tail_bound", "value"};
  double sup = -1.0, sup_half = -1.0;
  int wn = 0;
  for (std::size_t idx = 0; idx < nn; ++idx) {
    const int n = n_of(idx);
    const double v = vals[idx].value();
    r.rows.push_back({double(n), vals[idx].core, vals[idx].tail_bound, v});
    if (v > sup) {
      sup = v;
      wn = n;
    }
    if (2 * std::abs(n) <= o.n_max) sup_half = std::max(sup_half, v);
  }
  r.value = resonance_weight_integral(wn, o.zeta, o.c0).value();
  r.witness = {{"n", double(wn)}};
  const double change = relative_change(sup_half, sup);
  r.details = {{"half_range_change", change}};
  r.pass = std::isfinite(r.value) && change < kStableTolerance;
  return r;
}

}  // namespace ostrovsky::estimates
