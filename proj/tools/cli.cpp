#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "ostrovsky/estimates.hpp"
#include "ostrovsky/integrator.hpp"
#include "ostrovsky/measure.hpp"
#include "ostrovsky/norms.hpp"
#include "ostrovsky/parallel.hpp"
#include "ostrovsky/spectral.hpp"
#include "ostrovsky/spectrum_io.hpp"

#ifndef OSTROVSKY_VERSION
#define OSTROVSKY_VERSION "0.0.0"
#endif

namespace ostrovsky::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Globals {
  std::uint64_t seed = 0;
  int jobs = default_jobs();
  std::string out = "ostrovsky-out";
};

// Collects everything a run writes; the manifest itself is written last.
class Run {
 public:
  Run(std::string command, const Globals& g)
      : command_(std::move(command)), dir_(g.out), seed_(g.seed), start_(utc_now()) {
    fs::create_directories(dir_);
    params_["jobs"] = g.jobs;
    params_["out"] = g.out;
  }

  const fs::path& dir() const { return dir_; }
  json& params() { return params_; }
  void failures(const std::string& key, std::size_t count) { failures_[key] = count; }

  std::ofstream open(const std::string& name) {
    const fs::path path = dir_ / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    record(path);
    return os;
  }

  void record(const fs::path& path) { outputs_.push_back(path.lexically_relative(dir_).generic_string()); }

  void finish() {
    json m;
    m["command"] = command_;
    m["params"] = params_;
    m["seed"] = seed_;
    m["version"] = OSTROVSKY_VERSION;
    m["start_time"] = start_;
    m["end_time"] = utc_now();
    outputs_.push_back("manifest.json");
    m["outputs"] = outputs_;
    m["failures"] = failures_.is_null() ? json::object() : failures_;
    std::ofstream os(dir_ / "manifest.json");
    if (!os) throw std::runtime_error("cannot write manifest.json");
    os << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  fs::path dir_;
  std::uint64_t seed_;
  std::string start_;
  json params_ = json::object();
  json failures_;
  std::vector<std::string> outputs_;
};

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return kPass;
    case Verdict::Fail: return kStatisticalFail;
    case Verdict::Inconclusive: return kInconclusive;
  }
  return kStatisticalFail;
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  int n = 64;
  double dt = 1e-4;
  double t = 1.0;
  int stride = 100;
  std::string init = "white-noise";
  bool linear_only = false;
};

SpectralState initial_state(const std::string& init, int n, std::uint64_t seed) {
  if (init == "white-noise") return sample_white_noise(n, seed);
  if (init.rfind("file:", 0) == 0) {
    const fs::path path = init.substr(5);
    if (!fs::is_regular_file(path)) throw std::invalid_argument("no such spectrum file: " + path.string());
    return load_state(path);
  }
  throw std::invalid_argument("--init must be 'white-noise' or 'file:<path>'");
}

int cmd_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  SpectralState a0 = initial_state(a.init, a.n, g.seed);
  SimConfig cfg;
  cfg.N = a0.cutoff();
  cfg.dt = a.dt;
  cfg.T = a.t;
  cfg.snapshot_stride = a.stride;
  cfg.seed = g.seed;
  cfg.physics = a.linear_only ? Physics::LinearOnly : Physics::Full;
  cfg.validate();
  if (a.init == "white-noise" && cfg.N != a.n) throw std::logic_error("cutoff mismatch");

  Run run("simulate", g);
  run.params().update({{"n", cfg.N}, {"dt", cfg.dt}, {"t", cfg.T}, {"stride", cfg.snapshot_stride},
                       {"init", a.init}, {"linear_only", a.linear_only},
                       {"scheme", to_string(cfg.scheme)}});

  if (cfg.physics == Physics::Full && cfg.dt > cfl_bound(a0)) {
    err << "simulate: dt=" << format_real(cfg.dt) << " exceeds the CFL bound "
        << format_real(cfl_bound(a0)) << " of the initial state\n";
    run.failures("blow_up", 1);
    run.finish();
    return kNumerical;
  }

  Trajectory traj;
  int code = kPass;
  try {
    traj = evolve(a0, cfg);
    run.failures("blow_up", 0);
  } catch (const BlowUpError& e) {
    err << "simulate: blow-up at t=" << format_real(e.time()) << ": " << e.what() << '\n';
    if (e.partial()) traj = *e.partial();
    run.failures("blow_up", 1);
    code = kNumerical;
  }
  for (const auto& p : save_trajectory(run.dir(), traj)) run.record(p);

  const auto& first = traj.snapshots.front();
  const double l2_0 = l2_norm(first), e_0 = flow_energy(first), h_0 = hamiltonian(first);
  double l2_drift = 0.0, e_drift = 0.0, h_drift = 0.0;
  for (const auto& s : traj.snapshots) {
    l2_drift = std::max(l2_drift, std::abs(l2_norm(s) - l2_0) / l2_0);
    e_drift = std::max(e_drift, std::abs(flow_energy(s) - e_0) / std::abs(e_0));
    h_drift = std::max(h_drift, std::abs(hamiltonian(s) - h_0) / std::abs(h_0));
  }
  out << "simulate N=" << cfg.N << " dt=" << format_real(cfg.dt) << " T=" << format_real(cfg.T)
      << " snapshots=" << traj.snapshots.size() << '\n'
      << "  l2_relative_drift          " << format_real(l2_drift) << '\n'
      << "  energy_relative_drift      " << format_real(e_drift) << '\n'
      << "  hamiltonian_relative_drift " << format_real(h_drift) << '\n'
      << "  mean                       0\n";
  run.finish();
  return code;
}

// ---------------------------------------------------------------- invariance

struct InvarianceArgs {
  int n = 32;
  std::size_t samples = 10000;
  std::vector<double> times{0.0, 0.5, 1.0};
  double dt = 5e-5;
  std::vector<int> ks_modes;
  bool linear_only = false;
  double alpha = 0.01;
  bool save_ensemble = false;
};

int cmd_invariance(const InvarianceArgs& a, const Globals& g, std::ostream& out) {
  InvarianceOptions opt;
  opt.sim.N = a.n;
  opt.sim.dt = a.dt;
  opt.sim.seed = g.seed;
  opt.sim.physics = a.linear_only ? Physics::LinearOnly : Physics::Full;
  opt.samples = a.samples;
  opt.times = a.times;
  opt.ks_modes = a.ks_modes;
  opt.alpha = a.alpha;
  opt.jobs = g.jobs;

  Run run("invariance", g);
  run.params().update({{"n", a.n}, {"samples", a.samples}, {"times", a.times}, {"dt", a.dt},
                       {"ks_modes", a.ks_modes}, {"linear_only", a.linear_only},
                       {"alpha", a.alpha}, {"moment_sigmas", opt.moment_sigmas},
                       {"chi_square_bins", opt.chi_square_bins},
                       {"save_ensemble", a.save_ensemble}});
  const auto report = invariance_test(opt);
  {
    auto os = run.open("invariance.csv");
    write_report_csv(os, report);
  }
  if (a.save_ensemble) {
    auto ens = sample_ensemble(opt.sim, opt.samples, g.jobs);
    ens.failures = report.failures;
    for (const auto& p : save_ensemble(run.dir() / "ensemble", ens)) run.record(p);
  }
  run.failures("excluded_members", report.failures.size());
  run.failures("failed_tests", report.failed_rows());

  out << "invariance N=" << a.n << " M=" << report.requested << " used=" << report.used
      << " excluded=" << report.failures.size() << '\n';
  for (double t : report.times) {
    double worst_sigma = 0.0, min_ks = 1.0, chi_p = 1.0;
    std::size_t failed = 0;
    for (const auto& r : report.rows) {
      if (r.time != t) continue;
      if (!r.pass) ++failed;
      if (r.observable == "second_moment" && r.std_error > 0.0) {
        worst_sigma = std::max(worst_sigma, std::abs(r.statistic - 2.0) / r.std_error);
      } else if (r.observable == "chi_square_energy") {
        chi_p = r.p_value;
      } else if (r.observable != "second_moment") {
        min_ks = std::min(min_ks, r.p_value);
      }
    }
    out << "  t=" << format_real(t) << " max_moment_dev_in_se=" << format_real(worst_sigma)
        << " min_ks_p=" << format_real(min_ks) << " chi2_p=" << format_real(chi_p)
        << " failed_tests=" << failed << '\n';
  }
  out << "verdict " << to_string(report.verdict()) << '\n';
  run.finish();
  return exit_code(report.verdict());
}

// ---------------------------------------------------------------------- tail

struct TailArgs {
  int n = 64;
  std::size_t samples = 100000;
  std::vector<double> k_grid;
  double s = kDefaultS;
  double p = kDefaultP;
};

int cmd_tail(const TailArgs& a, const Globals& g, std::ostream& out) {
  TailOptions opt;
  opt.N = a.n;
  opt.samples = a.samples;
  opt.K_grid = a.k_grid;
  opt.s = a.s;
  opt.p = a.p;
  opt.seed = g.seed;
  opt.jobs = g.jobs;
  Run run("tail", g);
  const auto report = tail_test(opt);
  run.params().update({{"n", a.n}, {"samples", a.samples}, {"k_grid", report.options.K_grid},
                       {"s", a.s}, {"p", a.p}, {"min_r_squared", opt.min_r_squared}});
  {
    auto os = run.open("tail.csv");
    write_report_csv(os, report);
  }
  run.failures("degenerate_fit", report.degenerate ? 1 : 0);
  out << "tail N=" << a.n << " M=" << a.samples << " s=" << format_real(a.s)
      << " p=" << format_real(a.p) << '\n'
      << "  c=" << format_real(report.c) << " r_squared=" << format_real(report.r_squared)
      << " fit_points=" << report.fit_points << '\n'
      << "verdict " << to_string(report.verdict()) << '\n';
  run.finish();
  return exit_code(report.verdict());
}

// -------------------------------------------------------------------- growth

struct GrowthArgs {
  int n = 32;
  std::size_t samples = 1000;
  std::vector<double> horizons{1.0, 10.0};
  std::vector<double> eps{0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
  double dt = 5e-5;
  double s = kDefaultS;
  double p = kDefaultP;
};

int cmd_growth(const GrowthArgs& a, const Globals& g, std::ostream& out) {
  GrowthOptions opt;
  opt.sim.N = a.n;
  opt.sim.dt = a.dt;
  opt.sim.seed = g.seed;
  opt.samples = a.samples;
  opt.horizons = a.horizons;
  opt.eps_grid = a.eps;
  opt.s = a.s;
  opt.p = a.p;
  opt.jobs = g.jobs;
  Run run("growth", g);
  run.params().update({{"n", a.n}, {"samples", a.samples}, {"horizons", a.horizons},
                       {"eps", a.eps}, {"dt", a.dt}, {"s", a.s}, {"p", a.p}});
  const auto report = growth_test(opt);
  {
    auto os = run.open("growth.csv");
    write_report_csv(os, report);
  }
  run.failures("excluded_members", report.failures.size());
  out << "growth N=" << a.n << " M=" << a.samples << " used=" << report.used << '\n'
      << "  slope=" << format_real(report.slope) << " intercept=" << format_real(report.intercept)
      << " rmse=" << format_real(report.rmse) << '\n'
      << "  monotone=" << report.monotone << " log_ordered=" << report.log_ordered
      << " sublinear_in_T=" << report.sublinear_in_T << '\n'
      << "verdict " << to_string(report.verdict()) << '\n';
  run.finish();
  return exit_code(report.verdict());
}

// --------------------------------------------------------------------- norms

struct NormsArgs {
  std::string input;
  int n = 64;
  double s = kDefaultS;
  double p = kDefaultP;
};

int cmd_norms(const NormsArgs& a, const Globals& g, std::ostream& out) {
  std::vector<Complex> modes;
  if (!a.input.empty()) {
    if (!fs::is_regular_file(a.input)) throw std::invalid_argument("no such spectrum file: " + a.input);
    modes = read_spectrum(fs::path(a.input));
  } else {
    const auto st = sample_white_noise(a.n, g.seed);
    modes.assign(st.modes().begin(), st.modes().end());
  }
  Run run("norms", g);
  run.params().update({{"input", a.input}, {"n", a.input.empty() ? a.n : int(modes.size())},
                       {"s", a.s}, {"p", a.p}});
  const auto profile = dyadic_profile(modes, a.s, a.p);
  {
    auto os = run.open("profile.csv");
    os << "j,block_norm\n";
    for (std::size_t j = 0; j < profile.block_norms.size(); ++j) {
      os << j << ',' << format_real(profile.block_norms[j]) << '\n';
    }
  }
  const double hs = sobolev_norm(modes, a.s);
  {
    auto os = run.open("norms.csv");
    os << "name,value\n"
       << "sobolev," << format_real(hs) << '\n'
       << "besov_sup," << format_real(profile.sup()) << '\n'
       << "besov_l1," << format_real(profile.sum()) << '\n';
  }
  run.failures("parse_errors", 0);
  out << "norms N=" << modes.size() << " s=" << format_real(a.s) << " p=" << format_real(a.p) << '\n'
      << "  sobolev   " << format_real(hs) << '\n'
      << "  besov_sup " << format_real(profile.sup()) << '\n'
      << "  besov_l1  " << format_real(profile.sum()) << '\n';
  run.finish();
  return kPass;
}

// -------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string lemma;
  int l = 128;
  double alpha = 0.5, beta = 0.5, a_max = 1e6;
  double eps = estimates::kDefaultEps;
  double l1 = 0.5, l2 = 0.5;
  std::optional<int> n_max;
  double lambda_max = 256.0, grid_step = 1.0;
  double delta = estimates::kDefaultDelta;
  std::optional<double> c0;
  double tight_c0 = estimates::kDefaultC0;
  int k_span = 64;
  double zeta = estimates::kDefaultZeta;
  int log2_m_min = 4, log2_m_max = 20;
};

int cmd_verify(const VerifyArgs& a, const Globals& g, std::ostream& out) {
  using namespace estimates;
  std::vector<EstimateReport> reports;
  json params = {{"lemma", a.lemma}};
  if (a.lemma == "resonance") {
    params["l"] = a.l;
    reports.push_back(resonance_min_ratio(a.l, g.jobs));
  } else if (a.lemma == "weight") {
    WeightScanOptions o;
    o.n_max = a.n_max.value_or(64);
    o.k_span = a.k_span;
    o.eps = a.eps;
    o.delta = a.delta;
    o.c0 = a.c0.value_or(kDefaultCurveC0);
    o.tight_c0 = a.tight_c0;
    o.jobs = g.jobs;
    params.update({{"n_max", o.n_max}, {"k_span", o.k_span}, {"eps", o.eps}, {"delta", o.delta},
                   {"c0", o.c0}, {"tight_c0", o.tight_c0}});
    reports.push_back(weight_bound_check(o));
  } else if (a.lemma == "gtv") {
    params.update({{"alpha", a.alpha}, {"beta", a.beta}, {"a_max", a.a_max}, {"eps", a.eps}});
    reports.push_back(gtv_bound_check(a.alpha, a.beta, a.a_max, a.eps));
  } else if (a.lemma == "sum") {
    MultiplierSearchOptions o;
    o.l1 = a.l1;
    o.l2 = a.l2;
    o.n_max = a.n_max.value_or(16);
    o.lambda_max = a.lambda_max;
    o.grid_step = a.grid_step;
    o.jobs = g.jobs;
    params.update({{"l1", o.l1}, {"l2", o.l2}, {"n_max", o.n_max}, {"lambda_max", o.lambda_max},
                   {"grid_step", o.grid_step}, {"gap", o.gap}});
    reports.push_back(multiplier_sup_search(o));
  } else {
    OmegaScanOptions o;
    o.n_max = a.n_max.value_or(64);
    o.log2_M_min = a.log2_m_min;
    o.log2_M_max = a.log2_m_max;
    o.c0 = a.c0.value_or(kDefaultC0);
    o.zeta = a.zeta;
    o.jobs = g.jobs;
    params.update({{"n_max", o.n_max}, {"log2_m_min", o.log2_M_min},
                   {"log2_m_max", o.log2_M_max}, {"c0", o.c0}, {"zeta", o.zeta}});
    reports.push_back(resonance_set_scan(o));
    reports.push_back(resonance_weight_scan(o));
  }

  Run run("verify", g);
  run.params().update(params);
  std::size_t failed = 0;
  for (const auto& r : reports) {
    auto os = run.open(r.lemma + ".csv");
    write_report_csv(os, r);
    out << verdict_line(r) << '\n';
    for (const auto& [k, v] : r.details) out << "  " << k << '=' << format_real(v) << '\n';
    if (!r.pass) ++failed;
  }
  run.failures("failed_reports", failed);
  run.finish();
  return failed == 0 ? kPass : kStatisticalFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudospectral simulator and verification suite for the periodic Ostrovsky equation",
               args.empty() ? "ostrovsky" : args.front()};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", OSTROVSKY_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "Base seed (u64)")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Evolve one initial state and write its trajectory");
  simulate->add_option("--n", sim.n, "Cutoff N")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  simulate->add_option("--dt", sim.dt, "Time step")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--t", sim.t, "Final time")->capture_default_str()->check(CLI::NonNegativeNumber);
  simulate->add_option("--stride", sim.stride, "Record every stride-th step")->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--init", sim.init, "white-noise or file:<path>")->capture_default_str();
  simulate->add_flag("--linear-only", sim.linear_only, "Disable the nonlinearity");

  InvarianceArgs inv;
  auto* invariance = app.add_subcommand("invariance", "Monte-Carlo invariance test of the white noise");
  invariance->add_option("--n", inv.n, "Cutoff N")->capture_default_str()->check(CLI::Range(2, 1 << 16));
  invariance->add_option("--samples", inv.samples, "Ensemble size M (>= 100)")->capture_default_str()
      ->check(CLI::Range(std::size_t{100}, std::size_t{1} << 40));
  invariance->add_option("--times", inv.times, "Comma-separated test times")->delimiter(',')
      ->capture_default_str();
  invariance->add_option("--dt", inv.dt, "Time step")->capture_default_str()->check(CLI::PositiveNumber);
  invariance->add_option("--ks-modes", inv.ks_modes, "Modes for KS tests (default all)")
      ->delimiter(',');
  invariance->add_flag("--linear-only", inv.linear_only, "Exact-rotation mode");
  invariance->add_option("--alpha", inv.alpha, "Family-wise level")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  invariance->add_flag("--save-ensemble", inv.save_ensemble, "Also write the initial ensemble");

  TailArgs tl;
  auto* tail = app.add_subcommand("tail", "Tail of the b^s_{p,inf} norm under the white noise");
  tail->add_option("--n", tl.n, "Cutoff N")->capture_default_str()->check(CLI::Range(1, 1 << 20));
  tail->add_option("--samples", tl.samples, "Sample size M (>= 10^4)")->capture_default_str()
      ->check(CLI::Range(std::size_t{10000}, std::size_t{1} << 40));
  tail->add_option("--k-grid", tl.k_grid, "Comma-separated K values (default 0.25..8)")->delimiter(',');
  tail->add_option("--s", tl.s, "Regularity s")->capture_default_str();
  tail->add_option("--p", tl.p, "Integrability p > 1")->capture_default_str();

  GrowthArgs gr;
  auto* growth = app.add_subcommand("growth", "Growth of the sup-in-time norm over an ensemble");
  growth->add_option("--n", gr.n, "Cutoff N")->capture_default_str()->check(CLI::Range(2, 1 << 16));
  growth->add_option("--samples", gr.samples, "Ensemble size M")->capture_default_str()
      ->check(CLI::PositiveNumber);
  growth->add_option("--horizons", gr.horizons, "Comma-separated T values")->delimiter(',')
      ->capture_default_str();
  growth->add_option("--eps", gr.eps, "Comma-separated eps values in (0,1]")->delimiter(',')
      ->capture_default_str();
  growth->add_option("--dt", gr.dt, "Time step")->capture_default_str()->check(CLI::PositiveNumber);
  growth->add_option("--s", gr.s, "Regularity s")->capture_default_str();
  growth->add_option("--p", gr.p, "Integrability p > 1")->capture_default_str();

  NormsArgs nm;
  auto* norms = app.add_subcommand("norms", "Sobolev and dyadic Besov norms of one spectrum");
  auto* input = norms->add_option("--input", nm.input, "Spectrum file");
  norms->add_option("--generate", "Generator for a sample when no --input is given")
      ->check(CLI::IsMember({"white-noise"}))->excludes(input);
  norms->add_option("--n", nm.n, "Cutoff of a generated sample")->capture_default_str()
      ->check(CLI::Range(1, 1 << 20));
  norms->add_option("--s", nm.s, "Regularity s")->capture_default_str();
  norms->add_option("--p", nm.p, "Integrability p > 1")->capture_default_str();

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "Certify a frequency-side lemma by exhaustive scan");
  verify->add_option("lemma", vf.lemma, "resonance | weight | gtv | sum | omega")->required()
      ->check(CLI::IsMember({"resonance", "weight", "gtv", "sum", "omega"}));
  verify->add_option("--l", vf.l, "resonance: frequency range L")->capture_default_str()
      ->check(CLI::Range(2, 1 << 14));
  verify->add_option("--alpha", vf.alpha, "gtv: alpha")->capture_default_str();
  verify->add_option("--beta", vf.beta, "gtv: beta")->capture_default_str();
  verify->add_option("--a-max", vf.a_max, "gtv: largest a")->capture_default_str();
  verify->add_option("--eps", vf.eps, "gtv, weight: the 0+ exponent")->capture_default_str();
  verify->add_option("--l1", vf.l1, "sum: l1")->capture_default_str();
  verify->add_option("--l2", vf.l2, "sum: l2")->capture_default_str();
  verify->add_option("--n-max", vf.n_max, "sum/weight/omega: largest |n|");
  verify->add_option("--lambda-max", vf.lambda_max, "sum: largest |lambda|")->capture_default_str();
  verify->add_option("--grid-step", vf.grid_step, "sum: lambda grid spacing")->capture_default_str();
  verify->add_option("--delta", vf.delta, "weight: delta")->capture_default_str();
  verify->add_option("--c0", vf.c0, "weight/omega: window constant");
  verify->add_option("--tight-c0", vf.tight_c0, "weight: tight-window constant")->capture_default_str();
  verify->add_option("--k-span", vf.k_span, "weight: shifted curves |k| <= span")->capture_default_str();
  verify->add_option("--zeta", vf.zeta, "omega: zeta")->capture_default_str();
  verify->add_option("--log2-m-min", vf.log2_m_min, "omega: smallest log2 M")->capture_default_str();
  verify->add_option("--log2-m-max", vf.log2_m_max, "omega: largest log2 M")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, g, out, err);
    if (*invariance) return cmd_invariance(inv, g, out);
    if (*tail) return cmd_tail(tl, g, out);
    if (*growth) return cmd_growth(gr, g, out);
    if (*norms) return cmd_norms(nm, g, out);
    if (*verify) return cmd_verify(vf, g, out);
  } catch (const SpectrumParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace ostrovsky::cli
