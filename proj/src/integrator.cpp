#include "ostrovsky/integrator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "ostrovsky/spectrum_io.hpp"
#include "ostrovsky/transform.hpp"

namespace ostrovsky {

namespace {

constexpr Complex kI{0.0, 1.0};

// A step shorter than this fraction of dt is folded into the previous one.
constexpr double kStopSlack = 1e-9;

bool all_finite(std::span<const Complex> modes) {
  return std::all_of(modes.begin(), modes.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double energy_of(std::span<const Complex> modes) {
  double e = 0.0;
  for (const auto& z : modes) e += std::norm(z);
  return e;
}

// Guards one trajectory: non-finite amplitudes, and the CFL re-check each
// time the L2 norm has doubled since the last check.
class StabilityMonitor {
 public:
  StabilityMonitor(std::span<const Complex> initial, double dt)
      : dt_(dt), reference_energy_(energy_of(initial)) {}

  void check(std::span<const Complex> modes, double t) {
    if (!all_finite(modes)) {
      throw BlowUpError(t, "non-finite amplitude at t=" + format_real(t));
    }
    const double e = energy_of(modes);
    if (reference_energy_ > 0.0 && e > 4.0 * reference_energy_) {
      const double bound = cfl_bound(SpectralState(std::vector<Complex>(modes.begin(), modes.end())));
      if (dt_ > bound) {
        throw BlowUpError(t, "L2 norm doubled and dt=" + format_real(dt_) +
                                 " exceeds the CFL bound " + format_real(bound) +
                                 " at t=" + format_real(t));
      }
      reference_energy_ = e;
    }
  }

 private:
  double dt_;
  double reference_energy_;
};

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::IFRK4:
      return "IFRK4";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "IFRK4") return Scheme::IFRK4;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

void SimConfig::validate() const {
  if (N < 2) throw std::invalid_argument("SimConfig: N must be >= 2");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("SimConfig: T must be >= 0");
  if (snapshot_stride < 1) throw std::invalid_argument("SimConfig: snapshot_stride must be >= 1");
}

double cfl_bound(const SpectralState& state) {
  const auto u = to_physical(state, dealiased_size(state.cutoff()));
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / (state.cutoff() * umax);
}

BlowUpError::BlowUpError(double time, const std::string& what)
    : std::runtime_error(what), time_(time) {}

SpectralState linear_flow(const SpectralState& state, double t) {
  SpectralState out = state;
  for (int n = 1; n <= state.cutoff(); ++n) {
    out.set_mode(n, std::polar(1.0, -dispersion(n) * t) * state[n]);
  }
  return out;
}

SpectralState vector_field(const SpectralState& state, Physics physics) {
  const int N = state.cutoff();
  std::vector<Complex> f(static_cast<std::size_t>(N), Complex{});
  if (physics == Physics::Full) detail::nonlinear_term_into(state.modes(), f);
  for (int n = 1; n <= N; ++n) f[static_cast<std::size_t>(n - 1)] -= kI * dispersion(n) * state[n];
  return SpectralState(std::move(f));
}

Stepper::Stepper(int cutoff, Physics physics) : N_(cutoff), physics_(physics) {
  if (cutoff < 1) throw std::invalid_argument("Stepper: cutoff must be >= 1");
  const auto n = static_cast<std::size_t>(cutoff);
  m_.resize(n);
  for (int k = 1; k <= cutoff; ++k) m_[static_cast<std::size_t>(k - 1)] = dispersion(k);
  half_.resize(n);
  full_.resize(n);
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  tmp_.resize(n);
}

void Stepper::set_dt(double dt) {
  if (dt == dt_) return;
  dt_ = dt;
  for (std::size_t k = 0; k < m_.size(); ++k) {
    half_[k] = std::polar(1.0, -m_[k] * dt * 0.5);
    full_[k] = std::polar(1.0, -m_[k] * dt);
  }
}

void Stepper::advance(std::span<Complex> a, double dt) {
  set_dt(dt);
  const std::size_t n = m_.size();
  if (physics_ == Physics::LinearOnly) {
    for (std::size_t k = 0; k < n; ++k) a[k] *= full_[k];
    return;
  }
  const double h2 = 0.5 * dt;
  detail::nonlinear_term_into(a, k1_);
  for (std::size_t k = 0; k < n; ++k) tmp_[k] = half_[k] * (a[k] + h2 * k1_[k]);
  detail::nonlinear_term_into(tmp_, k2_);
  for (std::size_t k = 0; k < n; ++k) tmp_[k] = half_[k] * a[k] + h2 * k2_[k];
  detail::nonlinear_term_into(tmp_, k3_);
  for (std::size_t k = 0; k < n; ++k) tmp_[k] = full_[k] * a[k] + dt * half_[k] * k3_[k];
  detail::nonlinear_term_into(tmp_, k4_);
  const double h6 = dt / 6.0;
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = full_[k] * a[k] +
           h6 * (full_[k] * k1_[k] + 2.0 * half_[k] * (k2_[k] + k3_[k]) + k4_[k]);
  }
}

SpectralState step(const SpectralState& state, double dt, Physics physics) {
  std::vector<Complex> a(state.modes().begin(), state.modes().end());
  Stepper stepper(state.cutoff(), physics);
  stepper.advance(a, dt);
  if (!all_finite(a)) throw BlowUpError(dt, "non-finite amplitude after one step");
  return SpectralState(std::move(a));
}

namespace {

// Advances one trajectory. Linear-only runs evaluate the free flow from the
// initial data at absolute time, so they reproduce linear_flow() exactly
// instead of accumulating the rounding of per-step rotations.
class Propagator {
 public:
  Propagator(std::span<const Complex> initial, Physics physics)
      : stepper_(static_cast<int>(initial.size()), physics),
        physics_(physics),
        initial_(initial.begin(), initial.end()) {
    for (std::size_t k = 0; k < initial_.size(); ++k) m_.push_back(dispersion(static_cast<int>(k + 1)));
  }

  /// Steps `a` from t_new - h to t_new.
  void advance(std::span<Complex> a, double h, double t_new) {
    if (physics_ == Physics::LinearOnly) {
      for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::polar(1.0, -m_[k] * t_new) * initial_[k];
      return;
    }
    stepper_.advance(a, h);
  }

 private:
  Stepper stepper_;
  Physics physics_;
  std::vector<Complex> initial_;
  std::vector<double> m_;
};

}  // namespace

void integrate_through(const SpectralState& initial, const SimConfig& config,
                       std::span<const double> stops,
                       const std::function<void(std::size_t, const SpectralState&)>& on_stop,
                       const StepObserver& on_step) {
  config.validate();
  if (!std::is_sorted(stops.begin(), stops.end()) || (!stops.empty() && stops.front() < 0.0)) {
    throw std::invalid_argument("integrate_through: stop times must be ascending and >= 0");
  }
  const double dt = config.dt;
  std::vector<Complex> a(initial.modes().begin(), initial.modes().end());
  Propagator propagator(a, config.physics);
  StabilityMonitor monitor(a, dt);

  double segment_start = 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    const double stop = stops[i];
    for (long k = 1; t < stop; ++k) {
      const double remaining = stop - t;
      const double h = remaining <= dt * (1.0 + kStopSlack) ? remaining : dt;
      t = h == remaining ? stop : segment_start + static_cast<double>(k) * dt;
      propagator.advance(a, h, t);
      monitor.check(a, t);
      if (on_step) on_step(t, a);
    }
    segment_start = stop;
    if (on_stop) on_stop(i, SpectralState(a));
  }
}

Trajectory evolve(const SpectralState& initial, const SimConfig& config) {
  config.validate();
  if (initial.cutoff() != config.N) {
    throw std::invalid_argument("evolve: state cutoff " + std::to_string(initial.cutoff()) +
                                " differs from config N=" + std::to_string(config.N));
  }
  const double bound = cfl_bound(initial);
  if (config.physics == Physics::Full && config.dt > bound) {
    throw std::invalid_argument("evolve: dt=" + format_real(config.dt) +
                                " exceeds the CFL bound " + format_real(bound));
  }

  Trajectory traj{config, {0.0}, {initial}};
  std::vector<Complex> a(initial.modes().begin(), initial.modes().end());
  Propagator propagator(a, config.physics);
  StabilityMonitor monitor(a, config.dt);

  double t = 0.0;
  try {
    for (long k = 1; t < config.T; ++k) {
      const double remaining = config.T - t;
      const bool last = remaining <= config.dt * (1.0 + kStopSlack);
      t = last ? config.T : static_cast<double>(k) * config.dt;
      propagator.advance(a, last ? remaining : config.dt, t);
      monitor.check(a, t);
      if (last || k % config.snapshot_stride == 0) {
        traj.times.push_back(t);
        traj.snapshots.emplace_back(a);
      }
    }
  } catch (BlowUpError& e) {
    e.attach_partial(std::move(traj));
    throw;
  }
  return traj;
}

namespace {

std::vector<double> to_coordinates(std::span<const Complex> modes) {
  std::vector<double> x;
  x.reserve(2 * modes.size());
  for (const auto& z : modes) {
    x.push_back(z.real());
    x.push_back(z.imag());
  }
  return x;
}

SpectralState from_coordinates(std::span<const double> x) {
  std::vector<Complex> modes(x.size() / 2);
  for (std::size_t k = 0; k < modes.size(); ++k) modes[k] = {x[2 * k], x[2 * k + 1]};
  return SpectralState(std::move(modes));
}

double component(const SpectralState& f, std::size_t i) {
  const Complex z = f.modes()[i / 2];
  return i % 2 == 0 ? z.real() : z.imag();
}

}  // namespace

double divergence_estimate(const SpectralState& state, double h, Physics physics) {
  if (!(h > 0.0)) throw std::invalid_argument("divergence_estimate: h must be > 0");
  auto x = to_coordinates(state.modes());
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  const double step = h * scale;
  double div = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double plus = component(vector_field(from_coordinates(x), physics), i);
    x[i] = saved - step;
    const double minus = component(vector_field(from_coordinates(x), physics), i);
    x[i] = saved;
    div += (plus - minus) / (2.0 * step);
  }
  return div;
}

double vector_field_norm(const SpectralState& state, Physics physics) {
  const SpectralState f = vector_field(state, physics);
  double s = 0.0;
  for (const auto& z : f.modes()) s += std::norm(z);
  return std::sqrt(s);
}

std::string snapshot_filename(double t) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, t, std::chars_format::fixed);
  if (ec != std::errc{}) throw std::runtime_error("snapshot_filename: cannot format time");
  return "t=" + std::string(buf, ptr) + ".csv";
}

std::vector<std::filesystem::path> save_trajectory(const std::filesystem::path& dir,
                                                   const Trajectory& trajectory) {
  std::filesystem::create_directories(dir);
  const auto& c = trajectory.config;
  nlohmann::json manifest = {
      {"N", c.N},
      {"dt", c.dt},
      {"T", c.T},
      {"scheme", to_string(c.scheme)},
      {"stride", c.snapshot_stride},
      {"seed", c.seed},
      {"physics", c.physics == Physics::Full ? "full" : "linear-only"},
  };
  std::vector<std::filesystem::path> written;
  const auto manifest_path = dir / "config.json";
  {
    std::ofstream os(manifest_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + manifest_path.string());
    os << manifest.dump(2) << '\n';
  }
  written.push_back(manifest_path);
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const auto path = dir / snapshot_filename(trajectory.times[i]);
    write_spectrum(path, trajectory.snapshots[i]);
    written.push_back(path);
  }
  return written;
}

Trajectory load_trajectory(const std::filesystem::path& dir) {
  std::ifstream is(dir / "config.json");
  if (!is) throw std::runtime_error("missing " + (dir / "config.json").string());
  const auto j = nlohmann::json::parse(is);
  Trajectory traj;
  traj.config.N = j.at("N").get<int>();
  traj.config.dt = j.at("dt").get<double>();
  traj.config.T = j.at("T").get<double>();
  traj.config.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  traj.config.snapshot_stride = j.at("stride").get<int>();
  traj.config.seed = j.at("seed").get<std::uint64_t>();
  traj.config.physics = j.value("physics", std::string("full")) == "linear-only" ? Physics::LinearOnly
                                                                                 : Physics::Full;

  std::vector<std::pair<double, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("t=", 0) != 0 || entry.path().extension() != ".csv") continue;
    const auto digits = name.substr(2, name.size() - 6);
    double t = 0.0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
      throw std::runtime_error("bad snapshot name " + name);
    }
    files.emplace_back(t, entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& [t, path] : files) {
    traj.times.push_back(t);
    traj.snapshots.push_back(load_state(path));
  }
  return traj;
}

}  // namespace ostrovsky
