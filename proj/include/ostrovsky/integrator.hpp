#pragma once

// Time evolution of the Galerkin-truncated Ostrovsky system
//
//   d/dt a_n = -i m(n) a_n + [-P_N(u u_x)]_n,   1 <= n <= N,
//
// by integrating-factor RK4: the linear rotation exp(-i m(n) t) is applied
// exactly and RK4 only sees the quadratic term in the interaction picture.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ostrovsky/spectral.hpp"

namespace ostrovsky {

enum class Scheme { IFRK4 };

/// Full equation, or the free flow with the quadratic term switched off.
enum class Physics { Full, LinearOnly };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SimConfig {
  int N = 32;
  double dt = 1e-4;
  double T = 1.0;
  Scheme scheme = Scheme::IFRK4;
  int snapshot_stride = 1;
  std::uint64_t seed = 0;
  Physics physics = Physics::Full;

  /// Throws std::invalid_argument unless N >= 2, dt > 0, T >= 0, stride >= 1.
  void validate() const;
};

/// Advective step bound 0.5 / (N max_x |u(x)|); +inf for the zero state.
double cfl_bound(const SpectralState& state);

struct Trajectory {
  SimConfig config;
  std::vector<double> times;
  std::vector<SpectralState> snapshots;
};

/// Raised when an amplitude becomes non-finite, or when the L2 norm has
/// doubled and the step no longer satisfies the re-checked CFL bound.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double time, const std::string& what);
  double time() const { return time_; }

  /// Snapshots recorded before the failure (set by evolve()).
  const std::optional<Trajectory>& partial() const { return partial_; }
  void attach_partial(Trajectory partial) { partial_ = std::move(partial); }

 private:
  double time_;
  std::optional<Trajectory> partial_;
};

/// a_n -> exp(-i m(n) t) a_n, exact for any real t.
SpectralState linear_flow(const SpectralState& state, double t);

/// Right-hand side F(a) = -i m(n) a_n - P_N(u u_x)_n.
SpectralState vector_field(const SpectralState& state, Physics physics = Physics::Full);

/// One integrating-factor RK4 step. Throws BlowUpError on non-finite output.
SpectralState step(const SpectralState& state, double dt, Physics physics = Physics::Full);

/// Reusable stepper holding the work arrays and phase factors for one dt.
/// Not thread safe; use one per thread.
class Stepper {
 public:
  Stepper(int cutoff, Physics physics);

  /// Advances `modes` (length N) in place by dt. Does not check finiteness.
  void advance(std::span<Complex> modes, double dt);

 private:
  void set_dt(double dt);

  int N_;
  Physics physics_;
  double dt_ = 0.0;
  std::vector<double> m_;
  std::vector<Complex> half_, full_;
  std::vector<Complex> k1_, k2_, k3_, k4_, tmp_;
};

/// Called after every accepted step with the model time and current modes.
using StepObserver = std::function<void(double, std::span<const Complex>)>;

/// Integrates from t = 0 through each requested stop time (ascending,
/// non-negative) with step config.dt, shortening the step before each stop so
/// it is hit exactly. `on_stop(i, state)` is invoked at stops[i].
/// Throws BlowUpError.
void integrate_through(const SpectralState& initial, const SimConfig& config,
                       std::span<const double> stops,
                       const std::function<void(std::size_t, const SpectralState&)>& on_stop,
                       const StepObserver& on_step = {});

/// Repeated steps to config.T, recording every snapshot_stride-th state and
/// the final state at exactly T. Validates the config and the CFL bound at the
/// start. A BlowUpError escapes with the partial trajectory attached.
Trajectory evolve(const SpectralState& initial, const SimConfig& config);

/// Central-difference divergence of the real 2N-dimensional vector field,
/// coordinates (Re a_1, Im a_1, ..., Re a_N, Im a_N). h is relative to
/// max(1, max |coordinate|).
double divergence_estimate(const SpectralState& state, double h = 1e-5,
                           Physics physics = Physics::Full);

/// Euclidean norm of the vector field in the same real coordinates.
double vector_field_norm(const SpectralState& state, Physics physics = Physics::Full);

// Trajectory persistence: <dir>/config.json plus one "t=<decimal>.csv"
// spectrum file per snapshot.

std::string snapshot_filename(double t);

/// Writes the trajectory; returns the files written, manifest first.
std::vector<std::filesystem::path> save_trajectory(const std::filesystem::path& dir,
                                                   const Trajectory& trajectory);

Trajectory load_trajectory(const std::filesystem::path& dir);

}  // namespace ostrovsky
