#pragma once

// Euler-Maruyama integration of the Galerkin system on B_J with Brownian
// increments shared across resolutions and step-size refinements.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lusw/diagnostics.hpp"
#include "lusw/model.hpp"

namespace lusw {

/// Per-mode Brownian increments on a uniform time grid, stored step-major.
struct BrownianPath {
  std::uint64_t seed = 0;
  double dt = 0.0;
  int n_steps = 0;
  int n_modes = 0;
  std::vector<double> increments;

  std::span<const double> step(int i) const {
    return {increments.data() + static_cast<std::size_t>(i) * n_modes, static_cast<std::size_t>(n_modes)};
  }
  /// B_t of one mode after `steps` steps.
  double endpoint(int mode, int steps) const;
};

/// N(0, dt) increments from Philox keyed by (seed, mode, step): mode n is
/// identical for any n_modes > n. Throws ConfigError unless dt > 0.
BrownianPath sample_brownian(std::uint64_t seed, double dt, int n_steps, int n_modes);
/// Path with step factor*dt whose increments are sums of `factor`
/// consecutive increments. n_steps must be divisible by factor.
BrownianPath coarsen(const BrownianPath& path, int factor);

/// X + drift(X) dt + diffusion(X, dbeta). Throws IntegrationError when the
/// result is not finite.
State em_step(const State& x, double dt, const SweOperator& op, std::span<const double> dbeta);

enum class Termination { completed, stopped, error };
std::string_view to_string(Termination t) noexcept;

struct RunOptions {
  /// Stop once ||X||_{k,2} >= threshold; <= 0 selects 1e3 ||X_0||_{k,2}.
  double stop_threshold = 0.0;
  /// Snapshot every n steps (and the final state); 0 keeps only X_0 and the final state.
  int snapshot_stride = 0;
  int diagnostics_stride = 1;
  RecordOptions record;
  /// dt <= c_cfl dx / ||u||_inf, warning only.
  double c_cfl = 0.5;
};

struct Trajectory {
  std::vector<double> times;  // snapshot times
  std::vector<State> states;
  std::vector<DiagnosticsRecord> diagnostics;
  Termination termination = Termination::completed;
  std::optional<double> tau_hit;
  double stop_threshold = 0.0;
  /// Largest ||X||_{k,2} over all retained steps.
  double max_norm = 0.0;
  int steps = 0;
  std::vector<std::string> warnings;
  std::string error;

  const State& final_state() const { return states.back(); }
};

/// Advances X_0 to T with the first round(T / path.dt) increments of `path`.
/// Diagnostics include the weak-bound running value. Stopping: a step whose
/// result reaches the threshold is discarded and its time recorded as tau_hit.
Trajectory run_trajectory(const State& x0, double T, const SweOperator& op, const BrownianPath& path,
                          const RunOptions& opts = {});

/// q0(x - c B) as the phase shift qhat(l) e^{-i l.c B}.
SpectralField exact_transport_oracle(const SpectralField& q0, std::array<double, 2> c, double b);
/// Solution of dq/dt + U.grad q = eta Delta q: qhat(l) e^{(-i l.U - eta |l|^2) t}.
SpectralField advection_diffusion_oracle(const SpectralField& q0, std::array<double, 2> velocity,
                                         double eta, double t);

struct CauchyRow {
  int level_coarse = 0;
  int level_fine = 0;
  double sup_l2 = 0.0;      // sup_t ||X^N - X^2N||_2
  double int_h1 = 0.0;      // (\int ||X^N - X^2N||_{1,2}^2 dt)^(1/2)
};

struct CauchyReport {
  std::vector<CauchyRow> rows;
  std::vector<Termination> terminations;  // per level
  bool decreasing = false;                // sup_l2 strictly decreasing along rows
  double rate = 0.0;                      // fitted decay exponent of sup_l2 vs N
};

/// Runs every level in lockstep with the same path. X_0 is given at the
/// finest width and projected per level; levels must be ascending and
/// consecutive pairs compared. `make_op(level)` builds the operator of a level.
CauchyReport cauchy_study(std::span<const int> levels, const State& x0_fine, double T,
                          const std::function<SweOperator(int)>& make_op, const BrownianPath& path);

/// Least-squares slope of log(err) against log(h).
double fitted_order(std::span<const double> h, std::span<const double> err);

}  // namespace lusw
