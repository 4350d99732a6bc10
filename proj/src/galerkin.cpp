#include "lusw/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lusw/error.hpp"
#include "lusw/random.hpp"

namespace lusw {

double BrownianPath::endpoint(int mode, int steps) const {
  double b = 0.0;
  for (int i = 0; i < steps; ++i) b += increments[static_cast<std::size_t>(i) * n_modes + mode];
  return b;
}

BrownianPath sample_brownian(std::uint64_t seed, double dt, int n_steps, int n_modes) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time.dt must be > 0", "time.dt");
  if (n_steps < 0 || n_modes < 0) throw ConfigError("Brownian path sizes must be >= 0");
  BrownianPath p{seed, dt, n_steps, n_modes, {}};
  p.increments.resize(static_cast<std::size_t>(n_steps) * n_modes);
  const std::uint64_t key = splitmix64(seed ^ 0x42524F574E49414Eull);
  const double s = std::sqrt(dt);
  for (int i = 0; i < n_steps; ++i)
    for (int m = 0; m < n_modes; ++m)
      p.increments[static_cast<std::size_t>(i) * n_modes + m] =
          s * normal_pair(key, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(i), 1u)[0];
  return p;
}

BrownianPath coarsen(const BrownianPath& path, int factor) {
  if (factor < 1 || path.n_steps % factor != 0)
    throw ConfigError("coarsen: step count " + std::to_string(path.n_steps) + " not divisible by " +
                      std::to_string(factor));
  BrownianPath out{path.seed, path.dt * factor, path.n_steps / factor, path.n_modes, {}};
  out.increments.assign(static_cast<std::size_t>(out.n_steps) * out.n_modes, 0.0);
  for (int i = 0; i < path.n_steps; ++i)
    for (int m = 0; m < path.n_modes; ++m)
      out.increments[static_cast<std::size_t>(i / factor) * out.n_modes + m] +=
          path.increments[static_cast<std::size_t>(i) * path.n_modes + m];
  return out;
}

State em_step(const State& x, double dt, const SweOperator& op, std::span<const double> dbeta) {
  State next = x;
  next += op.increment(x, dt, dbeta);
  if (!all_finite(next)) throw IntegrationError("non-finite state after Euler-Maruyama step");
  return next;
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::stopped: return "stopped";
    case Termination::error: return "error";
  }
  return "error";
}

namespace {

int step_count(double T, double dt) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("time.T must be > 0", "time.T");
  const double r = T / dt;
  const long long n = std::llround(r);
  if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    throw ConfigError("time.T must be a whole multiple of time.dt", "time.T");
  return static_cast<int>(n);
}

double max_speed(const SweOperator& op, const State& x) {
  const FftGrid& fg = op.noise().grid();
  const auto u1 = fg.to_physical(x.u.x);
  const auto u2 = fg.to_physical(x.u.y);
  double m = 0.0;
  for (std::size_t i = 0; i < u1.size(); ++i) m = std::max(m, std::hypot(u1[i], u2[i]));
  return m;
}

}  // namespace

Trajectory run_trajectory(const State& x0, double T, const SweOperator& op, const BrownianPath& path,
                          const RunOptions& opts) {
  const double dt = path.dt;
  const int n_steps = step_count(T, dt);
  if (n_steps > path.n_steps)
    throw ConfigError("Brownian path has " + std::to_string(path.n_steps) + " steps, run needs " +
                      std::to_string(n_steps));
  const std::size_t modes = op.basis().size();
  if (static_cast<std::size_t>(path.n_modes) < modes)
    throw ConfigError("Brownian path has fewer modes than the noise basis");
  if (x0.half_width() != op.half_width()) throw ConfigError("initial state width does not match grid.J");
  if (!all_finite(x0)) throw ConfigError("initial state is not finite");

  const int k = op.params().k;
  const double n0 = composite_norm(x0, k);
  Trajectory tr;
  tr.stop_threshold = opts.stop_threshold > 0.0 ? opts.stop_threshold : 1e3 * n0;
  if (!(tr.stop_threshold > n0)) throw ConfigError("stopping.threshold must exceed ||X_0||_{k,2}", "stopping.threshold");
  const int diag_stride = std::max(1, opts.diagnostics_stride);
  const double dx_grid = kTwoPi / op.quadrature_points();
  bool cfl_warned = false;

  WeakBoundAccumulator weak(op.params());
  const auto record = [&](double t, const State& x) {
    tr.diagnostics.push_back(make_record(t, x, op, weak.value(), opts.record));
    if (!cfl_warned) {
      const double v = max_speed(op, x);
      if (v > 0.0 && dt > opts.c_cfl * dx_grid / v) {
        tr.warnings.push_back("CFL: dt=" + std::to_string(dt) + " exceeds " + std::to_string(opts.c_cfl) +
                              " dx/|u|_inf=" + std::to_string(opts.c_cfl * dx_grid / v) + " at t=" +
                              std::to_string(t));
        cfl_warned = true;
      }
    }
  };

  State x = x0;
  double t = 0.0;
  tr.max_norm = n0;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  weak.observe(x);
  record(0.0, x);
  bool last_recorded = true;
  bool last_snapshot = true;

  for (int s = 0; s < n_steps; ++s) {
    State next = x;
    next += op.increment(x, dt, path.step(s).first(modes));
    const double t_next = (s + 1) * dt;
    if (!all_finite(next)) {
      tr.termination = Termination::error;
      tr.error = "non-finite state at t=" + std::to_string(t_next);
      break;
    }
    const double norm = composite_norm(next, k);
    if (norm >= tr.stop_threshold) {
      tr.termination = Termination::stopped;
      tr.tau_hit = t_next;
      break;
    }
    weak.advance(dt);
    x = std::move(next);
    t = t_next;
    tr.steps = s + 1;
    tr.max_norm = std::max(tr.max_norm, norm);
    weak.observe(x);
    last_recorded = (s + 1) % diag_stride == 0;
    if (last_recorded) record(t, x);
    last_snapshot = opts.snapshot_stride > 0 && (s + 1) % opts.snapshot_stride == 0;
    if (last_snapshot) {
      tr.times.push_back(t);
      tr.states.push_back(x);
    }
  }
  if (!last_recorded) record(t, x);
  if (!last_snapshot) {
    tr.times.push_back(t);
    tr.states.push_back(x);
  }
  return tr;
}

SpectralField exact_transport_oracle(const SpectralField& q0, std::array<double, 2> c, double b) {
  SpectralField out(q0.half_width());
  const int n = q0.half_width();
  for (int a = -n; a <= n; ++a)
    for (int d = -n; d <= n; ++d)
      out.at(a, d) = q0(a, d) * std::polar(1.0, -(a * c[0] + d * c[1]) * b);
  return out;
}

SpectralField advection_diffusion_oracle(const SpectralField& q0, std::array<double, 2> velocity, double eta,
                                         double t) {
  SpectralField out(q0.half_width());
  const int n = q0.half_width();
  for (int a = -n; a <= n; ++a)
    for (int d = -n; d <= n; ++d) {
      const double decay = std::exp(-eta * (a * a + d * d) * t);
      out.at(a, d) = q0(a, d) * std::polar(decay, -(a * velocity[0] + d * velocity[1]) * t);
    }
  return out;
}

CauchyReport cauchy_study(std::span<const int> levels, const State& x0_fine, double T,
                          const std::function<SweOperator(int)>& make_op, const BrownianPath& path) {
  if (levels.size() < 2) throw ConfigError("cauchy study needs at least two levels", "study.levels");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] != levels[i - 1] + 1 && levels[i] != levels[i - 1])
      throw ConfigError("study.levels must be ascending consecutive dyadic levels", "study.levels");
  const double dt = path.dt;
  const int n_steps = step_count(T, dt);
  if (n_steps > path.n_steps) throw ConfigError("Brownian path too short for the study horizon");

  std::vector<SweOperator> ops;
  std::vector<State> xs;
  for (int lv : levels) {
    ops.push_back(make_op(lv));
    if (static_cast<std::size_t>(path.n_modes) < ops.back().basis().size())
      throw ConfigError("Brownian path has fewer modes than the noise basis");
    if (ops.back().basis().size() != ops.front().basis().size())
      throw ConfigError("cauchy levels must share one noise basis", "noise.wavenumbers");
    xs.push_back(lp_project(x0_fine, lv).resized(ops.back().half_width()));
  }
  const std::size_t modes = ops.front().basis().size();

  CauchyReport rep;
  rep.terminations.assign(levels.size(), Termination::completed);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) rep.rows.push_back({levels[i], levels[i + 1], 0.0, 0.0});

  const auto measure = [&](double weight) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const State d = xs[i + 1] - xs[i].resized(xs[i + 1].half_width());
      auto& row = rep.rows[i];
      row.sup_l2 = std::max(row.sup_l2, l2_norm(d));
      row.int_h1 += weight * squared_sobolev(d, 1.0);
    }
  };

  bool failed = false;
  for (int s = 0; s < n_steps && !failed; ++s) {
    measure(dt);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] += ops[i].increment(xs[i], dt, path.step(s).first(modes));
      if (!all_finite(xs[i])) {
        rep.terminations[i] = Termination::error;
        failed = true;
      }
    }
  }
  if (!failed) measure(0.0);
  for (auto& row : rep.rows) row.int_h1 = std::sqrt(row.int_h1);

  rep.decreasing = !failed;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (!(rep.rows[i].sup_l2 < rep.rows[i - 1].sup_l2)) rep.decreasing = false;
  if (rep.rows.size() >= 2) {
    std::vector<double> n, e;
    for (const auto& row : rep.rows) {
      n.push_back(std::ldexp(1.0, row.level_coarse));
      e.push_back(row.sup_l2);
    }
    rep.rate = -fitted_order(n, e);
  }
  return rep;
}

double fitted_order(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2) throw ConfigError("fitted_order needs >= 2 matching samples");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0)) continue;
    x.push_back(std::log(h[i]));
    y.push_back(std::log(err[i]));
  }
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace lusw
