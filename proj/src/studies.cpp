#include "lusw/studies.hpp"

#include <algorithm>
#include <cmath>

#include "lusw/error.hpp"
#include "lusw/parallel.hpp"
#include "lusw/random.hpp"

namespace lusw {

SweOperator make_operator(const RunConfig& cfg) {
  return SweOperator(cfg.model, build_basis(cfg.noise, cfg.grid), cfg.grid);
}

SweOperator make_operator(const RunConfig& cfg, int level) {
  const GridSpec grid = level == cfg.grid.level ? cfg.grid : GridSpec::for_level(level);
  return SweOperator(cfg.model, build_basis(cfg.noise, grid), grid);
}

namespace {

int steps_for(const RunConfig& cfg, double dt) { return static_cast<int>(std::llround(cfg.time.T / dt)); }

}  // namespace

Trajectory run_realization(const RunConfig& cfg, std::size_t index) {
  const SweOperator op = make_operator(cfg);
  const State x0 = initial_state(cfg.init, op.half_width());
  const auto path = sample_brownian(derive_seed(cfg.seed, index), cfg.time.dt, steps_for(cfg, cfg.time.dt),
                                    static_cast<int>(op.basis().size()));
  RunOptions opts;
  opts.stop_threshold = stop_threshold(cfg, x0);
  opts.snapshot_stride = cfg.time.snapshot_stride;
  opts.diagnostics_stride = cfg.time.diagnostics_stride;
  opts.record.flux = cfg.flux;
  return run_trajectory(x0, cfg.time.T, op, path, opts);
}

OracleReport oracle_transport(const RunConfig& cfg) {
  const GridSpec grid = cfg.grid;
  const int n = grid.cutoff();
  const int h = cfg.halvings;
  const double dt_fine = std::ldexp(cfg.time.dt, -h);
  const int fine_steps = steps_for(cfg, dt_fine);
  const double T = cfg.time.T;

  ModelParams p = cfg.model;
  p.f = 0.0;
  p.g = 0.0;
  p.nu = 0.0;
  p.eta = 0.0;
  NoiseSpec ns;
  ns.family = NoiseFamily::single_constant_vector;
  ns.vector = cfg.noise.vector;
  ns.scale = cfg.noise.scale;
  const SweOperator noisy(p, build_basis(ns, grid), grid);
  const std::array<double, 2> c{ns.scale * ns.vector[0], ns.scale * ns.vector[1]};

  ModelParams pd = p;
  pd.eta = cfg.model.eta;
  NoiseSpec quiet = ns;
  quiet.scale = 0.0;
  const SweOperator det(pd, build_basis(quiet, grid), grid);

  const State init = initial_state(cfg.init, n);
  State x0(n);
  x0.h = init.h;

  OracleReport rep;
  for (int l = 0; l <= h; ++l) rep.rows.push_back({std::ldexp(cfg.time.dt, -l), 0.0, 0.0});

  // Noise on: RMS error over realizations.
  std::vector<std::vector<double>> sq(static_cast<std::size_t>(cfg.realizations), std::vector<double>(h + 1));
  parallel_for(sq.size(), [&](std::size_t r) {
    const auto fine = sample_brownian(derive_seed(cfg.seed, r), dt_fine, fine_steps, 1);
    const auto exact = exact_transport_oracle(x0.h, c, fine.endpoint(0, fine_steps));
    for (int l = 0; l <= h; ++l) {
      const auto path = coarsen(fine, 1 << (h - l));
      State x = x0;
      for (int s = 0; s < path.n_steps; ++s) x = em_step(x, path.dt, noisy, path.step(s));
      const double e = l2_norm(x.h - exact);
      sq[r][l] = e * e;
    }
  });
  for (int l = 0; l <= h; ++l) {
    double acc = 0.0;
    for (const auto& v : sq) acc += v[l];
    rep.rows[l].err_noise = std::sqrt(acc / static_cast<double>(sq.size()));
  }

  // Noise off: constant velocity U, exact multiplier.
  State y0 = x0;
  y0.u.x.at(0, 0) = cfg.oracle_velocity[0];
  y0.u.y.at(0, 0) = cfg.oracle_velocity[1];
  State exact = y0;
  exact.h = advection_diffusion_oracle(x0.h, cfg.oracle_velocity, pd.eta, T);
  parallel_for(static_cast<std::size_t>(h + 1), [&](std::size_t l) {
    const double dt = rep.rows[l].dt;
    const int steps = steps_for(cfg, dt);
    const std::vector<double> none(det.basis().size(), 0.0);
    State x = y0;
    for (int s = 0; s < steps; ++s) x = em_step(x, dt, det, none);
    rep.rows[l].err_det = l2_norm(x - exact);
  });

  std::vector<double> dts, en, ed;
  for (const auto& r : rep.rows) {
    dts.push_back(r.dt);
    en.push_back(r.err_noise);
    ed.push_back(r.err_det);
  }
  rep.order_noise = fitted_order(dts, en);
  rep.order_det = fitted_order(dts, ed);
  return rep;
}

CauchyReport run_cauchy(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.levels.size() < 2) throw ConfigError("cauchy study needs at least two study.levels", "study.levels");
  const int top = cfg.levels.back();
  const State x0 = initial_state(cfg.init, 1 << top);
  const SweOperator coarse = make_operator(cfg, cfg.levels.front());
  const auto path = sample_brownian(seed, cfg.time.dt, steps_for(cfg, cfg.time.dt),
                                    static_cast<int>(coarse.basis().size()));
  return cauchy_study(cfg.levels, x0, cfg.time.T, [&](int level) { return make_operator(cfg, level); }, path);
}

AuditReport energy_audit(const SweOperator& op, const std::vector<double>& times, const std::vector<State>& states) {
  if (times.size() != states.size()) throw ConfigError("energy_audit: times and states differ in length");
  AuditReport rep;
  rep.rows.resize(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    const State& x = states[i];
    const auto tend = energy_tendency(x, op);
    const auto c = cancellation_residuals(x, op.noise());
    double bal = 0.0;
    for (const SpectralField* f : x.components())
      bal = std::max(bal, std::abs(l2_energy_balance(*f, op.basis())));
    const double e = tend.energy;
    rep.rows[i] = {times[i], e, e != 0.0 ? tend.exact / e : tend.exact, e != 0.0 ? tend.projected / e : tend.projected,
                   c.r1, c.r2, bal};
  });
  for (const auto& r : rep.rows) {
    rep.max_tendency = std::max(rep.max_tendency, std::abs(r.tendency_exact));
    rep.max_cancel = std::max({rep.max_cancel, std::abs(r.cancel1), std::abs(r.cancel2)});
    rep.max_balance = std::max(rep.max_balance, r.balance);
  }
  if (!rep.rows.empty() && rep.rows.front().energy != 0.0)
    rep.energy_drift = std::abs(rep.rows.back().energy - rep.rows.front().energy) / std::abs(rep.rows.front().energy);
  return rep;
}

}  // namespace lusw
