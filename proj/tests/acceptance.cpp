// Desk-scale acceptance suite. One PASS/FAIL line per criterion; a criterion
// passes only when its checks hold and it finishes inside its time limit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lusw/cli.hpp"
#include "lusw/config.hpp"
#include "lusw/diagnostics.hpp"
#include "lusw/error.hpp"
#include "lusw/io.hpp"
#include "lusw/parallel.hpp"
#include "lusw/random.hpp"
#include "lusw/studies.hpp"
#include "oracles.hpp"

using namespace lusw;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void info(const std::string& s) { std::printf("  %s\n", s.c_str()); }

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

SpectralField smooth_field(int width, std::uint64_t seed, double decay) {
  return random_field(width, seed, 0, decay, width);
}

// ---------------------------------------------------------------------------

Outcome lp_algebra() {
  Outcome o;
  int bad_orth = 0, bad_part = 0, bad_tail = 0, bad_bern = 0;
  double worst_tail = 0.0, worst_lo = INFINITY, worst_hi = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto f = smooth_field(64, 1000 + s, 1.0 + (s % 4) * 0.5);
    const int top = f.max_block();
    std::vector<SpectralField> blocks;
    SpectralField sum(f.half_width());
    for (int j = 0; j <= top; ++j) {
      blocks.push_back(lp_block(f, j));
      sum += blocks.back();
    }
    if (max_abs_diff(sum, f) != 0.0) ++bad_part;
    for (int a = 0; a <= top; ++a)
      for (int b = 0; b <= top; ++b) {
        const auto ab = lp_block(blocks[a], b);
        const double m = a == b ? max_abs_diff(ab, blocks[a]) : l2_norm(ab);
        if (m != 0.0) ++bad_orth;
      }
    for (int k = 0; k <= 2; ++k)
      for (int level = 0; level < 6; ++level) {
        const double n = std::ldexp(1.0, level);
        const double tail = std::pow(sobolev_norm(f - lp_project(f, level).resized(64), k), 2);
        const double bound = std::pow(sobolev_norm(f, k + 1), 2) / n;
        worst_tail = std::max(worst_tail, tail / bound);
        if (!(tail <= bound)) ++bad_tail;
      }
    for (double sp : {0.5, 1.0, 2.0, 3.0})
      for (int j = 1; j <= top; ++j) {
        const double base = l2_norm(blocks[j]);
        if (base == 0.0) continue;
        const double r = l2_norm(fractional_laplacian(blocks[j], sp)) / (std::pow(2.0, j * sp) * base);
        const double lo = std::pow(2.0, -sp), hi = std::pow(2.0, sp / 2);
        worst_lo = std::min(worst_lo, r / lo);
        worst_hi = std::max(worst_hi, r / hi);
        if (r < lo * (1 - 1e-14) || r > hi * (1 + 1e-14)) ++bad_bern;
      }
  }
  info("orthogonality violations " + std::to_string(bad_orth) + ", partition violations " + std::to_string(bad_part));
  info("tail: max lhs/rhs " + num(worst_tail) + ", violations " + std::to_string(bad_tail));
  info("Bernstein: min ratio/C1 " + num(worst_lo) + ", max ratio/C2 " + num(worst_hi) + ", violations " +
       std::to_string(bad_bern));
  o.pass = bad_orth == 0 && bad_part == 0 && bad_tail == 0 && bad_bern == 0;
  o.detail = "100 fields, k in {0,1,2}, s in {0.5,1,2,3}";
  return o;
}

// ---------------------------------------------------------------------------

std::vector<NoiseSpec> identity_specs() {
  NoiseSpec a;
  a.wavenumbers = {{1, 0}, {0, 1}, {1, 1}};
  a.scale = 0.3;
  NoiseSpec b;
  b.wavenumbers = {{2, -1}, {3, 2}, {1, 4}, {5, 0}, {4, 4}};
  b.scale = 0.5;
  b.decay = 1.5;
  NoiseSpec c;
  c.family = NoiseFamily::single_constant_vector;
  c.vector = {0.6, -0.8};
  c.scale = 0.4;
  return {a, b, c};
}

Outcome identities() {
  const GridSpec grid = GridSpec::for_level(5);
  const int n = grid.cutoff();
  double w1 = 0.0, w2 = 0.0, wb = 0.0;
  for (const auto& spec : identity_specs()) {
    const NoiseBasis basis = build_basis(spec, grid);
    const int kw = basis.half_width();
    const NoiseOperators ops(basis, FftGrid(fft_good_size(std::max(required_points(n, kw), 4 * kw))));
    for (std::uint64_t s = 0; s < 50; ++s) {
      const State x = random_state(n, 2000 + s, 1.0 + (s % 3) * 0.5, n, 0.5, 0.2, 1.0);
      const auto r = cancellation_residuals(x, ops);
      w1 = std::max(w1, std::abs(r.r1));
      w2 = std::max(w2, std::abs(r.r2));
      for (const SpectralField* f : x.components()) wb = std::max(wb, std::abs(l2_energy_balance(*f, basis)));
    }
  }
  Outcome o;
  o.pass = w1 < 1e-10 && w2 < 1e-10 && wb < 1e-10;
  o.detail = "max |cancel1| " + num(w1, 3) + ", |cancel2| " + num(w2, 3) + ", |l2 balance| " + num(wb, 3);
  return o;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  RunConfig cfg;
  cfg.grid = GridSpec{5, 100};
  cfg.time.T = 0.5;
  cfg.time.dt = 1.0 / 64;
  cfg.halvings = 4;
  cfg.realizations = 80;
  cfg.seed = 1;
  cfg.noise.family = NoiseFamily::single_constant_vector;
  cfg.noise.vector = {1.0, 0.0};
  cfg.noise.scale = 0.5;
  cfg.model.eta = 0.01;
  cfg.oracle_velocity = {1.0, 0.0};
  validate(cfg);
  const auto rep = oracle_transport(cfg);
  bool decreasing = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    info("dt " + num(r.dt) + "  rms err (noise) " + num(r.err_noise) + "  err (no noise) " + num(r.err_det));
    if (i > 0 && !(r.err_noise < rep.rows[i - 1].err_noise && r.err_det < rep.rows[i - 1].err_det))
      decreasing = false;
  }
  Outcome o;
  o.pass = decreasing && rep.order_noise >= 0.4 && rep.order_noise <= 0.6 && rep.order_det >= 0.9 &&
           rep.order_det <= 1.1;
  o.detail = "order noise " + num(rep.order_noise) + " in [0.4,0.6], order no-noise " + num(rep.order_det) +
             " in [0.9,1.1], " + std::to_string(cfg.realizations) + " realizations" +
             (decreasing ? "" : ", errors not decreasing");
  return o;
}

// ---------------------------------------------------------------------------

Outcome pathwise_energy() {
  RunConfig cfg;  // default physics and noise
  cfg.grid = GridSpec{5, 100};
  cfg.model.nu = cfg.model.eta = 0.0;
  cfg.model.alpha = -1.0;
  cfg.model.beta = 0.0;
  cfg.time.T = 0.25;
  validate(cfg);
  const SweOperator op = make_operator(cfg);
  const State x0 = random_state(op.half_width(), 3, 2.0, 3, 0.2, 0.05, 1.0);
  const double e0 = swe_energy(x0, cfg.model);
  const int h = 4;
  const double dt0 = 1.0 / 64, dtf = std::ldexp(dt0, -h);
  const int fine_steps = static_cast<int>(std::llround(cfg.time.T / dtf));

  Outcome o;
  double worst_res = 0.0, worst_order = INFINITY;
  for (std::uint64_t r = 0; r < 3; ++r) {
    const auto fine = sample_brownian(derive_seed(cfg.seed, r), dtf, fine_steps, static_cast<int>(op.basis().size()));
    std::vector<double> hs, drift;
    for (int l = 0; l <= h; ++l) {
      const auto path = coarsen(fine, 1 << (h - l));
      State x = x0;
      for (int s = 0; s < path.n_steps; ++s) {
        const auto t = energy_tendency(x, op);
        worst_res = std::max(worst_res, std::abs(t.exact) / t.energy);
        x = em_step(x, path.dt, op, path.step(s));
      }
      hs.push_back(path.dt);
      drift.push_back(std::abs(swe_energy(x, cfg.model) - e0) / e0);
    }
    bool dec = true;
    for (std::size_t i = 1; i < drift.size(); ++i) dec = dec && drift[i] < drift[i - 1];
    const double order = fitted_order(hs, drift);
    worst_order = std::min(worst_order, order);
    std::string line = "seed " + std::to_string(r) + ": |E(T)-E(0)|/E(0) =";
    for (double d : drift) line += " " + num(d, 3);
    info(line + "  order " + num(order));
    o.pass = o.pass && dec && order >= 1.0;
  }
  o.pass = o.pass && worst_res < 1e-9;
  o.detail = "max instantaneous residual " + num(worst_res, 3) + ", min drift order " + num(worst_order);
  return o;
}

// ---------------------------------------------------------------------------

Outcome weak_bound() {
  RunConfig cfg;
  cfg.grid = GridSpec::for_level(5);
  cfg.model.regime = Regime::untruncated_weak;
  cfg.model.alpha = cfg.model.beta = -0.5;
  cfg.model.k = 0;
  cfg.model.g = 9.81;
  cfg.model.nu = cfg.model.eta = 0.05;
  cfg.time.T = 1.0;
  cfg.realizations = 8;
  validate(cfg);
  const SweOperator op = make_operator(cfg);
  const State x0 = initial_state(cfg.init, op.half_width());
  RunOptions opts;
  opts.stop_threshold = stop_threshold(cfg, x0);
  opts.record.identities = false;

  const std::vector<double> dts{1.0 / 128, 1.0 / 256};
  Outcome o;
  double worst_var = 0.0, worst_ratio = 0.0;
  bool stopped = false, bounded = true;
  std::vector<std::vector<double>> ratio(dts.size(), std::vector<double>(cfg.realizations));
  parallel_for(static_cast<std::size_t>(cfg.realizations), [&](std::size_t r) {
    const int fine_steps = static_cast<int>(std::llround(cfg.time.T / dts.back()));
    const auto fine = sample_brownian(derive_seed(cfg.seed, r), dts.back(), fine_steps,
                                      static_cast<int>(op.basis().size()));
    for (std::size_t d = 0; d < dts.size(); ++d) {
      const auto path = coarsen(fine, static_cast<int>(std::llround(dts[d] / dts.back())));
      const auto tr = run_trajectory(x0, cfg.time.T, op, path, opts);
      const auto rep = weak_bound_monitor(tr.diagnostics, cfg.model, cfg.time.T);
      ratio[d][r] = tr.termination == Termination::completed && rep.within_bound ? rep.max_ratio : INFINITY;
    }
  });
  for (int r = 0; r < cfg.realizations; ++r) {
    const double a = ratio[0][r], b = ratio[1][r];
    if (!std::isfinite(a) || !std::isfinite(b)) {
      stopped = true;
      continue;
    }
    worst_ratio = std::max({worst_ratio, a, b});
    worst_var = std::max(worst_var, std::abs(a - b) / b);
    info("realization " + std::to_string(r) + ": ratio dt " + num(a, 8) + "  dt/2 " + num(b, 8));
  }
  bounded = std::isfinite(worst_ratio);
  o.pass = !stopped && bounded && worst_var < 0.05;
  o.detail = "max ratio " + num(worst_ratio) + ", max dt variation " + num(100 * worst_var, 3) + "%" +
             (stopped ? ", a realization stopped or left the bound" : "");
  return o;
}

// ---------------------------------------------------------------------------

Outcome cauchy_refinement() {
  RunConfig cfg;
  cfg.model.k = 2;
  cfg.model.nu = cfg.model.eta = 0.01;
  cfg.levels = {3, 4, 5, 6};
  cfg.grid = GridSpec::for_level(6);
  cfg.time.T = 0.1;
  cfg.time.dt = 1e-3;
  cfg.init.decay = 4.0;
  cfg.init.max_mode = 64;
  cfg.init.velocity_rms = 0.2;
  cfg.init.height_rms = 0.05;
  validate(cfg);
  Outcome o;
  for (std::uint64_t r = 0; r < 3; ++r) {
    const auto rep = run_cauchy(cfg, derive_seed(cfg.seed, r));
    std::string line = "seed " + std::to_string(r) + ": sup L2 diff";
    for (const auto& row : rep.rows) line += " " + num(row.sup_l2, 3);
    info(line + "  rate " + num(rep.rate));
    o.pass = o.pass && rep.decreasing;
  }
  o.detail = "levels 3..6, 3 seeds, strictly decreasing: " + std::string(o.pass ? "yes" : "no");
  return o;
}

// ---------------------------------------------------------------------------

Outcome stopping() {
  RunConfig cfg;
  cfg.grid = GridSpec::for_level(4);
  cfg.noise.scale = 1.0;
  cfg.time.T = 1.0;
  cfg.time.dt = 1e-2;
  const SweOperator op = make_operator(cfg);
  const State x0 = initial_state(cfg.init, op.half_width());
  RunOptions opts;
  opts.stop_threshold = 1.0001 * composite_norm(x0, cfg.model.k);
  opts.record.identities = false;
  const auto path = sample_brownian(derive_seed(cfg.seed, 0), cfg.time.dt, 100, static_cast<int>(op.basis().size()));
  const auto tr = run_trajectory(x0, cfg.time.T, op, path, opts);
  double sup = 0.0;
  for (const auto& s : tr.states) sup = std::max(sup, composite_norm(s, cfg.model.k));
  for (const auto& d : tr.diagnostics) sup = std::max(sup, d.u_k2 + d.h_k2);
  Outcome o;
  o.pass = tr.termination == Termination::stopped && tr.tau_hit.has_value() && *tr.tau_hit <= cfg.time.T &&
           sup <= tr.stop_threshold && tr.max_norm <= tr.stop_threshold;
  o.detail = "termination " + std::string(to_string(tr.termination)) + ", tau_hit " +
             (tr.tau_hit ? num(*tr.tau_hit) : std::string("none")) + ", sup norm / threshold " +
             num(sup / tr.stop_threshold, 10);
  return o;
}

// ---------------------------------------------------------------------------

Outcome flux() {
  double worst = 0.0, worst_zero = 0.0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const VectorField u{random_field(32, 3000 + s, 0, 1.0, 32), random_field(32, 3000 + s, 1, 1.0, 32)};
    for (int level : {3, 4}) {
      const double ref = oracle::triad_flux(u, level);
      worst = std::max(worst, std::abs(energy_flux(u, level) - ref) / std::abs(ref));
    }
  }
  for (int level = 1; level <= 5; ++level)
    for (std::uint64_t s = 0; s < 4; ++s) {
      const int n = 1 << level;
      VectorField u = perp_grad(random_field(n, 4000 + s, 0, 1.0, n));
      const double scale = 1.0 / l2_norm(u);
      u.x *= scale;
      u.y *= scale;
      worst_zero = std::max(worst_zero, std::abs(energy_flux(u, level)));
    }
  Outcome o;
  o.pass = worst < 1e-10 && worst_zero <= 1e-12;
  o.detail = "max rel. triad mismatch " + num(worst, 3) + ", max |Gamma_N| divergence-free in B_N " +
             num(worst_zero, 3) + " (unit L2)";
  return o;
}

// ---------------------------------------------------------------------------

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::vector<const char*> argv{"lusw"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

Outcome determinism_io() {
  Outcome o;
  const auto root = fs::temp_directory_path() / "lusw_acceptance";
  fs::remove_all(root);
  const std::string cfg_path = (root / "det.cfg").string();
  write_text(cfg_path,
             "grid.J = 4\nmodel.nu = 0.01\nmodel.eta = 0.01\nmodel.f = 0.5\nnoise.scale = 0.2\n"
             "time.T = 0.1\ntime.dt = 0.005\ntime.snapshot_stride = 5\nrng.realizations = 2\noutput.flux = true\n");
  std::string out_a, out_b;
  const int ca = cli({"run", "--config", cfg_path, "--seed", "11", "--out", (root / "a").string()}, &out_a);
  const int cb = cli({"run", "--config", cfg_path, "--seed", "11", "--out", (root / "b").string()}, &out_b);
  bool same = ca == 0 && cb == 0 && out_a == out_b;
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root / "a");
    same = same && read_text(e.path().string()) == read_text((root / "b" / rel).string());
    ++files;
  }
  info("run twice: " + std::to_string(files) + " artifacts, identical: " + (same ? "yes" : "no"));

  const GridSpec grid = GridSpec::for_level(4);
  const State x = random_state(16, 77, 1.5, 16, 0.4, 0.1, 1.0);
  const auto snap = Snapshot::from_state(x, grid, 0.375, 123);
  const auto bytes = encode_snapshot(snap);
  const std::string sp = (root / "x.lusw").string();
  write_snapshot(sp, snap);
  const auto back = read_snapshot(sp, 123);
  const auto raw = read_text(sp);
  const bool round = encode_snapshot(back) == bytes && std::string(bytes.begin(), bytes.end()) == raw &&
                     max_abs_diff(back.to_state(), x) < 1e-12;
  info(std::string("snapshot round trip bit-identical: ") + (round ? "yes" : "no"));

  struct Bad {
    const char* text;
    const char* key;
  };
  const std::vector<Bad> bad{
      {"model.regime = untruncated-weak\nmodel.alpha = 0\nmodel.beta = -0.5\nmodel.k = 0", "model.alpha"},
      {"model.regime = untruncated-weak\nmodel.alpha = -0.5\nmodel.beta = 0\nmodel.k = 0", "model.beta"},
      {"model.regime = untruncated-weak\nmodel.alpha = -0.5\nmodel.beta = -0.5\nmodel.k = 1", "model.k"},
      {"model.k = 0", "model.k"},
      {"model.nu = -1", "model.nu"},
      {"model.eta = -1", "model.eta"},
      {"model.rho = 0", "model.rho"},
      {"model.g = 0", "model.g"},
      {"model.R = -1", "model.R"},
      {"time.dt = 0", "time.dt"},
      {"time.T = 0", "time.T"},
      {"grid.J = 0", "grid.J"},
      {"grid.J = 4\ngrid.M = 40", "grid.M"},
      {"study.levels = 5,4", "study.levels"},
      {"noise.decay = 0.5", "noise.decay"},
      {"noise.wavenumbers = 0,0", "noise.wavenumbers"},
      {"noise.wavenumbers = 1,2;-1,-2", "noise.wavenumbers"},
      {"noise.scale = -0.1", "noise.scale"},
      {"model.unknown = 1", "model.unknown"},
  };
  int rejected = 0;
  for (const auto& b : bad) {
    try {
      parse_config(b.text);
      info(std::string("accepted: ") + b.key);
    } catch (const ConfigError& e) {
      if (e.key() == b.key)
        ++rejected;
      else
        info("wrong key for " + std::string(b.key) + ": " + e.key());
    }
  }
  o.pass = same && round && rejected == static_cast<int>(bad.size());
  o.detail = "bit-identical CSV and snapshots, " + std::to_string(rejected) + "/" + std::to_string(bad.size()) +
             " invariant violations rejected with their key";
  fs::remove_all(root);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "LP algebra", 10, lp_algebra},          {2, "identities", 30, identities},
      {3, "oracle equivalence", 120, oracle_equivalence}, {4, "pathwise energy", 120, pathwise_energy},
      {5, "weak-regime bound", 300, weak_bound},  {6, "Cauchy refinement", 300, cauchy_refinement},
      {7, "stopping logic", 10, stopping},        {8, "flux", 10, flux},
      {9, "determinism and I/O", 5, determinism_io},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
    std::printf("criterion %d (%s)\n", c.id, c.name);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit;
    const bool pass = o.pass && in_time;
    std::printf("criterion %d %s: %s; %.1f s (limit %.0f s)%s\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                c.limit, in_time ? "" : ", over time limit");
    std::fflush(stdout);
    failures += !pass;
  }
  return failures == 0 ? 0 : 1;
}
