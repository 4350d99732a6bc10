#include "lusw/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "lusw/config.hpp"
#include "lusw/error.hpp"
#include "lusw/io.hpp"
#include "lusw/parallel.hpp"
#include "lusw/random.hpp"
#include "lusw/studies.hpp"

namespace lusw {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? parse_config("") : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message, const std::string& key = {}) {
  json j{{"error", kind}, {"message", message}};
  if (!key.empty()) j["key"] = key;
  err << j.dump() << "\n";
}

std::string realization_dir(const RunConfig& cfg, std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "r%03zu", r);
  return (fs::path(cfg.output_dir) / buf).string();
}

std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.lusw", i);
  return buf;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::size_t R = static_cast<std::size_t>(cfg.realizations);
  std::vector<Trajectory> results(R);
  parallel_for(R, [&](std::size_t r) { results[r] = run_realization(cfg, r); });

  const std::uint64_t digest = params_digest(cfg);
  const bool weak = cfg.model.regime == Regime::untruncated_weak;
  bool nan = false, failed = false;
  out << "realization,termination,tau_hit,steps,max_norm,stop_threshold";
  if (weak) out << ",weak_ratio,log_c_bound,within_bound";
  out << "\n";
  for (std::size_t r = 0; r < R; ++r) {
    const Trajectory& tr = results[r];
    const std::string dir = realization_dir(cfg, r);
    nan = write_diagnostics(tr.diagnostics, (fs::path(dir) / "diagnostics.csv").string()) || nan;
    for (std::size_t i = 0; i < tr.states.size(); ++i)
      write_snapshot((fs::path(dir) / snapshot_name(i)).string(), tr.states[i], cfg.grid, tr.times[i], digest);
    json summary{{"termination", std::string(to_string(tr.termination))},
                 {"steps", tr.steps},
                 {"max_norm", tr.max_norm},
                 {"stop_threshold", tr.stop_threshold},
                 {"seed", derive_seed(cfg.seed, r)},
                 {"digest", digest},
                 {"warnings", tr.warnings}};
    summary["tau_hit"] = tr.tau_hit ? json(*tr.tau_hit) : json(nullptr);
    out << r << ',' << to_string(tr.termination) << ',' << (tr.tau_hit ? format_double(*tr.tau_hit) : "") << ','
        << tr.steps << ',' << format_double(tr.max_norm) << ',' << format_double(tr.stop_threshold);
    if (weak) {
      const auto rep = weak_bound_monitor(tr.diagnostics, cfg.model, cfg.time.T);
      summary["weak_ratio"] = rep.max_ratio;
      summary["log_c_bound"] = rep.log_c_bound;
      out << ',' << format_double(rep.max_ratio) << ',' << format_double(rep.log_c_bound) << ','
          << (rep.within_bound ? "true" : "false");
    }
    out << "\n";
    write_text((fs::path(dir) / "summary.json").string(), summary.dump(2) + "\n");
    for (const auto& w : tr.warnings) err << json{{"warning", w}, {"realization", r}}.dump() << "\n";
    if (tr.termination == Termination::error) {
      emit_error(err, "non-finite", "realization " + std::to_string(r) + ": " + tr.error);
      failed = true;
    }
  }
  if (nan || failed) {
    if (nan) emit_error(err, "non-finite", "NaN written to diagnostics");
    return kExitNonFinite;
  }
  return kExitOk;
}

int cmd_cauchy(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.levels.size() < 2)
    throw ConfigError("cauchy study needs at least two study.levels", "study.levels");
  const std::size_t R = static_cast<std::size_t>(cfg.realizations);
  std::vector<CauchyReport> reps(R);
  parallel_for(R, [&](std::size_t r) { reps[r] = run_cauchy(cfg, derive_seed(cfg.seed, r)); });
  std::string csv = "realization,level_coarse,level_fine,sup_l2,int_h1\n";
  for (std::size_t r = 0; r < R; ++r)
    for (const auto& row : reps[r].rows)
      csv += std::to_string(r) + "," + std::to_string(row.level_coarse) + "," + std::to_string(row.level_fine) + "," +
             format_double(row.sup_l2) + "," + format_double(row.int_h1) + "\n";
  write_text((fs::path(cfg.output_dir) / "cauchy.csv").string(), csv);
  out << csv;
  bool failed = false;
  for (std::size_t r = 0; r < R; ++r) {
    out << "verdict," << r << ',' << (reps[r].decreasing ? "decreasing" : "not-decreasing") << ",rate,"
        << format_double(reps[r].rate) << "\n";
    for (auto t : reps[r].terminations) failed = failed || t == Termination::error;
  }
  if (failed) {
    emit_error(err, "non-finite", "a cauchy level produced non-finite values");
    return kExitNonFinite;
  }
  return kExitOk;
}

int cmd_energy_audit(const RunConfig& cfg, const std::string& input, std::ostream& out) {
  const SweOperator op = make_operator(cfg);
  std::vector<double> times;
  std::vector<State> states;
  if (!input.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(input))
      if (e.path().extension() == ".lusw") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no .lusw snapshots in '" + input + "'");
    const std::uint64_t digest = params_digest(cfg);
    for (const auto& f : files) {
      const Snapshot s = read_snapshot(f.string(), digest);
      if (static_cast<int>(s.level) != cfg.grid.level) throw IoError("snapshot level does not match grid.J");
      times.push_back(s.time);
      states.push_back(s.to_state());
    }
  } else {
    RunConfig c = cfg;
    if (c.time.snapshot_stride == 0)
      c.time.snapshot_stride = std::max(1, static_cast<int>(std::llround(c.time.T / c.time.dt)) / 10);
    const Trajectory tr = run_realization(c, 0);
    times = tr.times;
    states = tr.states;
  }
  const AuditReport rep = energy_audit(op, times, states);
  std::string csv = "t,E_swe,tendency_exact,tendency_projected,cancel1,cancel2,l2_balance\n";
  for (const auto& r : rep.rows)
    csv += format_double(r.t) + "," + format_double(r.energy) + "," + format_double(r.tendency_exact) + "," +
           format_double(r.tendency_projected) + "," + format_double(r.cancel1) + "," + format_double(r.cancel2) + "," +
           format_double(r.balance) + "\n";
  write_text((fs::path(cfg.output_dir) / "energy_audit.csv").string(), csv);
  out << csv;
  out << "energy_drift," << format_double(rep.energy_drift) << "\n";
  out << "max_tendency," << format_double(rep.max_tendency) << "\n";
  out << "max_cancel," << format_double(rep.max_cancel) << "\n";
  out << "max_l2_balance," << format_double(rep.max_balance) << "\n";
  return kExitOk;
}

int cmd_noise_info(const RunConfig& cfg, std::ostream& out) {
  const NoiseBasis basis = build_basis(cfg.noise, cfg.grid);
  out << "n,l1,l2,part,lambda,phi_l2\n";
  std::size_t n = 0;
  for (const auto& m : basis.modes()) {
    const char* part = m.part == NoiseMode::Part::cosine ? "cos" : m.part == NoiseMode::Part::sine ? "sin" : "const";
    out << ++n << ',' << m.wavenumber[0] << ',' << m.wavenumber[1] << ',' << part << ','
        << format_double(m.amplitude * m.amplitude) << ',' << format_double(l2_norm(m.phi)) << "\n";
  }
  const int points = std::max(cfg.grid.points, fft_good_size(4 * basis.half_width() + 1));
  const FftGrid fg(points);
  const auto& a = basis.covariance();
  const auto xx = fg.to_physical(a.xx);
  const auto yy = fg.to_physical(a.yy);
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (std::size_t i = 0; i < xx.size(); ++i) {
    const double tr = xx[i] + yy[i];
    lo = std::min(lo, tr);
    hi = std::max(hi, tr);
    sum += tr;
  }
  const auto& us = basis.stokes_drift();
  out << "key,value\n";
  out << "modes," << basis.size() << "\n";
  out << "trace_min," << format_double(lo) << "\n";
  out << "trace_mean," << format_double(sum / static_cast<double>(xx.size())) << "\n";
  out << "trace_max," << format_double(hi) << "\n";
  out << "min_eigenvalue," << format_double(min_eigenvalue_on_grid(a, points)) << "\n";
  out << "us_l2," << format_double(l2_norm(us)) << "\n";
  out << "us_h1," << format_double(sobolev_norm(us, 1.0)) << "\n";
  out << "div_us_l2," << format_double(l2_norm(div(us))) << "\n";
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const OracleReport rep = oracle_transport(cfg);
  std::string csv = "dt,err_noise,err_det\n";
  for (const auto& r : rep.rows)
    csv += format_double(r.dt) + "," + format_double(r.err_noise) + "," + format_double(r.err_det) + "\n";
  write_text((fs::path(cfg.output_dir) / "oracle_transport.csv").string(), csv);
  out << csv;
  out << "order_noise," << format_double(rep.order_noise) << "\n";
  out << "order_det," << format_double(rep.order_det) << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic rotating shallow water under location uncertainty"};
  app.require_subcommand(1, 1);
  Common common;
  std::string input;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Configuration file (key = value)");
    sub->add_option("--seed", common.seed, "Master seed override");
    sub->add_option("--out", common.out, "Output directory override");
  };
  auto* run = app.add_subcommand("run", "Integrate trajectories and write diagnostics and snapshots");
  auto* cauchy = app.add_subcommand("cauchy", "Pairwise differences across dyadic levels");
  auto* audit = app.add_subcommand("energy-audit", "Energy and identity report over a snapshot series");
  auto* info = app.add_subcommand("noise-info", "Noise mode table and covariance statistics");
  auto* oracle = app.add_subcommand("oracle-transport", "Euler-Maruyama error against exact transport");
  for (auto* s : {run, cauchy, audit, info, oracle}) add_common(s);
  audit->add_option("--input", input, "Directory of .lusw snapshots to replay");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    err << app.help();
    return kExitUsage;
  }

  try {
    const RunConfig cfg = resolve(common);
    if (run->parsed()) return cmd_run(cfg, out, err);
    if (cauchy->parsed()) return cmd_cauchy(cfg, out, err);
    if (audit->parsed()) return cmd_energy_audit(cfg, input, out);
    if (info->parsed()) return cmd_noise_info(cfg, out);
    if (oracle->parsed()) return cmd_oracle(cfg, out);
    emit_error(err, "usage", "no subcommand");
    return kExitUsage;
  } catch (const ConfigError& e) {
    emit_error(err, "validation", e.what(), e.key());
    return kExitValidation;
  } catch (const IoError& e) {
    emit_error(err, "io", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    emit_error(err, "io", e.what());
    return kExitIo;
  } catch (const IntegrationError& e) {
    emit_error(err, "non-finite", e.what());
    return kExitNonFinite;
  } catch (const std::exception& e) {
    emit_error(err, "runtime", e.what());
    return kExitRuntime;
  }
}

}  // namespace lusw
