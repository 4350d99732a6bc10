#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lusw/cli.hpp"
#include "lusw/config.hpp"
#include "lusw/diagnostics.hpp"
#include "lusw/error.hpp"
#include "lusw/io.hpp"
#include "lusw/studies.hpp"

namespace py = pybind11;
using namespace lusw;

namespace {

// (3, M, M) array of u1, u2, h samples.
py::array_t<double> fields_array(const Snapshot& s) {
  const auto m = static_cast<py::ssize_t>(s.points);
  py::array_t<double> a({py::ssize_t{3}, m, m});
  auto* p = a.mutable_data();
  for (const auto& f : s.fields) p = std::copy(f.begin(), f.end(), p);
  return a;
}

Snapshot snapshot_of(py::array_t<double, py::array::c_style | py::array::forcecast> fields, int level) {
  if (fields.ndim() != 3 || fields.shape(0) != 3 || fields.shape(1) != fields.shape(2))
    throw py::value_error("fields must have shape (3, M, M)");
  Snapshot s;
  s.level = static_cast<std::uint32_t>(level);
  s.points = static_cast<std::uint32_t>(fields.shape(1));
  GridSpec{level, static_cast<int>(s.points)}.validate();
  const auto n = static_cast<std::size_t>(s.points) * s.points;
  for (std::size_t c = 0; c < 3; ++c) s.fields[c].assign(fields.data() + c * n, fields.data() + (c + 1) * n);
  return s;
}

py::dict snapshot_dict(const Snapshot& s) {
  py::dict d;
  d["level"] = s.level;
  d["points"] = s.points;
  d["time"] = s.time;
  d["digest"] = s.digest;
  d["fields"] = fields_array(s);
  return d;
}

py::dict record_dict(const std::vector<DiagnosticsRecord>& recs) {
  py::dict d;
  const auto column = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : recs) v.push_back(get(r));
    return v;
  };
  d["t"] = column([](const auto& r) { return r.t; });
  d["E_swe"] = column([](const auto& r) { return r.E_swe; });
  d["l2"] = column([](const auto& r) { return r.l2; });
  d["u_k2"] = column([](const auto& r) { return r.u_k2; });
  d["h_k2"] = column([](const auto& r) { return r.h_k2; });
  d["cancel1"] = column([](const auto& r) { return r.cancel1; });
  d["cancel2"] = column([](const auto& r) { return r.cancel2; });
  d["weak_lhs"] = column([](const auto& r) { return r.weak_lhs; });
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic rotating shallow water under location uncertainty";

  static const py::handle config_error = py::exception<ConfigError>(m, "ConfigError", PyExc_ValueError).release();
  static const py::handle io_error = py::exception<IoError>(m, "IoError", PyExc_OSError).release();
  static const py::handle integration_error =
      py::exception<IntegrationError>(m, "IntegrationError", PyExc_ArithmeticError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetObject(config_error.ptr(), py::make_tuple(e.what(), e.key()).ptr());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    } catch (const IntegrationError& e) {
      py::set_error(integration_error, e.what());
    }
  });

  m.def("canonical_config", [](const std::string& text) { return to_text(parse_config(text)); },
        "Validated canonical form of a config document.", py::arg("text"));
  m.def("params_digest", [](const std::string& text) { return params_digest(parse_config(text)); },
        py::arg("text"));

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "lusw");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs the command line tool; returns (exit_code, stdout, stderr).", py::arg("args"));

  m.def(
      "run",
      [](const std::string& text, std::size_t realization) {
        const auto cfg = parse_config(text);
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = run_realization(cfg, realization);
        }
        const auto digest = params_digest(cfg);
        py::list snaps;
        for (std::size_t i = 0; i < traj.states.size(); ++i)
          snaps.append(fields_array(Snapshot::from_state(traj.states[i], cfg.grid, traj.times[i], digest)));
        py::dict d;
        d["termination"] = std::string(to_string(traj.termination));
        d["tau_hit"] = traj.tau_hit ? py::object(py::float_(*traj.tau_hit)) : py::object(py::none());
        d["steps"] = traj.steps;
        d["max_norm"] = traj.max_norm;
        d["stop_threshold"] = traj.stop_threshold;
        d["times"] = traj.times;
        d["snapshots"] = snaps;
        d["diagnostics"] = record_dict(traj.diagnostics);
        d["warnings"] = traj.warnings;
        return d;
      },
      "Runs one realization of a config document.", py::arg("text"), py::arg("realization") = 0);

  m.def(
      "oracle_transport",
      [](const std::string& text) {
        const auto report = oracle_transport(parse_config(text));
        py::dict d;
        std::vector<double> dt, noise, det;
        for (const auto& r : report.rows) {
          dt.push_back(r.dt);
          noise.push_back(r.err_noise);
          det.push_back(r.err_det);
        }
        d["dt"] = dt;
        d["err_noise"] = noise;
        d["err_det"] = det;
        d["order_noise"] = report.order_noise;
        d["order_det"] = report.order_det;
        return d;
      },
      py::arg("text"));

  m.def(
      "swe_energy",
      [](py::array_t<double> fields, int level, double g, double rho) {
        ModelParams p;
        p.g = g;
        p.rho = rho;
        return swe_energy(snapshot_of(fields, level).to_state(), p);
      },
      "Energy of sampled (u1, u2, h) projected onto B_level.", py::arg("fields"), py::arg("level"),
      py::arg("g") = 9.81, py::arg("rho") = 1.0);
  m.def(
      "energy_flux",
      [](py::array_t<double> fields, int level, int flux_level) {
        return energy_flux(snapshot_of(fields, level).to_state().u, flux_level);
      },
      "Gamma_{2^flux_level} of the sampled velocity projected onto B_level.", py::arg("fields"),
      py::arg("level"), py::arg("flux_level"));

  m.def(
      "read_snapshot",
      [](const std::string& path, std::optional<std::uint64_t> digest) {
        return snapshot_dict(read_snapshot(path, digest));
      },
      py::arg("path"), py::arg("digest") = py::none());
  m.def(
      "write_snapshot",
      [](const std::string& path, py::array_t<double> fields, int level, double time, std::uint64_t digest) {
        auto s = snapshot_of(fields, level);
        s.time = time;
        s.digest = digest;
        write_snapshot(path, s);
      },
      py::arg("path"), py::arg("fields"), py::arg("level"), py::arg("time") = 0.0, py::arg("digest") = 0);
}
