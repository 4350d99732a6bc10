#pragma once

// Configured experiments shared by the CLI, the Python module and the tests.

#include <cstdint>
#include <string>
#include <vector>

#include "lusw/config.hpp"
#include "lusw/galerkin.hpp"

namespace lusw {

/// Operator for the configured grid, or for GridSpec::for_level(level).
SweOperator make_operator(const RunConfig& cfg);
SweOperator make_operator(const RunConfig& cfg, int level);

/// One realization: X_0 from init, Brownian seed derive_seed(cfg.seed, index).
Trajectory run_realization(const RunConfig& cfg, std::size_t index);

struct OracleRow {
  double dt = 0.0;
  double err_noise = 0.0;  // RMS over realizations of ||h_T - q0(x - cB_T)||_2
  double err_det = 0.0;    // ||X_T - exact advection-diffusion solution||_2
};
struct OracleReport {
  std::vector<OracleRow> rows;  // dt descending
  double order_noise = 0.0;
  double order_det = 0.0;
};
/// Constant-sigma transport (u = 0, f = g = nu = eta = 0, sigma = scale * noise.vector)
/// and noise-free transport by oracle.velocity with diffusivity model.eta,
/// over dt, dt/2, ..., dt/2^halvings with one shared finest path per realization.
OracleReport oracle_transport(const RunConfig& cfg);

/// Lockstep Cauchy study over cfg.levels with Brownian seed `seed`.
CauchyReport run_cauchy(const RunConfig& cfg, std::uint64_t seed);

struct AuditRow {
  double t = 0.0;
  double energy = 0.0;
  double tendency_exact = 0.0;      // dE/dt / E
  double tendency_projected = 0.0;  // dE/dt / E
  double cancel1 = 0.0;
  double cancel2 = 0.0;
  double balance = 0.0;             // worst l2_energy_balance over components
};
struct AuditReport {
  std::vector<AuditRow> rows;
  double energy_drift = 0.0;     // |E_last - E_0| / E_0
  double max_tendency = 0.0;     // max |tendency_exact|
  double max_cancel = 0.0;
  double max_balance = 0.0;
};
AuditReport energy_audit(const SweOperator& op, const std::vector<double>& times, const std::vector<State>& states);

}  // namespace lusw
