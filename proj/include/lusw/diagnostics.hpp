#pragma once

#include <span>
#include <vector>

#include "lusw/model.hpp"
#include "lusw/noise.hpp"
#include "lusw/state.hpp"

namespace lusw {

/// (rho/2) \int (h |u|^2 + g h^2) dx, exact quadrature.
double swe_energy(const State& x, const ModelParams& params);

struct CancellationResiduals {
  double r1 = 0.0;  // <X, u.grad X> + 1/2 <X, (div u) X>
  double r2 = 0.0;  // <X, u_s.grad X> + <X, div(a grad X)> + sum_n ||Phi_n.grad X||^2
};

/// Both sums, each divided by ||X||_2^2 (||u||_{1,2} + 1). `ops` must be
/// alias free for the width of x.
CancellationResiduals cancellation_residuals(const State& x, const NoiseOperators& ops);
CancellationResiduals cancellation_residuals(const State& x, const NoiseBasis& basis);

/// 1/2 <q, div(a grad q)> + 1/2 <grad q, a grad q>, the first term evaluated
/// spectrally and the second by grid quadrature, divided by the larger of
/// the two magnitudes (0 when both vanish).
double l2_energy_balance(const SpectralField& q, const NoiseBasis& basis);

/// Ito drift of E along the model, dE = E'[F] dt + 1/2 sum_n E''[G_n, G_n] dt.
struct EnergyTendency {
  double energy = 0.0;
  /// Continuous operators evaluated at the discrete state.
  double exact = 0.0;
  /// Galerkin operators F = J_N drift, G_n = -J_N(Phi_n . grad X).
  double projected = 0.0;
};
EnergyTendency energy_tendency(const State& x, const SweOperator& op);

/// Gamma_N = \int J_N(u (x) u) : grad J_N u dx with N = 2^level.
double energy_flux(const VectorField& u, int level);

struct FluxBound {
  double flux = 0.0;   // |Gamma_N|
  double bound = 0.0;  // sum_i 2^(-2|level-i|/3) 2^i ||Jt_i u||_3^3, i >= -1
  /// flux / bound, 0 when the bound vanishes.
  double ratio() const noexcept { return bound > 0.0 ? flux / bound : 0.0; }
};
/// Jt_i = J_{2^(i+1)} - J_{2^i} is the dyadic block i+1; i = -1 is block 0.
FluxBound flux_locality_bound(const VectorField& u, int level);

/// ||q||_4^2 / (||q||_2 ||grad q||_2), 0 for q = 0.
double ladyzhenskaya_ratio(const SpectralField& q);
/// ||(L_u + (1+delta) D_u) X||_{-1,2} / (||X||_2 ||X||_{1,2}), 0 for X = 0.
double negative_norm_ratio(const State& x, const ModelParams& params);

/// Running sup_s [ ||X_s||^2 + 2 \int_0^s (nu |u|_{1}^2 + eta |h|_{1}^2) ],
/// with |.|_1 the H^1 seminorm and a left-point rule in time.
class WeakBoundAccumulator {
 public:
  explicit WeakBoundAccumulator(const ModelParams& params) : nu_(params.nu), eta_(params.eta) {}
  /// Records X at the current time and returns the running value.
  double observe(const State& x);
  /// Advances the dissipation integral over [t, t + dt] using the last observed state.
  void advance(double dt) noexcept { integral_ += dt * rate_; }
  double value() const noexcept { return sup_; }

 private:
  double nu_, eta_;
  double integral_ = 0.0;
  double rate_ = 0.0;
  double sup_ = 0.0;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double E_swe = 0.0;
  double l2 = 0.0;
  double u_k2 = 0.0;
  double h_k2 = 0.0;
  double cancel1 = 0.0;
  double cancel2 = 0.0;
  double weak_lhs = 0.0;
  std::vector<double> gamma_flux;  // Gamma_{2^j}, j = 0..J
};

struct RecordOptions {
  bool identities = true;
  bool flux = false;
};

DiagnosticsRecord make_record(double t, const State& x, const SweOperator& op, double weak_lhs,
                              const RecordOptions& opts = {});
bool all_finite(const DiagnosticsRecord& r);

struct WeakBoundReport {
  double max_ratio = 0.0;    // max_t lhs / ||X_0||^2
  double log_c_bound = 0.0;  // log 2 + g^2 T / eta
  bool within_bound = false;
};
/// Throws ConfigError in the truncated regime.
WeakBoundReport weak_bound_monitor(std::span<const DiagnosticsRecord> records, const ModelParams& params,
                                   double horizon);

}  // namespace lusw
