#pragma once

// Drift and transport-noise operators of the stochastic rotating shallow
// water system
//
//   dX + [ f_R(X) (L_u + (1+delta) D_u) X + rotation + gravity - u_s.grad X ] dt
//      + sigma.grad X dB = gamma Delta X dt + 1/2 div(a grad X) dt
//
// with X = (u, h), delta = (alpha, beta), gamma = (nu, eta), all evaluated on
// the Galerkin space B_J and projected back onto it.

#include <span>
#include <string>
#include <string_view>

#include "lusw/noise.hpp"
#include "lusw/state.hpp"

namespace lusw {

enum class Regime { truncated_strong, untruncated_weak };

std::string_view to_string(Regime r) noexcept;
/// "truncated-strong" or "untruncated-weak"; throws ConfigError otherwise.
Regime parse_regime(std::string_view s);

struct ModelParams {
  Regime regime = Regime::truncated_strong;
  double alpha = 0.0;
  double beta = 0.0;
  double nu = 0.0;
  double eta = 0.0;
  double g = 9.81;
  double f = 1e-4;
  double rho = 1.0;
  int k = 1;
  double R = 1e6;

  /// Throws ConfigError naming the offending "model.*" key.
  void validate() const;
};

/// Smooth cutoff: 1 on [0, R], 0 on [R+1, inf), quintic smoothstep between.
struct TruncationFn {
  double R = 1e6;
  double operator()(double r) const noexcept;
};

/// f_R(||u||_{k,2} + ||h||_{k,2}); identically 1 in the untruncated regime.
double truncation_value(const ModelParams& params, const State& x);

/// f z x u = f (-u_2, u_1)
VectorField rotate(const VectorField& u, double f);

/// Model operators for one resolution. Grid samples of the noise basis are
/// built once; every method is const and thread safe.
class SweOperator {
 public:
  /// Validates params and grid. The internal quadrature grid is the larger of
  /// grid.points and the smallest FFT size that keeps the noise terms alias free.
  SweOperator(ModelParams params, NoiseBasis basis, GridSpec grid);

  const ModelParams& params() const noexcept { return params_; }
  const NoiseBasis& basis() const noexcept { return ops_.basis(); }
  const GridSpec& grid() const noexcept { return grid_; }
  const NoiseOperators& noise() const noexcept { return ops_; }
  /// N = 2^J
  int half_width() const noexcept { return grid_.cutoff(); }
  int quadrature_points() const noexcept { return ops_.grid().points(); }
  bool has_noise() const noexcept { return has_noise_; }

  double truncation(const State& x) const { return truncation_value(params_, x); }

  /// Full drift per unit time.
  State drift(const State& x) const;
  /// -J_N sum_n dbeta_n (Phi_n . grad) X
  State diffusion(const State& x, std::span<const double> dbeta) const;
  /// drift * dt + diffusion(dbeta), sharing the gradient evaluations.
  State increment(const State& x, double dt, std::span<const double> dbeta) const;

 private:
  void check_width(const State& x) const;
  State evaluate(const State& x, double dt, std::span<const double> dbeta, bool with_drift) const;

  void add_constant_noise(const State& x, double dt, std::span<const double> dbeta, bool with_drift,
                          State& out) const;

  ModelParams params_;
  GridSpec grid_;
  NoiseOperators ops_;
  bool has_noise_ = false;
  // Width-0 basis: Phi_n and a are constant and the noise terms are Fourier multipliers.
  bool constant_noise_ = false;
  std::vector<std::array<double, 2>> phi0_;
  std::array<double, 3> a0_{};  // axx, axy, ayy
};

/// Convenience wrappers building a one-off SweOperator.
State drift_A(const State& x, const ModelParams& params, const NoiseBasis& basis, const GridSpec& grid);
/// -J sum_n dbeta_n (Phi_n . grad) X at the width of x.
State diffusion_G(const State& x, const NoiseBasis& basis, std::span<const double> dbeta);

}  // namespace lusw
