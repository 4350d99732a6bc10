#pragma once

#include <cstdint>

#include "lusw/spectral.hpp"

namespace lusw {

/// Composite shallow-water state X = (u, h); all three components share one
/// spectral width.
struct State {
  VectorField u;
  SpectralField h;

  State() = default;
  explicit State(int half_width) : u{SpectralField(half_width), SpectralField(half_width)}, h(half_width) {}
  State(VectorField u_, SpectralField h_);

  int half_width() const noexcept { return h.half_width(); }
  std::array<const SpectralField*, 3> components() const noexcept { return {&u.x, &u.y, &h}; }
  std::array<SpectralField*, 3> components() noexcept { return {&u.x, &u.y, &h}; }

  State resized(int half_width) const;
  State& add_scaled(const State& o, double s);
  State& operator+=(const State& o) { return add_scaled(o, 1.0); }
  State& operator-=(const State& o) { return add_scaled(o, -1.0); }
  State& operator*=(double s);
};

State operator-(State a, const State& b);

double inner(const State& a, const State& b);
/// ||X||_2 = (||u||^2 + ||h||^2)^(1/2)
double l2_norm(const State& x);
/// ||X||_{k,2} := ||u||_{k,2} + ||h||_{k,2}
double composite_norm(const State& x, double k);
/// ||u||^2_{k,2} + ||h||^2_{k,2}
double squared_sobolev(const State& x, double k);
double max_abs_diff(const State& a, const State& b);
double hermitian_defect(const State& x);
bool all_finite(const State& x);
State lp_project(const State& x, int level);

/// Random field with deterministic per-wavenumber coefficients: the value at
/// a given (seed, stream, l) does not depend on the requested width, so
/// fields built at different resolutions agree on their common modes.
/// Coefficients have independent Gaussian real/imag parts scaled by
/// (1 + |l|^2)^(-decay/2), restricted to |l_m| <= max_mode, zero mean.
SpectralField random_field(int half_width, std::uint64_t seed, std::uint32_t stream, double decay,
                           int max_mode);

/// Random smooth state: u rescaled to ||u||_2 = 2 pi * velocity_rms, h = mean_depth +
/// fluctuation with ||h - mean||_2 = 2 pi * height_rms. Rescaling factors are
/// computed from the full max_mode spectrum, so they too are width independent.
State random_state(int half_width, std::uint64_t seed, double decay, int max_mode,
                   double velocity_rms, double height_rms, double mean_depth);

}  // namespace lusw
