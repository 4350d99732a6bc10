#include "lusw/state.hpp"

#include <algorithm>
#include <cmath>

#include "lusw/error.hpp"
#include "lusw/random.hpp"

namespace lusw {

State::State(VectorField u_, SpectralField h_) : u(std::move(u_)), h(std::move(h_)) {
  if (u.x.half_width() != h.half_width() || u.y.half_width() != h.half_width())
    throw ConfigError("state components must share one spectral width");
}

State State::resized(int half_width) const {
  return State({u.x.resized(half_width), u.y.resized(half_width)}, h.resized(half_width));
}

State& State::add_scaled(const State& o, double s) {
  u.x.add_scaled(o.u.x, s);
  u.y.add_scaled(o.u.y, s);
  h.add_scaled(o.h, s);
  return *this;
}

State& State::operator*=(double s) {
  u.x *= s;
  u.y *= s;
  h *= s;
  return *this;
}

State operator-(State a, const State& b) { return a -= b; }

double inner(const State& a, const State& b) { return inner(a.u, b.u) + inner(a.h, b.h); }

double l2_norm(const State& x) { return std::sqrt(std::max(0.0, inner(x, x))); }

double composite_norm(const State& x, double k) { return sobolev_norm(x.u, k) + sobolev_norm(x.h, k); }

double squared_sobolev(const State& x, double k) {
  const double a = sobolev_norm(x.u, k);
  const double b = sobolev_norm(x.h, k);
  return a * a + b * b;
}

double max_abs_diff(const State& a, const State& b) {
  return std::max({max_abs_diff(a.u.x, b.u.x), max_abs_diff(a.u.y, b.u.y), max_abs_diff(a.h, b.h)});
}

double hermitian_defect(const State& x) {
  return std::max({hermitian_defect(x.u.x), hermitian_defect(x.u.y), hermitian_defect(x.h)});
}

bool all_finite(const State& x) {
  for (const SpectralField* f : x.components())
    for (const Complex& c : f->coeffs())
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

State lp_project(const State& x, int level) {
  return State({lp_project(x.u.x, level), lp_project(x.u.y, level)}, lp_project(x.h, level));
}

SpectralField random_field(int half_width, std::uint64_t seed, std::uint32_t stream, double decay,
                           int max_mode) {
  SpectralField f(half_width);
  const int n = std::min(half_width, max_mode);
  for (int a = 0; a <= n; ++a) {
    for (int b = -n; b <= n; ++b) {
      if (a == 0 && b <= 0) continue;  // half plane; (0,0) is the mean
      const auto z = normal_pair(seed, stream, static_cast<std::uint32_t>(a),
                                 static_cast<std::uint32_t>(b + (1 << 20)));
      const double env = std::pow(1.0 + a * a + b * b, -0.5 * decay);
      f.set_mode(a, b, env * Complex(z[0], z[1]));
    }
  }
  return f;
}

State random_state(int half_width, std::uint64_t seed, double decay, int max_mode,
                   double velocity_rms, double height_rms, double mean_depth) {
  // Normalisation uses the max_mode field so that every resolution shares the
  // same scale factor.
  const int wide = std::max(max_mode, 0);
  const auto raw_norm = [&](std::uint32_t stream) {
    return l2_norm(random_field(wide, seed, stream, decay, max_mode));
  };
  State x(half_width);
  x.u.x = random_field(half_width, seed, 0, decay, max_mode);
  x.u.y = random_field(half_width, seed, 1, decay, max_mode);
  x.h = random_field(half_width, seed, 2, decay, max_mode);
  const double un = std::hypot(raw_norm(0), raw_norm(1));
  const double hn = raw_norm(2);
  const double uf = un > 0.0 ? kTwoPi * velocity_rms / un : 0.0;
  const double hf = hn > 0.0 ? kTwoPi * height_rms / hn : 0.0;
  x.u.x *= uf;
  x.u.y *= uf;
  x.h *= hf;
  x.h.at(0, 0) = mean_depth;
  return x;
}

}  // namespace lusw
