#include "lusw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "lusw/error.hpp"

namespace lusw {

NoiseBasis::NoiseBasis(std::vector<NoiseMode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw ConfigError("noise basis needs at least one mode", "noise.wavenumbers");
  width_ = modes_.front().phi.x.half_width();
  for (const auto& m : modes_) {
    if (m.phi.x.half_width() != width_ || m.phi.y.half_width() != width_)
      throw ConfigError("noise modes must share one spectral width");
    const double d = l2_norm(div(m.phi));
    if (d > 1e-12 * std::max(1.0, sobolev_norm(m.phi, 1.0)))
      throw ConfigError("noise mode is not divergence free (||div Phi|| = " + std::to_string(d) + ")");
  }
  a_ = covariance_field(*this);
  us_ = ito_stokes_drift(a_);
}

namespace {

SpectralField cos_mode(int width, int l1, int l2, Complex scale) {
  SpectralField f(width);
  f.set_mode(l1, l2, 0.5 * scale);
  return f;
}

SpectralField sin_mode(int width, int l1, int l2, Complex scale) {
  SpectralField f(width);
  f.set_mode(l1, l2, Complex(0.0, -0.5) * scale);
  return f;
}

}  // namespace

NoiseBasis build_basis(const NoiseSpec& spec, const GridSpec& grid) {
  if (!(spec.scale >= 0.0) || !std::isfinite(spec.scale))
    throw ConfigError("noise.scale must be finite and >= 0", "noise.scale");
  std::vector<NoiseMode> modes;

  if (spec.family == NoiseFamily::single_constant_vector) {
    NoiseMode m;
    m.phi = {SpectralField(0), SpectralField(0)};
    m.phi.x.at(0, 0) = spec.scale * spec.vector[0];
    m.phi.y.at(0, 0) = spec.scale * spec.vector[1];
    m.amplitude = spec.scale * std::hypot(spec.vector[0], spec.vector[1]);
    modes.push_back(std::move(m));
    return NoiseBasis(std::move(modes));
  }

  if (!(spec.decay > 1.0))
    throw ConfigError("noise.decay must exceed 1 so that sum Lambda_n is finite", "noise.decay");
  if (spec.wavenumbers.empty())
    throw ConfigError("stream-function noise needs at least one wavenumber", "noise.wavenumbers");

  int width = 0;
  std::set<std::pair<int, int>> seen;
  for (const auto& l : spec.wavenumbers) {
    if (l[0] == 0 && l[1] == 0)
      throw ConfigError("stream-function wavenumbers must be nonzero", "noise.wavenumbers");
    const int m = std::max(std::abs(l[0]), std::abs(l[1]));
    if (m > grid.cutoff())
      throw ConfigError("noise wavenumber (" + std::to_string(l[0]) + "," + std::to_string(l[1]) +
                            ") lies outside B_J of the coarsest grid",
                        "noise.wavenumbers");
    const bool upper = l[0] > 0 || (l[0] == 0 && l[1] > 0);
    const auto key = upper ? std::pair{l[0], l[1]} : std::pair{-l[0], -l[1]};
    if (!seen.insert(key).second)
      throw ConfigError("duplicate noise wavenumber (up to sign)", "noise.wavenumbers");
    width = std::max(width, m);
  }

  int n = 0;
  for (const auto& l : spec.wavenumbers) {
    const double norm = std::hypot(static_cast<double>(l[0]), static_cast<double>(l[1]));
    for (auto part : {NoiseMode::Part::cosine, NoiseMode::Part::sine}) {
      ++n;
      const double amp = spec.scale * std::pow(static_cast<double>(n), -0.5 * spec.decay);
      const SpectralField psi = part == NoiseMode::Part::cosine
                                    ? cos_mode(width, l[0], l[1], amp / norm)
                                    : sin_mode(width, l[0], l[1], amp / norm);
      NoiseMode mode;
      mode.phi = perp_grad(psi);
      mode.amplitude = amp;
      mode.wavenumber = l;
      mode.part = part;
      modes.push_back(std::move(mode));
    }
  }

  NoiseBasis basis(std::move(modes));
  if (spec.require_solenoidal_isd) {
    const double d = l2_norm(div(basis.stokes_drift()));
    const double ref = std::max(1.0, sobolev_norm(basis.covariance().xx, 2.0) +
                                         sobolev_norm(basis.covariance().yy, 2.0));
    if (d > 1e-12 * ref)
      throw ConfigError("noise basis violates div u_s = 0 (require_solenoidal_isd)",
                        "noise.require_solenoidal_isd");
  }
  return basis;
}

MatrixField covariance_field(const NoiseBasis& basis) {
  const int w = 2 * basis.half_width();
  MatrixField a{SpectralField(w), SpectralField(w), SpectralField(w)};
  for (const auto& m : basis.modes()) {
    a.xx += multiply(m.phi.x, m.phi.x, w);
    a.xy += multiply(m.phi.x, m.phi.y, w);
    a.yy += multiply(m.phi.y, m.phi.y, w);
  }
  return a;
}

VectorField ito_stokes_drift(const MatrixField& a) {
  VectorField us{dx(a.xx) + dy(a.xy), dx(a.xy) + dy(a.yy)};
  us.x *= 0.5;
  us.y *= 0.5;
  return us;
}

double min_eigenvalue_on_grid(const MatrixField& a, int points) {
  const FftGrid g(points);
  const auto xx = g.to_physical(a.xx);
  const auto xy = g.to_physical(a.xy);
  const auto yy = g.to_physical(a.yy);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xx.size(); ++i) {
    const double tr = xx[i] + yy[i];
    const double disc = std::hypot(xx[i] - yy[i], 2.0 * xy[i]);
    lo = std::min(lo, 0.5 * (tr - disc));
  }
  return lo;
}

GridGradient grid_gradient(const FftGrid& grid, const SpectralField& q) {
  GridGradient g{std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  grid.to_physical(q, DiffOp::dx, g.x);
  grid.to_physical(q, DiffOp::dy, g.y);
  return g;
}

int required_points(int state_half_width, int noise_half_width) {
  return std::max(3 * state_half_width + 1, 2 * state_half_width + 2 * noise_half_width + 1);
}

// ---------------------------------------------------------------------------

NoiseOperators::NoiseOperators(const NoiseBasis& basis, const FftGrid& grid)
    : basis_(basis), grid_(grid) {
  if (4 * basis_.half_width() > grid_.points())
    throw ConfigError("grid too small to sample the noise covariance");
  const auto& a = basis_.covariance();
  axx_ = grid_.to_physical(a.xx);
  axy_ = grid_.to_physical(a.xy);
  ayy_ = grid_.to_physical(a.yy);
  const auto& us = basis_.stokes_drift();
  has_stokes_ = l2_norm(us) > 0.0;
  if (has_stokes_) us_ = {grid_.to_physical(us.x), grid_.to_physical(us.y)};
  phi_.reserve(basis_.size());
  for (const auto& m : basis_.modes()) phi_.push_back({grid_.to_physical(m.phi.x), grid_.to_physical(m.phi.y)});
}

std::array<std::vector<double>, 2> NoiseOperators::velocity(std::span<const double> dbeta) const {
  std::array<std::vector<double>, 2> v;
  velocity(dbeta, v);
  return v;
}

void NoiseOperators::velocity(std::span<const double> dbeta, std::array<std::vector<double>, 2>& v) const {
  if (dbeta.size() != basis_.size())
    throw ConfigError("Brownian increment count " + std::to_string(dbeta.size()) +
                      " != noise mode count " + std::to_string(basis_.size()));
  for (auto& c : v) c.assign(grid_.size(), 0.0);
  for (std::size_t n = 0; n < phi_.size(); ++n) {
    const double b = dbeta[n];
    if (b == 0.0) continue;
    for (int c = 0; c < 2; ++c) {
      const auto& p = phi_[n][c];
      auto& out = v[c];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += b * p[i];
    }
  }
}

void NoiseOperators::add_advection(const std::array<std::vector<double>, 2>& v, const GridGradient& g,
                                   double coeff, std::span<double> acc) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += coeff * (v[0][i] * g.x[i] + v[1][i] * g.y[i]);
}

void NoiseOperators::add_stokes_advection(const GridGradient& g, double coeff, std::span<double> acc) const {
  if (!has_stokes_) return;
  add_advection(us_, g, coeff, acc);
}

SpectralField NoiseOperators::ito_correction(const GridGradient& g, int out) const {
  thread_local std::vector<double> fx, fy;
  fx.resize(grid_.size());
  fy.resize(grid_.size());
  for (std::size_t i = 0; i < fx.size(); ++i) {
    fx[i] = 0.5 * (axx_[i] * g.x[i] + axy_[i] * g.y[i]);
    fy[i] = 0.5 * (axy_[i] * g.x[i] + ayy_[i] * g.y[i]);
  }
  auto r = grid_.to_spectral(fx, out, DiffOp::dx);
  r += grid_.to_spectral(fy, out, DiffOp::dy);
  return r;
}

double NoiseOperators::gram_form(const GridGradient& g) const {
  std::vector<double> w(grid_.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = g.x[i] * (axx_[i] * g.x[i] + axy_[i] * g.y[i]) + g.y[i] * (axy_[i] * g.x[i] + ayy_[i] * g.y[i]);
  return grid_.integrate(w);
}

double NoiseOperators::mode_energy(const GridGradient& g) const {
  double total = 0.0;
  std::vector<double> w(grid_.size());
  for (const auto& p : phi_) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double t = p[0][i] * g.x[i] + p[1][i] * g.y[i];
      w[i] = t * t;
    }
    total += grid_.integrate(w);
  }
  return total;
}

// ---------------------------------------------------------------------------

State apply_transport_noise(const NoiseBasis& basis, const State& x, std::span<const double> dbeta) {
  const int n = x.half_width();
  const FftGrid grid(fft_good_size(required_points(n, basis.half_width())));
  const NoiseOperators ops(basis, grid);
  const auto v = ops.velocity(dbeta);
  State out(n);
  const auto in = x.components();
  auto dst = out.components();
  std::vector<double> acc(grid.size());
  for (int c = 0; c < 3; ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    NoiseOperators::add_advection(v, grid_gradient(grid, *in[c]), 1.0, acc);
    *dst[c] = grid.to_spectral(acc, n);
  }
  return out;
}

State ito_correction(const NoiseBasis& basis, const State& x) {
  const int n = x.half_width();
  const FftGrid grid(fft_good_size(required_points(n, basis.half_width())));
  const NoiseOperators ops(basis, grid);
  State out(n);
  const auto in = x.components();
  auto dst = out.components();
  for (int c = 0; c < 3; ++c) *dst[c] = ops.ito_correction(grid_gradient(grid, *in[c]), n);
  return out;
}

}  // namespace lusw
