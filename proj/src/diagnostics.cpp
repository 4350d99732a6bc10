#include "lusw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lusw/error.hpp"

namespace lusw {

namespace {

double sq(double v) { return v * v; }

// H^1 seminorm squared, exact.
double grad_energy(const SpectralField& f) { return std::max(0.0, sq(sobolev_norm(f, 1.0)) - sq(l2_norm(f))); }

FftGrid grid_for(int state_width, int noise_width) {
  return FftGrid(fft_good_size(std::max(required_points(state_width, noise_width), 4 * noise_width)));
}

}  // namespace

double swe_energy(const State& x, const ModelParams& params) {
  const FftGrid g(fft_good_size(3 * x.half_width() + 1));
  const auto u1 = g.to_physical(x.u.x);
  const auto u2 = g.to_physical(x.u.y);
  const auto h = g.to_physical(x.h);
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = h[i] * (u1[i] * u1[i] + u2[i] * u2[i]) + params.g * h[i] * h[i];
  return 0.5 * params.rho * g.integrate(w);
}

CancellationResiduals cancellation_residuals(const State& x, const NoiseOperators& ops) {
  const int n = x.half_width();
  const FftGrid& fg = ops.grid();
  if (fg.points() < required_points(n, ops.basis().half_width()))
    throw ConfigError("cancellation_residuals: grid too small for this state width");
  const std::size_t size = fg.size();
  const std::array<std::vector<double>, 2> vel{fg.to_physical(x.u.x), fg.to_physical(x.u.y)};
  const auto in = x.components();
  std::array<GridGradient, 3> grads;
  for (int c = 0; c < 3; ++c) grads[c] = grid_gradient(fg, *in[c]);
  std::vector<double> divu(size);
  for (std::size_t i = 0; i < size; ++i) divu[i] = grads[0].x[i] + grads[1].y[i];

  double r1 = 0.0, r2 = 0.0;
  std::vector<double> w(size), s(size);
  for (int c = 0; c < 3; ++c) {
    const auto q = fg.to_physical(*in[c]);
    const auto& g = grads[c];
    for (std::size_t i = 0; i < size; ++i)
      w[i] = vel[0][i] * g.x[i] + vel[1][i] * g.y[i] + 0.5 * divu[i] * q[i];
    r1 += inner(*in[c], fg.to_spectral(w, n));

    std::fill(s.begin(), s.end(), 0.0);
    ops.add_stokes_advection(g, 1.0, s);
    r2 += inner(*in[c], fg.to_spectral(s, n));
    r2 += 2.0 * inner(*in[c], ops.ito_correction(g, n));
    r2 += ops.mode_energy(g);
  }
  const double scale = l2_norm(x);
  const double denom = scale * scale * (sobolev_norm(x.u, 1.0) + 1.0);
  if (denom == 0.0) return {};
  return {r1 / denom, r2 / denom};
}

CancellationResiduals cancellation_residuals(const State& x, const NoiseBasis& basis) {
  const NoiseOperators ops(basis, grid_for(x.half_width(), basis.half_width()));
  return cancellation_residuals(x, ops);
}

double l2_energy_balance(const SpectralField& q, const NoiseBasis& basis) {
  const int n = q.half_width();
  const int w = n + 2 * basis.half_width();
  const auto& a = basis.covariance();
  const auto qx = dx(q);
  const auto qy = dy(q);
  const SpectralField flux_x = multiply(a.xx, qx, w) + multiply(a.xy, qy, w);
  const SpectralField flux_y = multiply(a.xy, qx, w) + multiply(a.yy, qy, w);
  const double t1 = 0.5 * inner(q, dx(flux_x) + dy(flux_y));

  const NoiseOperators ops(basis, grid_for(n, basis.half_width()));
  const double t2 = 0.5 * ops.gram_form(grid_gradient(ops.grid(), q));
  const double denom = std::max(std::abs(t1), std::abs(t2));
  return denom > 0.0 ? (t1 + t2) / denom : 0.0;
}

// ---------------------------------------------------------------------------

namespace {

// Pointwise E'[d] and E''[d, d] integrands.
struct EnergyForms {
  const std::vector<double>& u1;
  const std::vector<double>& u2;
  const std::vector<double>& h;
  double g;

  double first(std::size_t i, double d1, double d2, double dh) const {
    return 0.5 * dh * (u1[i] * u1[i] + u2[i] * u2[i]) + h[i] * (u1[i] * d1 + u2[i] * d2) + g * h[i] * dh;
  }
  double second(std::size_t i, double d1, double d2, double dh) const {
    return h[i] * (d1 * d1 + d2 * d2) + 2.0 * dh * (u1[i] * d1 + u2[i] * d2) + g * dh * dh;
  }
};

}  // namespace

EnergyTendency energy_tendency(const State& x, const SweOperator& op) {
  const ModelParams& p = op.params();
  const NoiseBasis& basis = op.basis();
  const int n = x.half_width();
  const int k = basis.half_width();
  const FftGrid fg(fft_good_size(std::max({4 * n, 3 * n + 2 * k, 4 * k}) + 1));
  const NoiseOperators ops(basis, fg);
  const std::size_t size = fg.size();

  const auto in = x.components();
  std::array<std::vector<double>, 3> q, qx, qy, qxx, qxy, qyy;
  for (int c = 0; c < 3; ++c) {
    q[c] = fg.to_physical(*in[c]);
    const auto fx = dx(*in[c]);
    const auto fy = dy(*in[c]);
    qx[c] = fg.to_physical(fx);
    qy[c] = fg.to_physical(fy);
    qxx[c] = fg.to_physical(dx(fx));
    qxy[c] = fg.to_physical(dy(fx));
    qyy[c] = fg.to_physical(dy(fy));
  }
  const auto& a = basis.covariance();
  const auto axx = fg.to_physical(a.xx);
  const auto axy = fg.to_physical(a.xy);
  const auto ayy = fg.to_physical(a.yy);
  const auto usx = fg.to_physical(basis.stokes_drift().x);
  const auto usy = fg.to_physical(basis.stokes_drift().y);

  const EnergyForms forms{q[0], q[1], q[2], p.g};
  const double fr = op.truncation(x);
  const std::array<double, 3> comp{1.0 + p.alpha, 1.0 + p.alpha, 1.0 + p.beta};
  const std::array<double, 3> diff{p.nu, p.nu, p.eta};

  EnergyTendency out;
  out.energy = swe_energy(x, p);

  // Continuous drift at every grid point.
  std::vector<double> wexact(size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    const double divu = qx[0][i] + qy[1][i];
    std::array<double, 3> F{};
    for (int c = 0; c < 3; ++c) {
      const double adv = q[0][i] * qx[c][i] + q[1][i] * qy[c][i] + comp[c] * q[c][i] * divu;
      const double us = usx[i] * qx[c][i] + usy[i] * qy[c][i];
      const double hess = axx[i] * qxx[c][i] + 2.0 * axy[i] * qxy[c][i] + ayy[i] * qyy[c][i];
      F[c] = -fr * adv + 2.0 * us + 0.5 * hess + diff[c] * (qxx[c][i] + qyy[c][i]);
    }
    F[0] += p.f * q[1][i] - p.g * qx[2][i];
    F[1] += -p.f * q[0][i] - p.g * qy[2][i];
    wexact[i] = forms.first(i, F[0], F[1], F[2]);
  }

  // Galerkin drift.
  const State drift = op.drift(x);
  const auto d = drift.components();
  std::array<std::vector<double>, 3> fd;
  for (int c = 0; c < 3; ++c) fd[c] = fg.to_physical(*d[c]);
  std::vector<double> wproj(size);
  for (std::size_t i = 0; i < size; ++i) wproj[i] = forms.first(i, fd[0][i], fd[1][i], fd[2][i]);

  // Noise quadratic variation, mode by mode.
  if (op.has_noise()) {
    std::array<std::vector<double>, 3> gm, gp;
    for (std::size_t m = 0; m < basis.size(); ++m) {
      const auto& phi = ops.mode_samples(m);
      for (int c = 0; c < 3; ++c) {
        gm[c].resize(size);
        for (std::size_t i = 0; i < size; ++i) gm[c][i] = -(phi[0][i] * qx[c][i] + phi[1][i] * qy[c][i]);
        gp[c] = fg.to_physical(fg.to_spectral(gm[c], n));
      }
      for (std::size_t i = 0; i < size; ++i) {
        wexact[i] += 0.5 * forms.second(i, gm[0][i], gm[1][i], gm[2][i]);
        wproj[i] += 0.5 * forms.second(i, gp[0][i], gp[1][i], gp[2][i]);
      }
    }
  }
  out.exact = p.rho * fg.integrate(wexact);
  out.projected = p.rho * fg.integrate(wproj);
  return out;
}

// ---------------------------------------------------------------------------

double energy_flux(const VectorField& u, int level) {
  const VectorField un{lp_project(u.x, level), lp_project(u.y, level)};
  const int w = un.x.half_width();
  const std::array<const SpectralField*, 2> full{&u.x, &u.y};
  const std::array<const SpectralField*, 2> proj{&un.x, &un.y};
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    const std::array<SpectralField, 2> grad_i{dx(*proj[i]), dy(*proj[i])};
    for (int j = 0; j < 2; ++j) total += inner(multiply(*full[i], *full[j], w), grad_i[j]);
  }
  return total;
}

FluxBound flux_locality_bound(const VectorField& u, int level) {
  FluxBound out;
  out.flux = std::abs(energy_flux(u, level));
  const int top = std::max(u.x.max_block(), u.y.max_block());
  const int width = std::max(u.x.half_width(), u.y.half_width());
  const FftGrid fg(fft_good_size(std::max(8, 4 * width + 1)));
  for (int b = 0; b <= top; ++b) {
    const int i = b - 1;
    const auto bx = fg.to_physical(lp_block(u.x, b));
    const auto by = fg.to_physical(lp_block(u.y, b));
    std::vector<double> w(fg.size());
    for (std::size_t p = 0; p < w.size(); ++p) w[p] = std::pow(std::hypot(bx[p], by[p]), 3.0);
    const double l3 = fg.integrate(w);
    if (l3 == 0.0) continue;
    out.bound += std::pow(2.0, -2.0 * std::abs(level - i) / 3.0) * std::pow(2.0, i) * l3;
  }
  return out;
}

double ladyzhenskaya_ratio(const SpectralField& q) {
  const double l2 = l2_norm(q);
  const double gr = std::sqrt(grad_energy(q));
  if (l2 == 0.0 || gr == 0.0) return 0.0;
  const FftGrid fg(fft_good_size(4 * q.half_width() + 1));
  const auto v = fg.to_physical(q);
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = sq(sq(v[i]));
  return std::sqrt(fg.integrate(w)) / (l2 * gr);
}

double negative_norm_ratio(const State& x, const ModelParams& params) {
  const int n = x.half_width();
  const double denom = l2_norm(x) * std::sqrt(squared_sobolev(x, 1.0));
  if (denom == 0.0) return 0.0;
  const int w = 2 * n;
  const SpectralField divu = div(x.u);
  const auto in = x.components();
  const std::array<double, 3> comp{1.0 + params.alpha, 1.0 + params.alpha, 1.0 + params.beta};
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const SpectralField t = multiply(x.u.x, dx(*in[c]), w) + multiply(x.u.y, dy(*in[c]), w) +
                            comp[c] * multiply(*in[c], divu, w);
    total += sq(sobolev_norm(t, -1.0));
  }
  return std::sqrt(total) / denom;
}

// ---------------------------------------------------------------------------

double WeakBoundAccumulator::observe(const State& x) {
  const double l2 = l2_norm(x);
  rate_ = 2.0 * (nu_ * (grad_energy(x.u.x) + grad_energy(x.u.y)) + eta_ * grad_energy(x.h));
  sup_ = std::max(sup_, l2 * l2 + integral_);
  return sup_;
}

DiagnosticsRecord make_record(double t, const State& x, const SweOperator& op, double weak_lhs,
                              const RecordOptions& opts) {
  DiagnosticsRecord r;
  const int k = op.params().k;
  r.t = t;
  r.E_swe = swe_energy(x, op.params());
  r.l2 = l2_norm(x);
  r.u_k2 = sobolev_norm(x.u, k);
  r.h_k2 = sobolev_norm(x.h, k);
  if (opts.identities) {
    const auto c = cancellation_residuals(x, op.noise());
    r.cancel1 = c.r1;
    r.cancel2 = c.r2;
  }
  r.weak_lhs = weak_lhs;
  if (opts.flux)
    for (int j = 0; j <= op.grid().level; ++j) r.gamma_flux.push_back(energy_flux(x.u, j));
  return r;
}

bool all_finite(const DiagnosticsRecord& r) {
  for (double v : {r.t, r.E_swe, r.l2, r.u_k2, r.h_k2, r.cancel1, r.cancel2, r.weak_lhs})
    if (!std::isfinite(v)) return false;
  return std::all_of(r.gamma_flux.begin(), r.gamma_flux.end(), [](double v) { return std::isfinite(v); });
}

WeakBoundReport weak_bound_monitor(std::span<const DiagnosticsRecord> records, const ModelParams& params,
                                   double horizon) {
  if (params.regime != Regime::untruncated_weak)
    throw ConfigError("weak_bound_monitor applies to the untruncated-weak regime only", "model.regime");
  WeakBoundReport rep;
  rep.log_c_bound = params.eta > 0.0 ? std::log(2.0) + params.g * params.g * horizon / params.eta
                                     : std::numeric_limits<double>::infinity();
  if (records.empty()) return rep;
  const double x0 = records.front().l2 * records.front().l2;
  for (const auto& r : records) rep.max_ratio = std::max(rep.max_ratio, x0 > 0.0 ? r.weak_lhs / x0 : 0.0);
  rep.within_bound = std::isfinite(rep.max_ratio) &&
                     (rep.max_ratio <= 0.0 || std::log(rep.max_ratio) <= rep.log_c_bound + 1e-2);
  return rep;
}

}  // namespace lusw
