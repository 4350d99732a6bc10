#include "lusw/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lusw/error.hpp"

namespace lusw {

std::string_view to_string(Regime r) noexcept {
  return r == Regime::truncated_strong ? "truncated-strong" : "untruncated-weak";
}

Regime parse_regime(std::string_view s) {
  if (s == "truncated-strong") return Regime::truncated_strong;
  if (s == "untruncated-weak") return Regime::untruncated_weak;
  throw ConfigError("model.regime must be truncated-strong or untruncated-weak", "model.regime");
}

void ModelParams::validate() const {
  const auto finite = [](double v, const char* key) {
    if (!std::isfinite(v)) throw ConfigError(std::string(key) + " must be finite", key);
  };
  finite(alpha, "model.alpha");
  finite(beta, "model.beta");
  finite(nu, "model.nu");
  finite(eta, "model.eta");
  finite(g, "model.g");
  finite(f, "model.f");
  finite(rho, "model.rho");
  finite(R, "model.R");
  if (nu < 0.0) throw ConfigError("model.nu must be >= 0", "model.nu");
  if (eta < 0.0) throw ConfigError("model.eta must be >= 0", "model.eta");
  if (!(g >= 0.0)) throw ConfigError("model.g must be >= 0", "model.g");
  if (!(rho > 0.0)) throw ConfigError("model.rho must be > 0", "model.rho");
  if (k < 0) throw ConfigError("model.k must be >= 0", "model.k");
  if (!(R > 0.0)) throw ConfigError("model.R must be > 0", "model.R");
  if (regime == Regime::untruncated_weak) {
    if (alpha != -0.5) throw ConfigError("weak regime requires alpha=beta=-0.5", "model.alpha");
    if (beta != -0.5) throw ConfigError("weak regime requires alpha=beta=-0.5", "model.beta");
    if (k != 0) throw ConfigError("weak regime requires k=0", "model.k");
  } else if (k < 1) {
    throw ConfigError("truncated regime requires k>=1", "model.k");
  }
}

double TruncationFn::operator()(double r) const noexcept {
  if (r <= R) return 1.0;
  if (r >= R + 1.0) return 0.0;
  const double t = r - R;
  return 1.0 - t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double truncation_value(const ModelParams& params, const State& x) {
  if (params.regime == Regime::untruncated_weak) return 1.0;
  return TruncationFn{params.R}(composite_norm(x, params.k));
}

VectorField rotate(const VectorField& u, double f) { return {-f * u.y, f * u.x}; }

// ---------------------------------------------------------------------------

namespace {

FftGrid model_grid(const GridSpec& grid, const NoiseBasis& basis) {
  grid.validate();
  const int need = fft_good_size(required_points(grid.cutoff(), basis.half_width()));
  return FftGrid(std::max(grid.points, std::max(need, 4 * basis.half_width())));
}

}  // namespace

SweOperator::SweOperator(ModelParams params, NoiseBasis basis, GridSpec grid)
    : params_(params), grid_(grid), ops_(basis, model_grid(grid, basis)) {
  params_.validate();
  if (basis.half_width() > grid_.cutoff())
    throw ConfigError("noise basis exceeds the retained block B_J", "noise.wavenumbers");
  for (const auto& m : basis.modes())
    if (m.amplitude != 0.0) has_noise_ = true;
  constant_noise_ = basis.half_width() == 0;
  if (constant_noise_) {
    for (const auto& m : basis.modes()) {
      const std::array<double, 2> p{m.phi.x(0, 0).real(), m.phi.y(0, 0).real()};
      phi0_.push_back(p);
      a0_[0] += p[0] * p[0];
      a0_[1] += p[0] * p[1];
      a0_[2] += p[1] * p[1];
    }
  }
}

void SweOperator::check_width(const State& x) const {
  if (x.half_width() != half_width())
    throw ConfigError("state width " + std::to_string(x.half_width()) + " does not match B_J width " +
                      std::to_string(half_width()));
}

State SweOperator::drift(const State& x) const { return evaluate(x, 1.0, {}, true); }

State SweOperator::diffusion(const State& x, std::span<const double> dbeta) const {
  return evaluate(x, 0.0, dbeta, false);
}

State SweOperator::increment(const State& x, double dt, std::span<const double> dbeta) const {
  return evaluate(x, dt, dbeta, true);
}

namespace {
// Grid buffers reused across steps on each thread.
struct StepScratch {
  std::array<GridGradient, 3> grads;
  std::array<std::vector<double>, 3> acc;
  std::array<std::vector<double>, 2> vel, noise;
  std::vector<double> h, divu;

  void resize(std::size_t n) {
    for (auto& g : grads) {
      g.x.resize(n);
      g.y.resize(n);
    }
    for (auto* v : {&acc[0], &acc[1], &acc[2], &vel[0], &vel[1], &noise[0], &noise[1], &h, &divu}) v->resize(n);
  }
};

StepScratch& step_scratch(std::size_t n) {
  thread_local StepScratch s;
  s.resize(n);
  return s;
}
}  // namespace

State SweOperator::evaluate(const State& x, double dt, std::span<const double> dbeta, bool with_drift) const {
  check_width(x);
  const int n = half_width();
  const FftGrid& fg = ops_.grid();
  const std::size_t size = fg.size();
  const bool noisy = has_noise_ && !dbeta.empty();

  const double fr = with_drift ? truncation(x) : 0.0;
  const auto zero = [](const SpectralField& q) {
    return std::all_of(q.coeffs().begin(), q.coeffs().end(), [](Complex c) { return c == Complex{}; });
  };
  // A zero velocity has no self-advection.
  const bool advect = fr != 0.0 && !(zero(x.u.x) && zero(x.u.y));
  const bool grid_noise = has_noise_ && !constant_noise_;

  State out(n);
  auto dst = out.components();
  const auto in = x.components();
  if (advect || grid_noise) {
    auto& sc = step_scratch(size);
    auto& grads = sc.grads;
    for (int c = 0; c < 3; ++c) {
      fg.to_physical(*in[c], DiffOp::dx, grads[c].x);
      fg.to_physical(*in[c], DiffOp::dy, grads[c].y);
    }

    auto& acc = sc.acc;
    if (advect) {
      auto& vel = sc.vel;
      fg.to_physical(x.u.x, vel[0]);
      fg.to_physical(x.u.y, vel[1]);
      fg.to_physical(x.h, sc.h);
      auto& divu = sc.divu;
      for (std::size_t i = 0; i < size; ++i) divu[i] = grads[0].x[i] + grads[1].y[i];
      const std::array<double, 3> comp{1.0 + params_.alpha, 1.0 + params_.alpha, 1.0 + params_.beta};
      for (int c = 0; c < 3; ++c) {
        const auto& q = c < 2 ? vel[c] : sc.h;
        auto& a = acc[c];
        const auto& g = grads[c];
        for (std::size_t i = 0; i < size; ++i)
          a[i] = -dt * fr * (vel[0][i] * g.x[i] + vel[1][i] * g.y[i] + comp[c] * q[i] * divu[i]);
      }
    } else {
      for (auto& a : acc) std::fill(a.begin(), a.end(), 0.0);
    }
    if (with_drift && grid_noise)
      for (int c = 0; c < 3; ++c) ops_.add_stokes_advection(grads[c], dt, acc[c]);
    if (noisy && grid_noise) {
      ops_.velocity(dbeta, sc.noise);
      for (int c = 0; c < 3; ++c) NoiseOperators::add_advection(sc.noise, grads[c], -1.0, acc[c]);
    }
    for (int c = 0; c < 3; ++c) *dst[c] = fg.to_spectral(acc[c], n);
    if (with_drift && grid_noise)
      for (int c = 0; c < 3; ++c) dst[c]->add_scaled(ops_.ito_correction(grads[c], n), dt);
  }
  if (has_noise_ && constant_noise_) add_constant_noise(x, dt, dbeta, with_drift, out);
  if (!with_drift) return out;

  const double f = params_.f;
  const double g = params_.g;
  out.u.x.add_scaled(x.u.y, dt * f);
  out.u.y.add_scaled(x.u.x, -dt * f);
  out.u.x.add_scaled(dx(x.h), -dt * g);
  out.u.y.add_scaled(dy(x.h), -dt * g);
  if (params_.nu != 0.0) {
    out.u.x.add_scaled(laplacian(x.u.x), dt * params_.nu);
    out.u.y.add_scaled(laplacian(x.u.y), dt * params_.nu);
  }
  if (params_.eta != 0.0) out.h.add_scaled(laplacian(x.h), dt * params_.eta);
  return out;
}

void SweOperator::add_constant_noise(const State& x, double dt, std::span<const double> dbeta, bool with_drift,
                                     State& out) const {
  // -(v . grad) q dB and 1/2 a : grad grad q dt as multipliers on qhat(l).
  std::array<double, 2> v{0.0, 0.0};
  if (!dbeta.empty()) {
    if (dbeta.size() != phi0_.size()) throw ConfigError("Brownian increment count " + std::to_string(dbeta.size()) +
                        " != noise mode count " + std::to_string(phi0_.size()));
    for (std::size_t m = 0; m < phi0_.size(); ++m) {
      v[0] += dbeta[m] * phi0_[m][0];
      v[1] += dbeta[m] * phi0_[m][1];
    }
  }
  const double s = with_drift ? 0.5 * dt : 0.0;
  const int n = half_width();
  const auto in = x.components();
  auto dst = out.components();
  for (int l1 = -n; l1 <= n; ++l1)
    for (int l2 = -n; l2 <= n; ++l2) {
      const Complex mult(-s * (a0_[0] * l1 * l1 + 2.0 * a0_[1] * l1 * l2 + a0_[2] * l2 * l2),
                         -(v[0] * l1 + v[1] * l2));
      const std::size_t i = out.h.index(l1, l2);
      for (int c = 0; c < 3; ++c) dst[c]->coeffs()[i] += mult * in[c]->coeffs()[i];
    }
}

State drift_A(const State& x, const ModelParams& params, const NoiseBasis& basis, const GridSpec& grid) {
  return SweOperator(params, basis, grid).drift(x);
}

State diffusion_G(const State& x, const NoiseBasis& basis, std::span<const double> dbeta) {
  State out = apply_transport_noise(basis, x, dbeta);
  out *= -1.0;
  return out;
}

}  // namespace lusw
