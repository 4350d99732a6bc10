#include "lusw/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "lusw/error.hpp"

namespace lusw {

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(int half_width) : n_(half_width) {
  if (half_width < 0) throw ConfigError("negative spectral half width");
  c_.assign(static_cast<std::size_t>(extent()) * extent(), Complex{});
}

SpectralField SpectralField::at_level(int level) {
  if (level < 0 || level > 20) throw ConfigError("dyadic level out of range");
  return SpectralField(1 << level);
}

int SpectralField::max_block() const noexcept {
  int j = 0;
  while ((1 << j) < n_) ++j;
  return j;
}

Complex& SpectralField::at(int l1, int l2) {
  if (!contains(l1, l2)) throw std::out_of_range("wavenumber outside spectral box");
  return c_[index(l1, l2)];
}

void SpectralField::set_mode(int l1, int l2, Complex c) {
  if (l1 == 0 && l2 == 0) c = Complex(c.real(), 0.0);
  at(l1, l2) = c;
  at(-l1, -l2) = std::conj(c);
}

SpectralField SpectralField::resized(int half_width) const {
  SpectralField out(half_width);
  const int m = std::min(n_, half_width);
  for (int a = -m; a <= m; ++a)
    for (int b = -m; b <= m; ++b) out.c_[out.index(a, b)] = c_[index(a, b)];
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (o.n_ != n_) throw ConfigError("spectral width mismatch in +=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (o.n_ != n_) throw ConfigError("spectral width mismatch in -=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : c_) c *= s;
  return *this;
}

SpectralField& SpectralField::add_scaled(const SpectralField& o, double s) {
  if (o.n_ == n_) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * o.c_[i];
    return *this;
  }
  if (o.n_ > n_) throw ConfigError("add_scaled: operand wider than target");
  for (int a = -o.n_; a <= o.n_; ++a)
    for (int b = -o.n_; b <= o.n_; ++b) c_[index(a, b)] += s * o.c_[o.index(a, b)];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double hermitian_defect(const SpectralField& f) {
  double worst = 0.0;
  const int n = f.half_width();
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b) worst = std::max(worst, std::abs(f(a, b) - std::conj(f(-a, -b))));
  return worst;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  const int n = std::max(a.half_width(), b.half_width());
  double worst = 0.0;
  for (int l1 = -n; l1 <= n; ++l1)
    for (int l2 = -n; l2 <= n; ++l2) worst = std::max(worst, std::abs(a(l1, l2) - b(l1, l2)));
  return worst;
}

GridSpec GridSpec::for_level(int level) {
  if (level < 0 || level > 12) throw ConfigError("grid level out of range", "grid.J");
  return GridSpec{level, 1 << (level + 2)};
}

void GridSpec::validate() const {
  if (level < 0 || level > 12) throw ConfigError("grid level J must lie in [0, 12]", "grid.J");
  if (points < 3 * cutoff() + 1)
    throw ConfigError("grid.M must satisfy M >= 3*2^J + 1 for alias-free products (J=" +
                          std::to_string(level) + ", M=" + std::to_string(points) + ")",
                      "grid.M");
}

// ---------------------------------------------------------------------------
// FFT plans

namespace detail {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Row passes over all m rows plus column passes restricted to the leading
// retained columns k2 < ncol, planned on demand.
struct FftPlans {
  int m;
  fftw_plan rows_forward;   // r2c along y, every row
  fftw_plan rows_backward;  // c2r along y, every row

  explicit FftPlans(int points) : m(points) {
    double* r = fftw_alloc_real(real_size());
    fftw_complex* c = fftw_alloc_complex(complex_size());
    const int hc = m / 2 + 1;
    rows_forward = fftw_plan_many_dft_r2c(1, &m, m, r, nullptr, 1, m, c, nullptr, 1, hc, FFTW_ESTIMATE);
    rows_backward = fftw_plan_many_dft_c2r(1, &m, m, c, nullptr, 1, hc, r, nullptr, 1, m, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
    if (!rows_forward || !rows_backward) throw ConfigError("FFTW planning failed for M=" + std::to_string(m));
  }
  ~FftPlans() {
    fftw_destroy_plan(rows_forward);
    fftw_destroy_plan(rows_backward);
    for (auto& [n, p] : columns) {
      fftw_destroy_plan(p[0]);
      fftw_destroy_plan(p[1]);
    }
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  std::size_t real_size() const { return static_cast<std::size_t>(m) * m; }
  std::size_t complex_size() const { return static_cast<std::size_t>(m) * (m / 2 + 1); }

  /// In-place complex transform along x of columns 0..ncol-1; sign -1 forward, +1 backward.
  fftw_plan column_plan(int ncol, int sign) const {
    std::lock_guard lock(planner_mutex());
    auto it = columns.find(ncol);
    if (it == columns.end()) {
      fftw_complex* c = fftw_alloc_complex(complex_size());
      const int hc = m / 2 + 1;
      std::array<fftw_plan, 2> p{
          fftw_plan_many_dft(1, &m, ncol, c, nullptr, hc, 1, c, nullptr, hc, 1, FFTW_FORWARD, FFTW_ESTIMATE),
          fftw_plan_many_dft(1, &m, ncol, c, nullptr, hc, 1, c, nullptr, hc, 1, FFTW_BACKWARD, FFTW_ESTIMATE)};
      fftw_free(c);
      if (!p[0] || !p[1]) throw ConfigError("FFTW planning failed for M=" + std::to_string(m));
      it = columns.emplace(ncol, p).first;
    }
    return it->second[sign < 0 ? 0 : 1];
  }

 private:
  mutable std::map<int, std::array<fftw_plan, 2>> columns;
};

namespace {

std::shared_ptr<const FftPlans> plans_for(int points) {
  static std::map<int, std::shared_ptr<const FftPlans>> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<const FftPlans>(points);
  cache.emplace(points, p);
  return p;
}

// Per-thread SIMD-aligned scratch arrays, one pair per grid size.
struct Workspace {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  Workspace(std::size_t nr, std::size_t nc) : real(fftw_alloc_real(nr)), cplx(fftw_alloc_complex(nc)) {}
  ~Workspace() {
    fftw_free(real);
    fftw_free(cplx);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
};

Workspace& workspace(const FftPlans& p) {
  thread_local std::map<int, std::unique_ptr<Workspace>> spaces;
  auto& w = spaces[p.m];
  if (!w) w = std::make_unique<Workspace>(p.real_size(), p.complex_size());
  return *w;
}

}  // namespace
}  // namespace detail

int fft_good_size(int n) {
  for (int m = std::max(n, 2);; ++m) {
    if (m % 2) continue;
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

FftGrid::FftGrid(int points) : m_(points) {
  if (points < 2) throw ConfigError("FFT grid size must be >= 2", "grid.M");
  plans_ = detail::plans_for(points);
}

namespace {
inline int wrap(int k, int m) {
  k %= m;
  return k < 0 ? k + m : k;
}

// Multiplier symbols applied while scattering or gathering coefficients.
struct Identity {
  Complex operator()(int, int, Complex c) const noexcept { return c; }
};
struct Derivative {
  DiffOp op;
  Complex operator()(int a, int b, Complex c) const noexcept {
    switch (op) {
      case DiffOp::dx: return {-a * c.imag(), a * c.real()};
      case DiffOp::dy: return {-b * c.imag(), b * c.real()};
      case DiffOp::laplacian: return -static_cast<double>(a * a + b * b) * c;
    }
    return c;
  }
};

double weight_power(double w, double k) {
  if (k == std::trunc(k) && std::abs(k) <= 16) {
    double r = 1.0;
    for (int i = 0; i < static_cast<int>(std::abs(k)); ++i) r *= w;
    return k < 0 ? 1.0 / r : r;
  }
  return std::pow(w, k);
}

template <class Sym>
void scatter_inverse(const detail::FftPlans& plans, int m, const SpectralField& f, std::span<double> out,
                     Sym sym) {
  const int n = f.half_width();
  if (2 * n > m) throw ConfigError("field half width exceeds grid Nyquist limit");
  if (out.size() != static_cast<std::size_t>(m) * m) throw ConfigError("physical buffer size mismatch");
  const int hc = m / 2 + 1;
  auto& ws = detail::workspace(plans);
  auto* buf = reinterpret_cast<Complex*>(ws.cplx);
  std::fill(buf, buf + plans.complex_size(), Complex{});
  const Complex* src = f.coeffs().data();
  const int e = f.extent();
  for (int l1 = -n; l1 <= n; ++l1) {
    Complex* row = buf + static_cast<std::size_t>(wrap(l1, m)) * hc;
    const Complex* s = src + static_cast<std::size_t>(l1 + n) * e + n;
    for (int l2 = 0; l2 <= n; ++l2) row[l2] += sym(l1, l2, s[l2]);
    if (2 * n == m) row[n] += sym(l1, -n, s[-n]);
  }
  fftw_execute_dft(plans.column_plan(std::min(n, m / 2) + 1, +1), ws.cplx, ws.cplx);
  fftw_execute_dft_c2r(plans.rows_backward, ws.cplx, ws.real);
  std::copy(ws.real, ws.real + out.size(), out.begin());
}

template <class Sym>
SpectralField gather_forward(const detail::FftPlans& plans, int m, std::span<const double> values,
                             int half_width, Sym sym) {
  if (values.size() != static_cast<std::size_t>(m) * m)
    throw ConfigError("grid sample count " + std::to_string(values.size()) + " != M*M = " +
                      std::to_string(static_cast<std::size_t>(m) * m));
  if (2 * half_width > m) throw ConfigError("requested half width exceeds grid Nyquist limit");
  const int hc = m / 2 + 1;
  auto& ws = detail::workspace(plans);
  std::copy(values.begin(), values.end(), ws.real);
  fftw_execute_dft_r2c(plans.rows_forward, ws.real, ws.cplx);
  fftw_execute_dft(plans.column_plan(half_width + 1, -1), ws.cplx, ws.cplx);
  const auto* buf = reinterpret_cast<const Complex*>(ws.cplx);

  const double norm = 1.0 / (static_cast<double>(m) * m);
  const int nyq = m % 2 == 0 ? m / 2 : -1;
  SpectralField f(half_width);
  Complex* dst = f.coeffs().data();
  for (int l1 = -half_width; l1 <= half_width; ++l1) {
    const Complex* row = buf + static_cast<std::size_t>(wrap(l1, m)) * hc;
    const Complex* mirror = buf + static_cast<std::size_t>(wrap(-l1, m)) * hc;
    const double s1 = std::abs(l1) == nyq ? 0.5 * norm : norm;
    for (int l2 = -half_width; l2 <= half_width; ++l2, ++dst) {
      Complex c = l2 >= 0 ? row[l2] : std::conj(mirror[-l2]);
      c *= std::abs(l2) == nyq ? 0.5 * s1 : s1;
      *dst = sym(l1, l2, c);
    }
  }
  return f;
}
}  // namespace

void FftGrid::to_physical(const SpectralField& f, std::span<double> out) const {
  scatter_inverse(*plans_, m_, f, out, Identity{});
}

void FftGrid::to_physical(const SpectralField& f, DiffOp op, std::span<double> out) const {
  scatter_inverse(*plans_, m_, f, out, Derivative{op});
}

std::vector<double> FftGrid::to_physical(const SpectralField& f) const {
  std::vector<double> out(size());
  to_physical(f, out);
  return out;
}

SpectralField FftGrid::to_spectral(std::span<const double> values, int half_width) const {
  return gather_forward(*plans_, m_, values, half_width, Identity{});
}

SpectralField FftGrid::to_spectral(std::span<const double> values, int half_width, DiffOp op) const {
  return gather_forward(*plans_, m_, values, half_width, Derivative{op});
}

double FftGrid::integrate(std::span<const double> values) const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * kTorusArea / static_cast<double>(size());
}

SpectralField transform(std::span<const double> values, int points) {
  const FftGrid g(points);
  return g.to_spectral(values, points / 2);
}

SpectralField transform(std::span<const double> values, const GridSpec& grid) {
  grid.validate();
  return FftGrid(grid.points).to_spectral(values, grid.cutoff());
}

std::vector<double> inverse_transform(const SpectralField& f, const GridSpec& grid) {
  grid.validate();
  if (f.half_width() > grid.cutoff()) throw ConfigError("field exceeds grid block B_J");
  return FftGrid(grid.points).to_physical(f);
}

std::vector<double> inverse_transform(const SpectralField& f, int points) {
  return FftGrid(points).to_physical(f);
}

// ---------------------------------------------------------------------------
// Littlewood-Paley

int block_index(int l1, int l2) noexcept {
  const int m = std::max(std::abs(l1), std::abs(l2));
  int j = 0;
  while ((1 << j) < m) ++j;
  return j;
}

SpectralField lp_block(const SpectralField& f, int j) {
  SpectralField out(f.half_width());
  const int n = f.half_width();
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      if (block_index(a, b) == j) out.at(a, b) = f(a, b);
  return out;
}

SpectralField lp_project(const SpectralField& f, int level) {
  if (level < 0) throw ConfigError("projection level must be >= 0");
  const int cutoff = level >= 30 ? f.half_width() : std::min(f.half_width(), 1 << level);
  return f.resized(cutoff);
}

// ---------------------------------------------------------------------------
// Norms

double inner(const SpectralField& f, const SpectralField& g) {
  const int n = std::min(f.half_width(), g.half_width());
  double s = 0.0;
  if (f.half_width() == g.half_width()) {
    const auto a = f.coeffs();
    const auto b = g.coeffs();
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return kTorusArea * s;
  }
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b) s += (f(a, b) * std::conj(g(a, b))).real();
  return kTorusArea * s;
}

double inner(const VectorField& f, const VectorField& g) { return inner(f.x, g.x) + inner(f.y, g.y); }

double l2_norm(const SpectralField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }
double l2_norm(const VectorField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

double sobolev_norm(const SpectralField& f, double k) {
  const int n = f.half_width();
  double s = 0.0;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b) {
      s += weight_power(1.0 + a * a + b * b, k) * std::norm(f(a, b));
    }
  return std::sqrt(kTorusArea * s);
}

double sobolev_norm(const VectorField& f, double k) {
  const double x = sobolev_norm(f.x, k);
  const double y = sobolev_norm(f.y, k);
  return std::sqrt(x * x + y * y);
}

// ---------------------------------------------------------------------------
// Multipliers

namespace {
template <class Fn>
SpectralField apply_multiplier(const SpectralField& f, Fn&& symbol) {
  SpectralField out(f.half_width());
  const int n = f.half_width();
  const Complex* src = f.coeffs().data();
  Complex* dst = out.coeffs().data();
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b, ++src, ++dst) *dst = symbol(a, b, *src);
  return out;
}

}  // namespace

SpectralField dx(const SpectralField& f) { return apply_multiplier(f, Derivative{DiffOp::dx}); }

SpectralField dy(const SpectralField& f) { return apply_multiplier(f, Derivative{DiffOp::dy}); }

SpectralField laplacian(const SpectralField& f) { return apply_multiplier(f, Derivative{DiffOp::laplacian}); }

SpectralField fractional_laplacian(const SpectralField& f, double s) {
  if (s < 0) throw ConfigError("fractional Laplacian order must be >= 0");
  return apply_multiplier(f, [s](int a, int b, Complex c) {
    const double r2 = a * a + b * b;
    return c * (r2 == 0.0 ? (s == 0.0 ? 1.0 : 0.0) : std::pow(r2, 0.5 * s));
  });
}

VectorField grad(const SpectralField& f) { return {dx(f), dy(f)}; }

VectorField perp_grad(const SpectralField& f) { return {-1.0 * dy(f), dx(f)}; }

SpectralField div(const VectorField& v) { return dx(v.x) + dy(v.y); }

SpectralField curl(const VectorField& v) { return dx(v.y) - dy(v.x); }

SpectralField differentiate(const SpectralField& f, DiffOp op) {
  switch (op) {
    case DiffOp::dx: return dx(f);
    case DiffOp::dy: return dy(f);
    case DiffOp::laplacian: return laplacian(f);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Products

SpectralField multiply(const SpectralField& f, const SpectralField& g, int out_half_width) {
  const int nf = f.half_width();
  const int ng = g.half_width();
  const int need = std::max(nf + ng + out_half_width + 1,
                            2 * std::max({nf, ng, out_half_width}) + 1);
  const FftGrid grid(fft_good_size(need));
  auto a = grid.to_physical(f);
  const auto b = grid.to_physical(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return grid.to_spectral(a, out_half_width);
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g,
                                const GridSpec& grid) {
  grid.validate();
  if (f.half_width() > grid.cutoff() || g.half_width() > grid.cutoff())
    throw ConfigError("dealiased_product: factor exceeds retained block B_J");
  const FftGrid fg(grid.points);
  auto a = fg.to_physical(f);
  const auto b = fg.to_physical(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return fg.to_spectral(a, grid.cutoff());
}

}  // namespace lusw
