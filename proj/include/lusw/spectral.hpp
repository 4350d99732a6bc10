#pragma once

// Fourier representation of real fields on the torus [0,2pi)^2.
//
// Coefficients follow fhat(l) = (2pi)^-2 \int f(y) e^{-i l.y} dy, so that
// f(x) = sum_l fhat(l) e^{i l.x}. A SpectralField stores the dense box
// |l_1|, |l_2| <= half_width; everything outside the box is zero.

#include <array>
#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace lusw {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kTorusArea = kTwoPi * kTwoPi;

class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int half_width);

  /// Zero field retaining the dyadic block B_level, i.e. half width 2^level.
  static SpectralField at_level(int level);

  int half_width() const noexcept { return n_; }
  int extent() const noexcept { return 2 * n_ + 1; }
  /// Smallest j with every stored wavenumber inside B_j.
  int max_block() const noexcept;

  bool contains(int l1, int l2) const noexcept {
    return l1 >= -n_ && l1 <= n_ && l2 >= -n_ && l2 <= n_;
  }
  /// Coefficient at (l1, l2); zero outside the stored box.
  Complex operator()(int l1, int l2) const noexcept {
    return contains(l1, l2) ? c_[index(l1, l2)] : Complex{};
  }
  Complex& at(int l1, int l2);
  /// Sets fhat(l) = c and fhat(-l) = conj(c).
  void set_mode(int l1, int l2, Complex c);

  std::span<Complex> coeffs() noexcept { return c_; }
  std::span<const Complex> coeffs() const noexcept { return c_; }

  /// Zero-padded or truncated copy.
  SpectralField resized(int half_width) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o; o may be narrower than this.
  SpectralField& add_scaled(const SpectralField& o, double s);

  std::size_t index(int l1, int l2) const noexcept {
    return static_cast<std::size_t>(l1 + n_) * static_cast<std::size_t>(extent()) +
           static_cast<std::size_t>(l2 + n_);
  }

 private:
  int n_;
  std::vector<Complex> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Largest |f(l) - conj(f(-l))| over the stored box.
double hermitian_defect(const SpectralField& f);
/// Largest coefficient difference over the union of both boxes.
double max_abs_diff(const SpectralField& a, const SpectralField& b);

/// Two velocity components.
struct VectorField {
  SpectralField x;
  SpectralField y;
};

/// Discretisation of the retained block and the quadrature grid.
struct GridSpec {
  int level = 1;   // J: retain |l_m| <= 2^J
  int points = 8;  // M: physical points per dimension

  static GridSpec for_level(int level);  // M = 2^(J+2)
  int cutoff() const noexcept { return 1 << level; }
  /// Throws ConfigError unless J >= 0 and M >= 3 * 2^J + 1.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Physical <-> spectral transforms

/// Smallest even integer >= n of the form 2^a 3^b 5^c.
int fft_good_size(int n);

enum class DiffOp { dx, dy, laplacian };

namespace detail {
struct FftPlans;
}

/// Real 2D transform on an M x M grid. Plans are cached per size and shared;
/// all member functions are const and safe to call concurrently.
/// Grid values are row-major with value(x_i, y_j) at index i*M + j,
/// x_i = 2 pi i / M.
class FftGrid {
 public:
  explicit FftGrid(int points);

  int points() const noexcept { return m_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(m_) * m_; }

  /// Samples of f on the grid. Requires f.half_width() <= M/2.
  std::vector<double> to_physical(const SpectralField& f) const;
  void to_physical(const SpectralField& f, std::span<double> out) const;
  /// Samples of op(f).
  void to_physical(const SpectralField& f, DiffOp op, std::span<double> out) const;
  /// Coefficients with |l_m| <= half_width (<= M/2). At half_width == M/2 on
  /// an even grid the Nyquist coefficient is split evenly between +-M/2.
  SpectralField to_spectral(std::span<const double> values, int half_width) const;
  /// op applied to the retained coefficients.
  SpectralField to_spectral(std::span<const double> values, int half_width, DiffOp op) const;
  /// (2pi)^2 / M^2 * sum of values: exact for trigonometric polynomials of
  /// degree < M.
  double integrate(std::span<const double> values) const;

 private:
  int m_;
  std::shared_ptr<const detail::FftPlans> plans_;
};

/// Full-resolution forward transform of an M x M sample array.
SpectralField transform(std::span<const double> values, int points);
/// Forward transform truncated to the grid's retained block B_J.
SpectralField transform(std::span<const double> values, const GridSpec& grid);
std::vector<double> inverse_transform(const SpectralField& f, const GridSpec& grid);
std::vector<double> inverse_transform(const SpectralField& f, int points);

// ---------------------------------------------------------------------------
// Littlewood-Paley blocks

/// Dyadic block index of wavenumber l: 0 if max|l_m| <= 1, else the j with
/// 2^(j-1) < max|l_m| <= 2^j.
int block_index(int l1, int l2) noexcept;
/// J_j f: coefficients restricted to B_j \ B_{j-1} (B_0 for j = 0).
SpectralField lp_block(const SpectralField& f, int j);
/// Sum of blocks 0..level, returned with half width min(f.half_width(), 2^level).
SpectralField lp_project(const SpectralField& f, int level);

// ---------------------------------------------------------------------------
// Norms and inner products (Parseval, exact)

/// <f, g> = \int f g dx for real fields.
double inner(const SpectralField& f, const SpectralField& g);
double inner(const VectorField& f, const VectorField& g);
double l2_norm(const SpectralField& f);
double l2_norm(const VectorField& f);
/// ||f||_{k,2} with multiplier (1 + |l|^2)^(k/2); k may be negative.
double sobolev_norm(const SpectralField& f, double k);
double sobolev_norm(const VectorField& f, double k);

// ---------------------------------------------------------------------------
// Spectral multipliers

SpectralField dx(const SpectralField& f);
SpectralField dy(const SpectralField& f);
SpectralField laplacian(const SpectralField& f);
/// Lambda^s = (-Delta)^(s/2), s >= 0.
SpectralField fractional_laplacian(const SpectralField& f, double s);
VectorField grad(const SpectralField& f);
/// (-d_y f, d_x f)
VectorField perp_grad(const SpectralField& f);
SpectralField div(const VectorField& v);
/// d_x v_y - d_y v_x
SpectralField curl(const VectorField& v);

SpectralField differentiate(const SpectralField& f, DiffOp op);

// ---------------------------------------------------------------------------
// Products

/// Coefficients of f*g with |l_m| <= out_half_width, alias-free: evaluated
/// on a grid of at least f.n + g.n + out + 1 points.
SpectralField multiply(const SpectralField& f, const SpectralField& g, int out_half_width);
/// Product on grid.points, projected to B_J. Throws ConfigError when either
/// factor exceeds B_J or the grid cannot dealias quadratic products.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g,
                                const GridSpec& grid);

}  // namespace lusw
