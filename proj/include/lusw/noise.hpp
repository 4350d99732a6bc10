#pragma once

// Location-uncertainty noise sigma dB_t = sum_n Phi_n dbeta^n with
// divergence-free, time-independent basis fields, the variance tensor
// a = sum_n Phi_n Phi_n^T and the Ito-Stokes drift u_s = div(a) / 2.

#include <array>
#include <span>
#include <vector>

#include "lusw/spectral.hpp"
#include "lusw/state.hpp"

namespace lusw {

enum class NoiseFamily { single_constant_vector, stream_function_modes };

struct NoiseSpec {
  NoiseFamily family = NoiseFamily::stream_function_modes;
  std::array<double, 2> vector{1.0, 0.0};        // single-constant-vector direction
  std::vector<std::array<int, 2>> wavenumbers;   // stream-function modes
  double decay = 2.0;                            // Lambda_n ~ n^-decay
  double scale = 0.1;                            // epsilon
  bool require_solenoidal_isd = true;
};

struct NoiseMode {
  enum class Part { constant, cosine, sine };
  VectorField phi;
  double amplitude = 0.0;  // sqrt(Lambda_n)
  std::array<int, 2> wavenumber{0, 0};
  Part part = Part::constant;
};

/// Symmetric 2x2 matrix field.
struct MatrixField {
  SpectralField xx, xy, yy;
};

/// Immutable set of noise modes with the derived a and u_s.
class NoiseBasis {
 public:
  /// Throws ConfigError for an empty set, mismatched widths, or a mode with
  /// nonzero divergence.
  explicit NoiseBasis(std::vector<NoiseMode> modes);

  std::span<const NoiseMode> modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  /// Spectral half width K shared by all Phi_n.
  int half_width() const noexcept { return width_; }
  /// a, half width 2K.
  const MatrixField& covariance() const noexcept { return a_; }
  const VectorField& stokes_drift() const noexcept { return us_; }

 private:
  std::vector<NoiseMode> modes_;
  int width_ = 0;
  MatrixField a_;
  VectorField us_;
};

/// Builds the basis of a NoiseSpec. Stream-function wavenumber m (1-based,
/// in listed order) contributes modes n = 2m-1 (cos) and n = 2m (sin),
///   Phi_n = sqrt(Lambda_n) perp_grad(psi) / |l|,  psi in {cos(l.x), sin(l.x)},
///   Lambda_n = scale^2 n^-decay.
/// Wavenumbers must lie in B_J of `grid`; a wavenumber and its negative
/// count as a duplicate.
NoiseBasis build_basis(const NoiseSpec& spec, const GridSpec& grid);

/// Pointwise Gram sum a = sum_n Phi_n Phi_n^T (exact products).
MatrixField covariance_field(const NoiseBasis& basis);
/// u_s^i = 1/2 sum_j d_j a_ij
VectorField ito_stokes_drift(const MatrixField& a);
/// Smallest eigenvalue of a(x) over an M x M grid.
double min_eigenvalue_on_grid(const MatrixField& a, int points);

/// Grid samples of a scalar gradient.
struct GridGradient {
  std::vector<double> x, y;
};
GridGradient grid_gradient(const FftGrid& grid, const SpectralField& q);

/// Smallest grid that evaluates every noise term of a width-N state without
/// aliasing on the retained modes: max(3N + 1, 2N + 2K + 1).
int required_points(int state_half_width, int noise_half_width);

/// Grid samples of a basis on one FftGrid. Immutable after construction.
class NoiseOperators {
 public:
  NoiseOperators(const NoiseBasis& basis, const FftGrid& grid);

  const NoiseBasis& basis() const noexcept { return basis_; }
  const FftGrid& grid() const noexcept { return grid_; }

  /// sum_n dbeta_n Phi_n on the grid.
  std::array<std::vector<double>, 2> velocity(std::span<const double> dbeta) const;
  void velocity(std::span<const double> dbeta, std::array<std::vector<double>, 2>& out) const;
  /// acc += coeff * (v . grad q)
  static void add_advection(const std::array<std::vector<double>, 2>& v, const GridGradient& g,
                            double coeff, std::span<double> acc);
  /// acc += coeff * (u_s . grad q)
  void add_stokes_advection(const GridGradient& g, double coeff, std::span<double> acc) const;
  /// 1/2 div(a grad q), projected to half width `out`.
  SpectralField ito_correction(const GridGradient& g, int out) const;
  /// \int grad q . a grad q dx
  double gram_form(const GridGradient& g) const;
  /// sum_n || Phi_n . grad q ||_2^2
  double mode_energy(const GridGradient& g) const;
  /// Phi_n samples.
  const std::array<std::vector<double>, 2>& mode_samples(std::size_t n) const { return phi_[n]; }

 private:
  NoiseBasis basis_;
  FftGrid grid_;
  std::vector<double> axx_, axy_, ayy_;
  std::array<std::vector<double>, 2> us_;
  std::vector<std::array<std::vector<double>, 2>> phi_;
  bool has_stokes_ = false;
};

/// sum_n dbeta_n (Phi_n . grad) X for each of u_1, u_2, h, projected to X's width.
/// Throws ConfigError when dbeta.size() != basis.size().
State apply_transport_noise(const NoiseBasis& basis, const State& x, std::span<const double> dbeta);
/// 1/2 div(a grad phi) for each component, per unit time.
State ito_correction(const NoiseBasis& basis, const State& x);

}  // namespace lusw
