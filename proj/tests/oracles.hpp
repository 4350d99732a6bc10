#pragma once

// Reference computations that bypass the FFT path: direct Fourier sums,
// grid quadrature, and brute-force triad convolution.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "lusw/spectral.hpp"
#include "lusw/state.hpp"

namespace oracle {

using lusw::Complex;
using lusw::SpectralField;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

/// Samples fn(x, y) on the M x M grid, value(x_i, y_j) at i*M + j.
inline std::vector<double> sample(int m, const std::function<double(double, double)>& fn) {
  std::vector<double> v(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(i) * m + j] = fn(kTwoPi * i / m, kTwoPi * j / m);
  return v;
}

/// (1/M^2) sum f(x) e^{-i l.x}
inline Complex coefficient(const std::vector<double>& v, int m, int l1, int l2) {
  Complex s{};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double ph = -kTwoPi * (static_cast<double>(l1) * i + static_cast<double>(l2) * j) / m;
      s += v[static_cast<std::size_t>(i) * m + j] * Complex(std::cos(ph), std::sin(ph));
    }
  return s / static_cast<double>(m * m);
}

/// sum_l fhat(l) e^{i l.x} at one point.
inline double evaluate(const SpectralField& f, double x, double y) {
  const int n = f.half_width();
  double s = 0.0;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b) {
      const Complex c = f(a, b);
      if (c == Complex{}) continue;
      const double ph = a * x + b * y;
      s += c.real() * std::cos(ph) - c.imag() * std::sin(ph);
    }
  return s;
}

/// Direct synthesis on an M x M grid.
inline std::vector<double> synthesize(const SpectralField& f, int m) {
  return sample(m, [&](double x, double y) { return evaluate(f, x, y); });
}

/// (2pi)^2 / M^2 sum of samples.
inline double quadrature(const std::vector<double>& v, int m) {
  double s = 0.0;
  for (double x : v) s += x;
  return kTwoPi * kTwoPi * s / (static_cast<double>(m) * m);
}

/// Coefficients of f * g by explicit convolution, restricted to |l_m| <= out.
inline SpectralField convolve(const SpectralField& f, const SpectralField& g, int out) {
  SpectralField r(out);
  const int nf = f.half_width();
  for (int a = -out; a <= out; ++a)
    for (int b = -out; b <= out; ++b) {
      Complex s{};
      for (int p1 = -nf; p1 <= nf; ++p1)
        for (int p2 = -nf; p2 <= nf; ++p2) {
          const Complex fp = f(p1, p2);
          if (fp == Complex{}) continue;
          s += fp * g(a - p1, b - p2);
        }
      r.at(a, b) = s;
    }
  return r;
}

/// Gamma_N = \int J_N(u_i u_j) d_j (J_N u_i) as a sum over triads p + q = l, |l|_inf <= N.
inline double triad_flux(const lusw::VectorField& u, int level) {
  const int n = 1 << level;
  const SpectralField* c[2] = {&u.x, &u.y};
  double total = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const SpectralField prod = convolve(*c[i], *c[j], n);
      for (int a = -n; a <= n; ++a)
        for (int b = -n; b <= n; ++b) {
          const int lj = j == 0 ? a : b;
          const Complex grad = Complex(0.0, lj) * (*c[i])(a, b);
          total += (prod(a, b) * std::conj(grad)).real();
        }
    }
  return kTwoPi * kTwoPi * total;
}

/// Single cosine mode amp * cos(l.x) as coefficients.
inline SpectralField cosine(int half_width, int l1, int l2, double amp = 1.0) {
  SpectralField f(half_width);
  if (l1 == 0 && l2 == 0) {
    f.at(0, 0) = amp;
  } else {
    f.set_mode(l1, l2, 0.5 * amp);
  }
  return f;
}

/// amp * sin(l.x) as coefficients.
inline SpectralField sine(int half_width, int l1, int l2, double amp = 1.0) {
  SpectralField f(half_width);
  f.set_mode(l1, l2, Complex(0.0, -0.5 * amp));
  return f;
}

}  // namespace oracle
