#include <cmath>
#include <random>

#include "doctest.h"
#include "lusw/error.hpp"
#include "lusw/spectral.hpp"
#include "lusw/state.hpp"
#include "oracles.hpp"

using namespace lusw;

namespace {

SpectralField smooth_field(std::uint64_t seed, int width = 16, double decay = 2.0, int max_mode = 16) {
  return random_field(width, seed, 0, decay, max_mode);
}

double max_coeff(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_CASE("transform: constant field has only the mean coefficient") {
  const GridSpec grid = GridSpec::for_level(2);
  const auto v = oracle::sample(grid.points, [](double, double) { return 1.0; });
  const auto f = transform(v, grid);
  CHECK(f(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
  SpectralField expect(grid.cutoff());
  expect.at(0, 0) = 1.0;
  CHECK(max_abs_diff(f, expect) < 1e-15);
}

TEST_CASE("transform: cos x has coefficients 1/2 at (+-1, 0)") {
  const GridSpec grid = GridSpec::for_level(3);
  const auto v = oracle::sample(grid.points, [](double x, double) { return std::cos(x); });
  const auto f = transform(v, grid);
  CHECK(max_abs_diff(f, oracle::cosine(grid.cutoff(), 1, 0)) < 1e-15);
  CHECK(std::abs(f(1, 0) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(f(-1, 0) - Complex(0.5, 0.0)) < 1e-15);
}

TEST_CASE("transform: forward coefficients agree with a direct Fourier sum") {
  const int m = 24;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(m * m);
  for (auto& x : v) x = u(rng);
  const auto f = transform(v, m);
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b) CHECK(std::abs(f(a, b) - oracle::coefficient(v, m, a, b)) < 1e-14);
}

TEST_CASE("transform: inverse of forward reproduces white noise") {
  for (int m : {16, 20, 33}) {
    std::mt19937_64 rng(m);
    std::normal_distribution<double> n01;
    std::vector<double> v(static_cast<std::size_t>(m) * m);
    for (auto& x : v) x = n01(rng);
    const auto back = inverse_transform(transform(v, m), m);
    double err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(back[i] - v[i]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("transform: inverse synthesis agrees with the direct sum") {
  const auto f = smooth_field(3, 6, 1.0, 6);
  const int m = 20;
  const auto fast = inverse_transform(f, m);
  const auto slow = oracle::synthesize(f, m);
  for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
}

TEST_CASE("transform: dimension mismatch is a configuration error") {
  const GridSpec grid = GridSpec::for_level(2);
  std::vector<double> v(10);
  CHECK_THROWS_AS(transform(v, grid), ConfigError);
  CHECK_THROWS_AS(inverse_transform(SpectralField(20), grid), ConfigError);
}

TEST_CASE("grid: validation enforces the dealiasing bound") {
  CHECK_NOTHROW(GridSpec::for_level(5).validate());
  CHECK(GridSpec::for_level(5).points == 128);
  CHECK_NOTHROW((GridSpec{5, 97}).validate());
  CHECK_THROWS_AS((GridSpec{5, 96}).validate(), ConfigError);
  CHECK_THROWS_AS((GridSpec{-1, 8}).validate(), ConfigError);
}

TEST_CASE("fft_good_size picks even 2-3-5 smooth sizes") {
  CHECK(fft_good_size(97) == 100);
  CHECK(fft_good_size(128) == 128);
  CHECK(fft_good_size(7) == 8);
  CHECK(fft_good_size(131) == 144);
}

TEST_CASE("block_index follows the sup-norm dyadic shells") {
  CHECK(block_index(0, 0) == 0);
  CHECK(block_index(1, -1) == 0);
  CHECK(block_index(2, 0) == 1);
  CHECK(block_index(3, 0) == 2);
  CHECK(block_index(-4, 1) == 2);
  CHECK(block_index(5, 0) == 3);
}

TEST_CASE("lp_block: single modes land in their shell") {
  const auto e10 = oracle::cosine(8, 1, 0);
  CHECK(max_abs_diff(lp_block(e10, 0), e10) == 0.0);
  const auto e30 = oracle::cosine(8, 3, 0);
  CHECK(max_coeff(lp_block(e30, 1)) == 0.0);
  CHECK(max_abs_diff(lp_block(e30, 2), e30) == 0.0);
  CHECK(max_coeff(lp_block(e30, 9)) == 0.0);
}

TEST_CASE("lp_block: idempotent and mutually orthogonal") {
  const auto f = smooth_field(5, 16, 1.0, 16);
  for (int j = 0; j <= 5; ++j) {
    const auto b = lp_block(f, j);
    CHECK(max_abs_diff(lp_block(b, j), b) == 0.0);
    for (int k = 0; k <= 5; ++k)
      if (k != j) CHECK(max_coeff(lp_block(b, k)) == 0.0);
  }
}

TEST_CASE("lp_project: examples") {
  const auto e50 = oracle::cosine(8, 5, 0);
  CHECK(max_coeff(lp_project(e50, 2)) == 0.0);
  const auto f = smooth_field(6, 4, 1.0, 4);
  CHECK(max_abs_diff(lp_project(f, 2), f) == 0.0);
  CHECK(lp_project(smooth_field(6, 16), 2).half_width() == 4);
}

TEST_CASE("lp: partition of unity is exact") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = smooth_field(100 + s, 16, 0.5, 16);
    SpectralField sum(16);
    for (int j = 0; j <= 4; ++j) sum += lp_block(f, j);
    CHECK(max_abs_diff(sum, f) == 0.0);
  }
}

TEST_CASE("lp: blocks of different fields are orthogonal, projections contract") {
  const auto f = smooth_field(7, 16, 1.0, 16);
  const auto g = smooth_field(8, 16, 1.0, 16);
  for (int j1 = 0; j1 <= 4; ++j1) {
    CHECK(l2_norm(lp_block(f, j1)) <= l2_norm(f));
    CHECK(l2_norm(lp_project(f, j1)) <= l2_norm(f));
    for (int j2 = 0; j2 <= 4; ++j2)
      if (j1 != j2) CHECK(inner(lp_block(f, j1), lp_block(g, j2)) == 0.0);
  }
}

TEST_CASE("lp_project commutes with every multiplier") {
  const auto f = smooth_field(9, 16, 1.0, 16);
  for (int level : {1, 2, 3}) {
    const int w = 1 << level;
    for (auto op : {DiffOp::dx, DiffOp::dy, DiffOp::laplacian})
      CHECK(max_abs_diff(lp_project(differentiate(f, op), level), differentiate(lp_project(f, level), op).resized(w)) ==
            0.0);
    CHECK(max_abs_diff(lp_project(fractional_laplacian(f, 1.5), level),
                       fractional_laplacian(lp_project(f, level), 1.5)) == 0.0);
  }
}

TEST_CASE("lp: tail bound ||f - J_N f||_{k}^2 <= ||f||_{k+1}^2 / N") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_field(32, 500 + s, 0, 1.5, 32);
    for (int level : {1, 2, 3, 4})
      for (double k : {0.0, 1.0, 2.0}) {
        const auto tail = f - lp_project(f, level).resized(32);
        const double lhs = std::pow(sobolev_norm(tail, k), 2);
        const double rhs = std::pow(sobolev_norm(f, k + 1), 2) / (1 << level);
        CHECK(lhs <= rhs);
      }
  }
}

TEST_CASE("sobolev_norm: examples and Parseval against grid quadrature") {
  CHECK(sobolev_norm(SpectralField(4), 0.0) == 0.0);
  const auto c = oracle::cosine(4, 1, 0);
  CHECK(sobolev_norm(c, 0.0) == doctest::Approx(std::sqrt(2.0 * oracle::kPi * oracle::kPi)).epsilon(1e-14));
  CHECK(sobolev_norm(c, 1.0) == doctest::Approx(2.0 * oracle::kPi).epsilon(1e-14));
  // H^1 of cos x by direct quadrature of f^2 + |grad f|^2
  const int m = 16;
  const auto f2 = oracle::sample(m, [](double x, double) { return std::cos(x) * std::cos(x) + std::sin(x) * std::sin(x); });
  CHECK(sobolev_norm(c, 1.0) == doctest::Approx(std::sqrt(oracle::quadrature(f2, m))).epsilon(1e-14));

  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = smooth_field(40 + s, 8, 1.0, 8);
    const int mm = 24;
    auto v = oracle::synthesize(f, mm);
    for (auto& x : v) x *= x;
    CHECK(std::pow(sobolev_norm(f, 0.0), 2) == doctest::Approx(oracle::quadrature(v, mm)).epsilon(1e-10));
    CHECK(std::pow(l2_norm(f), 2) == doctest::Approx(oracle::quadrature(v, mm)).epsilon(1e-10));
  }
}

TEST_CASE("sobolev_norm: negative orders and the vector norm") {
  const auto c = oracle::cosine(4, 1, 0);
  CHECK(sobolev_norm(c, -1.0) == doctest::Approx(oracle::kPi).epsilon(1e-14));
  const VectorField v{c, c};
  CHECK(sobolev_norm(v, 0.0) == doctest::Approx(2.0 * oracle::kPi).epsilon(1e-14));
}

TEST_CASE("differentiate: single modes and vector identities") {
  const auto c = oracle::cosine(4, 1, 0);
  CHECK(max_abs_diff(dx(c), oracle::sine(4, 1, 0, -1.0)) < 1e-16);
  CHECK(max_coeff(dy(c)) == 0.0);
  CHECK(max_abs_diff(laplacian(c), -1.0 * c) == 0.0);
  const auto psi = smooth_field(12, 8, 1.0, 8);
  CHECK(max_coeff(div(perp_grad(psi))) < 1e-14);
  CHECK(max_abs_diff(curl(perp_grad(psi)), laplacian(psi)) < 1e-13);
  CHECK(max_coeff(curl(grad(psi))) < 1e-14);
  CHECK(max_abs_diff(fractional_laplacian(psi, 2.0), -1.0 * laplacian(psi)) < 1e-13);
  CHECK(max_abs_diff(fractional_laplacian(psi, 0.0), psi) == 0.0);
}

TEST_CASE("Bernstein: two-sided block bounds with C1 = 2^-s, C2 = 2^(s/2)") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_field(64, 900 + seed, 0, 0.0, 64);
    for (double s : {0.5, 1.0, 2.0, 3.0}) {
      const auto ls = fractional_laplacian(f, s);
      for (int j = 0; j <= 6; ++j) {
        const double base = l2_norm(lp_block(f, j));
        const double lhs = l2_norm(lp_block(ls, j));
        const double scale = std::pow(2.0, s * j);
        CHECK(lhs <= std::pow(2.0, 0.5 * s) * scale * base * (1 + 1e-14));
        if (j >= 1) CHECK(lhs >= std::pow(2.0, -s) * scale * base * (1 - 1e-14));
      }
    }
  }
}

TEST_CASE("Bernstein: the lower constant is attained at the inner shell edge") {
  // |l| just above 2^(j-1) along an axis
  const int j = 3;
  SpectralField f = oracle::cosine(16, (1 << (j - 1)) + 1, 0);
  const double ratio = l2_norm(lp_block(fractional_laplacian(f, 1.0), j)) / (8.0 * l2_norm(lp_block(f, j)));
  CHECK(ratio == doctest::Approx(5.0 / 8.0).epsilon(1e-14));
  CHECK(ratio >= 0.5);
}

TEST_CASE("multiply: identity, trig identity and quadrature exactness") {
  const GridSpec grid = GridSpec::for_level(3);
  SpectralField one(grid.cutoff());
  one.at(0, 0) = 1.0;
  const auto g = smooth_field(13, 8, 1.0, 8);
  CHECK(max_abs_diff(dealiased_product(one, g, grid), g) < 1e-15);

  const auto c = oracle::cosine(8, 1, 0);
  auto expect = oracle::cosine(8, 2, 0, 0.5);
  expect.at(0, 0) = 0.5;
  CHECK(max_abs_diff(dealiased_product(c, c, grid), expect) < 1e-16);

  const auto f = smooth_field(14, 8, 1.0, 8);
  CHECK(inner(dealiased_product(f, g, grid), one) == doctest::Approx(inner(f, g)).epsilon(1e-13));
}

TEST_CASE("multiply: alias-free against explicit convolution") {
  const auto f = random_field(6, 21, 0, 0.5, 6);
  const auto g = random_field(6, 22, 0, 0.5, 6);
  CHECK(max_abs_diff(multiply(f, g, 12), oracle::convolve(f, g, 12)) < 1e-14);
  CHECK(max_abs_diff(multiply(f, g, 4), oracle::convolve(f, g, 4)) < 1e-14);
}

TEST_CASE("dealiased_product rejects factors outside the block") {
  const GridSpec grid = GridSpec::for_level(2);
  CHECK_THROWS_AS(dealiased_product(SpectralField(8), SpectralField(4), grid), ConfigError);
}

TEST_CASE("spectral field: Hermitian symmetry of random data and real transforms") {
  const auto f = smooth_field(15, 8, 1.0, 8);
  CHECK(hermitian_defect(f) == 0.0);
  std::vector<double> v = inverse_transform(f, 32);
  CHECK(hermitian_defect(transform(v, 32)) < 1e-15);
  SpectralField h(2);
  h.set_mode(1, 1, Complex(1.0, 2.0));
  CHECK(h(-1, -1) == Complex(1.0, -2.0));
  CHECK_THROWS(h.at(3, 0));
}

TEST_CASE("random_field coefficients do not depend on the requested width") {
  const auto a = random_field(8, 3, 1, 2.0, 6);
  const auto b = random_field(16, 3, 1, 2.0, 6);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(a(0, 0) == Complex{});
  CHECK(max_coeff(lp_block(b, 4)) == 0.0);
}
