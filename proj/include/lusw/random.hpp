#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace lusw {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent stream seed for realization `index` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Pair of N(0,1) variates keyed by (seed, a, b, c); Box-Muller on two
/// 53-bit uniforms in (0, 1].
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t a, std::uint32_t b,
                                         std::uint32_t c) noexcept {
  const auto r = philox4x32({a, b, c, 0x4C555357u},
                            {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::uint64_t w0 = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t w1 = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(w0 >> 11) + 1.0) * kScale;
  const double u2 = static_cast<double>(w1 >> 11) * kScale;
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

}  // namespace lusw
