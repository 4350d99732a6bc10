#pragma once

// Snapshot files and diagnostics CSV.
//
// Snapshot layout (little endian):
//   0  char[4]  "LUSW"
//   4  u32      format version (1)
//   8  u32      J
//   12 u32      M
//   16 u32      field count (3)
//   20 f64      time
//   28 u64      params digest
//   36 f64[3][M*M]  u1, u2, h samples, row-major, value(x_i, y_j) at i*M + j

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lusw/diagnostics.hpp"
#include "lusw/spectral.hpp"
#include "lusw/state.hpp"

namespace lusw {

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 36;

struct Snapshot {
  std::uint32_t level = 0;
  std::uint32_t points = 0;
  double time = 0.0;
  std::uint64_t digest = 0;
  std::array<std::vector<double>, 3> fields;  // u1, u2, h

  /// Grid samples of x on grid.points.
  static Snapshot from_state(const State& x, const GridSpec& grid, double time, std::uint64_t digest);
  /// Coefficients on B_J.
  State to_state() const;
};

std::vector<unsigned char> encode_snapshot(const Snapshot& s);
/// Throws IoError: "bad magic", "unsupported version", "truncated payload",
/// "digest mismatch" (when `expected_digest` is given), or a header error.
Snapshot decode_snapshot(std::span<const unsigned char> bytes, std::optional<std::uint64_t> expected_digest = {});

void write_snapshot(const std::string& path, const Snapshot& s);
void write_snapshot(const std::string& path, const State& x, const GridSpec& grid, double time,
                    std::uint64_t digest);
Snapshot read_snapshot(const std::string& path, std::optional<std::uint64_t> expected_digest = {});

/// %.17g, with "nan", "inf", "-inf".
std::string format_double(double v);
/// Header `t,E_swe,l2,u_k2,h_k2,cancel1,cancel2,weak_lhs,gamma_flux_0..`.
std::string diagnostics_header(std::size_t flux_columns);
/// Returns true when any written value is NaN.
bool write_diagnostics(std::span<const DiagnosticsRecord> records, const std::string& path);
std::string diagnostics_csv(std::span<const DiagnosticsRecord> records, bool* has_nan = nullptr);
std::vector<DiagnosticsRecord> parse_diagnostics(const std::string& text);

/// Writes text to path, creating parent directories. Throws IoError.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace lusw
