#pragma once

// Run configuration: flat `key = value` lines with dotted sections, `#`
// comments. Unknown keys and malformed values raise ConfigError naming the key.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lusw/model.hpp"
#include "lusw/noise.hpp"
#include "lusw/spectral.hpp"
#include "lusw/state.hpp"

namespace lusw {

struct TimeConfig {
  double T = 1.0;
  double dt = 1e-3;
  int snapshot_stride = 0;
  int diagnostics_stride = 1;
};

struct InitConfig {
  std::string kind = "random-smooth";
  std::uint64_t seed = 1;
  double decay = 2.0;
  int max_mode = 4;
  double velocity_rms = 0.1;
  double height_rms = 0.01;
  double mean_depth = 1.0;
};

struct RunConfig {
  GridSpec grid = GridSpec::for_level(5);
  ModelParams model;
  NoiseSpec noise{NoiseFamily::stream_function_modes, {1.0, 0.0}, {{1, 0}, {0, 1}, {1, 1}}, 2.0, 0.1, true};
  TimeConfig time;
  std::uint64_t seed = 0;
  int realizations = 1;
  double stop_threshold = 0.0;  // 0: stop_factor * ||X_0||_{k,2}
  double stop_factor = 1e3;
  std::vector<int> levels;
  int halvings = 4;
  std::array<double, 2> oracle_velocity{1.0, 0.0};
  InitConfig init;
  std::string output_dir = "out";
  bool flux = false;
};

/// Parses and validates. Throws ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
/// Checks every cross-field rule; throws ConfigError naming the key.
void validate(const RunConfig& cfg);
/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& cfg);
/// FNV-1a of the canonical grid/model/noise/time/init entries.
std::uint64_t params_digest(const RunConfig& cfg);
std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Initial state of the configured kind at half width `half_width`.
State initial_state(const InitConfig& init, int half_width);
/// Stop threshold for a given X_0.
double stop_threshold(const RunConfig& cfg, const State& x0);

}  // namespace lusw
