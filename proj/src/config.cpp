#include "lusw/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lusw/error.hpp"

namespace lusw {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

double parse_double(std::string_view v, const std::string& key) {
  double d = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, d);
  if (v.empty() || r.ec != std::errc() || r.ptr != end)
    throw ConfigError(key + ": expected a number, got '" + std::string(v) + "'", key);
  return d;
}

template <class Int>
Int parse_int(std::string_view v, const std::string& key) {
  Int i = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, i);
  if (v.empty() || r.ec != std::errc() || r.ptr != end)
    throw ConfigError(key + ": expected an integer, got '" + std::string(v) + "'", key);
  return i;
}

bool parse_bool(std::string_view v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + std::string(v) + "'", key);
}

std::array<double, 2> parse_pair(std::string_view v, const std::string& key) {
  const auto parts = split(v, ',');
  if (parts.size() != 2) throw ConfigError(key + ": expected 'a,b'", key);
  return {parse_double(parts[0], key), parse_double(parts[1], key)};
}

std::vector<std::array<int, 2>> parse_wavenumbers(std::string_view v, const std::string& key) {
  std::vector<std::array<int, 2>> out;
  if (trim(v).empty()) return out;
  for (auto item : split(v, ';')) {
    const auto parts = split(item, ',');
    if (parts.size() != 2) throw ConfigError(key + ": expected 'l1,l2;l1,l2;...'", key);
    out.push_back({parse_int<int>(parts[0], key), parse_int<int>(parts[1], key)});
  }
  return out;
}

std::vector<int> parse_levels(std::string_view v, const std::string& key) {
  std::vector<int> out;
  if (trim(v).empty()) return out;
  for (auto item : split(v, ',')) out.push_back(parse_int<int>(item, key));
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

NoiseFamily parse_family(std::string_view v, const std::string& key) {
  if (v == "single-constant-vector") return NoiseFamily::single_constant_vector;
  if (v == "stream-function-modes") return NoiseFamily::stream_function_modes;
  throw ConfigError(key + " must be single-constant-vector or stream-function-modes", key);
}

std::string_view family_name(NoiseFamily f) {
  return f == NoiseFamily::single_constant_vector ? "single-constant-vector" : "stream-function-modes";
}

using Setter = std::function<void(RunConfig&, std::string_view, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  std::string name;
  Setter set;
  Getter get;
  bool physics;  // part of the params digest
};

template <class Access>
Key number(std::string name, Access acc, bool physics) {
  return {std::move(name),
          [acc](RunConfig& c, std::string_view v, const std::string& key) { acc(c) = parse_double(v, key); },
          [acc](const RunConfig& c) { return fmt(acc(c)); }, physics};
}

template <class Access>
Key integer(std::string name, Access acc, bool physics) {
  using T = std::remove_cvref_t<decltype(acc(std::declval<RunConfig&>()))>;
  return {std::move(name),
          [acc](RunConfig& c, std::string_view v, const std::string& key) { acc(c) = parse_int<T>(v, key); },
          [acc](const RunConfig& c) { return std::to_string(acc(c)); }, physics};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(integer("grid.J", [](auto& c) -> auto& { return c.grid.level; }, true));
    k.push_back(integer("grid.M", [](auto& c) -> auto& { return c.grid.points; }, true));
    k.push_back({"model.regime",
                 [](RunConfig& c, std::string_view v, const std::string&) { c.model.regime = parse_regime(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.model.regime)); }, true});
    k.push_back(number("model.alpha", [](auto& c) -> auto& { return c.model.alpha; }, true));
    k.push_back(number("model.beta", [](auto& c) -> auto& { return c.model.beta; }, true));
    k.push_back(number("model.nu", [](auto& c) -> auto& { return c.model.nu; }, true));
    k.push_back(number("model.eta", [](auto& c) -> auto& { return c.model.eta; }, true));
    k.push_back(number("model.g", [](auto& c) -> auto& { return c.model.g; }, true));
    k.push_back(number("model.f", [](auto& c) -> auto& { return c.model.f; }, true));
    k.push_back(number("model.rho", [](auto& c) -> auto& { return c.model.rho; }, true));
    k.push_back(integer("model.k", [](auto& c) -> auto& { return c.model.k; }, true));
    k.push_back(number("model.R", [](auto& c) -> auto& { return c.model.R; }, true));
    k.push_back({"noise.family",
                 [](RunConfig& c, std::string_view v, const std::string& key) { c.noise.family = parse_family(v, key); },
                 [](const RunConfig& c) { return std::string(family_name(c.noise.family)); }, true});
    k.push_back({"noise.vector",
                 [](RunConfig& c, std::string_view v, const std::string& key) { c.noise.vector = parse_pair(v, key); },
                 [](const RunConfig& c) { return fmt(c.noise.vector[0]) + "," + fmt(c.noise.vector[1]); }, true});
    k.push_back({"noise.wavenumbers",
                 [](RunConfig& c, std::string_view v, const std::string& key) {
                   c.noise.wavenumbers = parse_wavenumbers(v, key);
                 },
                 [](const RunConfig& c) {
                   std::string s;
                   for (const auto& l : c.noise.wavenumbers) {
                     if (!s.empty()) s += ';';
                     s += std::to_string(l[0]) + "," + std::to_string(l[1]);
                   }
                   return s;
                 },
                 true});
    k.push_back(number("noise.decay", [](auto& c) -> auto& { return c.noise.decay; }, true));
    k.push_back(number("noise.scale", [](auto& c) -> auto& { return c.noise.scale; }, true));
    k.push_back({"noise.require_solenoidal_isd",
                 [](RunConfig& c, std::string_view v, const std::string& key) {
                   c.noise.require_solenoidal_isd = parse_bool(v, key);
                 },
                 [](const RunConfig& c) { return std::string(c.noise.require_solenoidal_isd ? "true" : "false"); },
                 true});
    k.push_back(number("time.T", [](auto& c) -> auto& { return c.time.T; }, true));
    k.push_back(number("time.dt", [](auto& c) -> auto& { return c.time.dt; }, true));
    k.push_back(integer("time.snapshot_stride", [](auto& c) -> auto& { return c.time.snapshot_stride; }, false));
    k.push_back(integer("time.diagnostics_stride", [](auto& c) -> auto& { return c.time.diagnostics_stride; }, false));
    k.push_back(integer("rng.seed", [](auto& c) -> auto& { return c.seed; }, false));
    k.push_back(integer("rng.realizations", [](auto& c) -> auto& { return c.realizations; }, false));
    k.push_back(number("stopping.threshold", [](auto& c) -> auto& { return c.stop_threshold; }, false));
    k.push_back(number("stopping.factor", [](auto& c) -> auto& { return c.stop_factor; }, false));
    k.push_back({"study.levels",
                 [](RunConfig& c, std::string_view v, const std::string& key) { c.levels = parse_levels(v, key); },
                 [](const RunConfig& c) {
                   std::string s;
                   for (int l : c.levels) s += (s.empty() ? "" : ",") + std::to_string(l);
                   return s;
                 },
                 false});
    k.push_back(integer("study.halvings", [](auto& c) -> auto& { return c.halvings; }, false));
    k.push_back({"oracle.velocity",
                 [](RunConfig& c, std::string_view v, const std::string& key) { c.oracle_velocity = parse_pair(v, key); },
                 [](const RunConfig& c) { return fmt(c.oracle_velocity[0]) + "," + fmt(c.oracle_velocity[1]); },
                 false});
    k.push_back({"init.kind", [](RunConfig& c, std::string_view v, const std::string&) { c.init.kind = std::string(v); },
                 [](const RunConfig& c) { return c.init.kind; }, true});
    k.push_back(integer("init.seed", [](auto& c) -> auto& { return c.init.seed; }, true));
    k.push_back(number("init.decay", [](auto& c) -> auto& { return c.init.decay; }, true));
    k.push_back(integer("init.max_mode", [](auto& c) -> auto& { return c.init.max_mode; }, true));
    k.push_back(number("init.velocity_rms", [](auto& c) -> auto& { return c.init.velocity_rms; }, true));
    k.push_back(number("init.height_rms", [](auto& c) -> auto& { return c.init.height_rms; }, true));
    k.push_back(number("init.mean_depth", [](auto& c) -> auto& { return c.init.mean_depth; }, true));
    k.push_back({"output.dir", [](RunConfig& c, std::string_view v, const std::string&) { c.output_dir = std::string(v); },
                 [](const RunConfig& c) { return c.output_dir; }, false});
    k.push_back({"output.flux",
                 [](RunConfig& c, std::string_view v, const std::string& key) { c.flux = parse_bool(v, key); },
                 [](const RunConfig& c) { return std::string(c.flux ? "true" : "false"); }, false});
    return k;
  }();
  return table;
}

const Key* find_key(std::string_view name) {
  for (const auto& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  bool grid_m_set = false;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value", std::string(line));
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const Key* k = find_key(key);
    if (!k) throw ConfigError("unknown configuration key '" + key + "'", key);
    if (!seen.insert(key).second) throw ConfigError("duplicate configuration key '" + key + "'", key);
    k->set(cfg, value, key);
    if (key == "grid.M") grid_m_set = true;
  }
  if (!grid_m_set) cfg.grid.points = GridSpec::for_level(cfg.grid.level).points;
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  if (c.grid.level < 1) throw ConfigError("grid.J must be >= 1", "grid.J");
  c.grid.validate();
  c.model.validate();
  if (!(c.model.g > 0.0)) throw ConfigError("model.g must be > 0", "model.g");
  if (!(c.time.dt > 0.0) || !std::isfinite(c.time.dt)) throw ConfigError("time.dt must be > 0", "time.dt");
  if (!(c.time.T > 0.0) || !std::isfinite(c.time.T)) throw ConfigError("time.T must be > 0", "time.T");
  const double steps = c.time.T / c.time.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw ConfigError("time.T must be a whole multiple of time.dt", "time.T");
  if (c.time.snapshot_stride < 0) throw ConfigError("time.snapshot_stride must be >= 0", "time.snapshot_stride");
  if (c.time.diagnostics_stride < 1)
    throw ConfigError("time.diagnostics_stride must be >= 1", "time.diagnostics_stride");
  if (c.realizations < 1) throw ConfigError("rng.realizations must be >= 1", "rng.realizations");
  if (c.stop_threshold < 0.0 || !std::isfinite(c.stop_threshold))
    throw ConfigError("stopping.threshold must be >= 0 (0 selects the factor rule)", "stopping.threshold");
  if (!(c.stop_factor > 1.0)) throw ConfigError("stopping.factor must be > 1", "stopping.factor");
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (c.levels[i] < 1 || c.levels[i] > 12) throw ConfigError("study.levels entries must lie in [1, 12]", "study.levels");
    if (i > 0 && c.levels[i] <= c.levels[i - 1]) throw ConfigError("study.levels must be sorted ascending", "study.levels");
  }
  if (c.halvings < 1 || c.halvings > 12) throw ConfigError("study.halvings must lie in [1, 12]", "study.halvings");
  if (c.init.kind != "random-smooth" && c.init.kind != "zero")
    throw ConfigError("init.kind must be random-smooth or zero", "init.kind");
  if (c.init.max_mode < 0) throw ConfigError("init.max_mode must be >= 0", "init.max_mode");
  for (const auto& [v, key] : {std::pair{c.init.decay, "init.decay"}, {c.init.velocity_rms, "init.velocity_rms"},
                               {c.init.height_rms, "init.height_rms"}, {c.init.mean_depth, "init.mean_depth"}})
    if (!std::isfinite(v)) throw ConfigError(std::string(key) + " must be finite", key);
  if (c.init.velocity_rms < 0.0) throw ConfigError("init.velocity_rms must be >= 0", "init.velocity_rms");
  if (c.init.height_rms < 0.0) throw ConfigError("init.height_rms must be >= 0", "init.height_rms");

  // Noise: wavenumbers must fit the coarsest resolution of the study.
  int coarsest = c.grid.level;
  for (int l : c.levels) coarsest = std::min(coarsest, l);
  if (!(c.noise.scale >= 0.0) || !std::isfinite(c.noise.scale))
    throw ConfigError("noise.scale must be finite and >= 0", "noise.scale");
  for (double v : c.noise.vector)
    if (!std::isfinite(v)) throw ConfigError("noise.vector must be finite", "noise.vector");
  build_basis(c.noise, GridSpec::for_level(coarsest));
}

std::string to_text(const RunConfig& cfg) {
  std::string s;
  for (const auto& k : keys()) s += k.name + " = " + k.get(cfg) + "\n";
  return s;
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t params_digest(const RunConfig& cfg) {
  std::string s;
  for (const auto& k : keys())
    if (k.physics) s += k.name + "=" + k.get(cfg) + "\n";
  return fnv1a(s);
}

State initial_state(const InitConfig& init, int half_width) {
  if (init.kind == "zero") {
    State x(half_width);
    x.h.at(0, 0) = init.mean_depth;
    return x;
  }
  return random_state(half_width, init.seed, init.decay, init.max_mode, init.velocity_rms, init.height_rms,
                      init.mean_depth);
}

double stop_threshold(const RunConfig& cfg, const State& x0) {
  if (cfg.stop_threshold > 0.0) return cfg.stop_threshold;
  return cfg.stop_factor * composite_norm(x0, cfg.model.k);
}

}  // namespace lusw
