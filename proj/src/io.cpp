#include "lusw/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lusw/error.hpp"

namespace lusw {

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

Snapshot Snapshot::from_state(const State& x, const GridSpec& grid, double time, std::uint64_t digest) {
  grid.validate();
  Snapshot s;
  s.level = static_cast<std::uint32_t>(grid.level);
  s.points = static_cast<std::uint32_t>(grid.points);
  s.time = time;
  s.digest = digest;
  const FftGrid fg(grid.points);
  const auto in = x.components();
  for (int c = 0; c < 3; ++c) s.fields[c] = fg.to_physical(*in[c]);
  return s;
}

State Snapshot::to_state() const {
  const GridSpec grid{static_cast<int>(level), static_cast<int>(points)};
  State x(grid.cutoff());
  auto dst = x.components();
  for (int c = 0; c < 3; ++c) *dst[c] = transform(fields[c], grid);
  return x;
}

std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  const std::size_t n = static_cast<std::size_t>(s.points) * s.points;
  for (const auto& f : s.fields)
    if (f.size() != n) throw IoError("snapshot field size does not match M*M");
  std::vector<unsigned char> out;
  out.reserve(kSnapshotHeaderBytes + 3 * n * 8);
  for (char ch : {'L', 'U', 'S', 'W'}) out.push_back(static_cast<unsigned char>(ch));
  put_u32(out, kSnapshotVersion);
  put_u32(out, s.level);
  put_u32(out, s.points);
  put_u32(out, 3);
  put_u64(out, std::bit_cast<std::uint64_t>(s.time));
  put_u64(out, s.digest);
  for (const auto& f : s.fields)
    for (double v : f) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

Snapshot decode_snapshot(std::span<const unsigned char> bytes, std::optional<std::uint64_t> expected_digest) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "LUSW", 4) != 0) throw IoError("bad magic");
  if (bytes.size() < kSnapshotHeaderBytes) throw IoError("truncated header");
  const unsigned char* p = bytes.data();
  if (get_u32(p + 4) != kSnapshotVersion)
    throw IoError("unsupported version " + std::to_string(get_u32(p + 4)));
  Snapshot s;
  s.level = get_u32(p + 8);
  s.points = get_u32(p + 12);
  if (get_u32(p + 16) != 3) throw IoError("unsupported field count " + std::to_string(get_u32(p + 16)));
  s.time = std::bit_cast<double>(get_u64(p + 20));
  s.digest = get_u64(p + 28);
  if (s.points == 0 || s.points > 65536) throw IoError("bad grid size in header");
  const std::size_t n = static_cast<std::size_t>(s.points) * s.points;
  if (bytes.size() < kSnapshotHeaderBytes + 3 * n * 8) throw IoError("truncated payload");
  if (bytes.size() > kSnapshotHeaderBytes + 3 * n * 8) throw IoError("trailing bytes after payload");
  if (expected_digest && *expected_digest != s.digest) throw IoError("digest mismatch");
  const unsigned char* q = p + kSnapshotHeaderBytes;
  for (auto& f : s.fields) {
    f.resize(n);
    for (std::size_t i = 0; i < n; ++i, q += 8) f[i] = std::bit_cast<double>(get_u64(q));
  }
  return s;
}

void write_snapshot(const std::string& path, const Snapshot& s) {
  const auto bytes = encode_snapshot(s);
  const std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_snapshot(const std::string& path, const State& x, const GridSpec& grid, double time,
                    std::uint64_t digest) {
  write_snapshot(path, Snapshot::from_state(x, grid, time, digest));
}

Snapshot read_snapshot(const std::string& path, std::optional<std::uint64_t> expected_digest) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes, expected_digest);
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string diagnostics_header(std::size_t flux_columns) {
  std::string h = "t,E_swe,l2,u_k2,h_k2,cancel1,cancel2,weak_lhs";
  for (std::size_t j = 0; j < flux_columns; ++j) h += ",gamma_flux_" + std::to_string(j);
  return h;
}

std::string diagnostics_csv(std::span<const DiagnosticsRecord> records, bool* has_nan) {
  const std::size_t flux = records.empty() ? 0 : records.front().gamma_flux.size();
  std::string out = diagnostics_header(flux) + "\n";
  bool nan = false;
  for (const auto& r : records) {
    if (r.gamma_flux.size() != flux) throw IoError("diagnostics records disagree on flux column count");
    std::string line;
    for (double v : {r.t, r.E_swe, r.l2, r.u_k2, r.h_k2, r.cancel1, r.cancel2, r.weak_lhs}) {
      nan = nan || std::isnan(v);
      if (!line.empty()) line += ',';
      line += format_double(v);
    }
    for (double v : r.gamma_flux) {
      nan = nan || std::isnan(v);
      line += ',' + format_double(v);
    }
    out += line + "\n";
  }
  if (has_nan) *has_nan = nan;
  return out;
}

bool write_diagnostics(std::span<const DiagnosticsRecord> records, const std::string& path) {
  bool nan = false;
  write_text(path, diagnostics_csv(records, &nan));
  return nan;
}

namespace {

double parse_field(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw IoError("bad number '" + std::string(s) + "' in diagnostics CSV");
  return v;
}

}  // namespace

std::vector<DiagnosticsRecord> parse_diagnostics(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,E_swe,l2,u_k2,h_k2,cancel1,cancel2,weak_lhs", 0) != 0)
    throw IoError("diagnostics CSV header missing");
  std::size_t cols = 1;
  for (char ch : line) cols += ch == ',';
  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::size_t start = 0;
    while (true) {
      const auto p = line.find(',', start);
      v.push_back(parse_field(std::string_view(line).substr(start, p == std::string::npos ? std::string::npos : p - start)));
      if (p == std::string::npos) break;
      start = p + 1;
    }
    if (v.size() != cols) throw IoError("diagnostics CSV row has " + std::to_string(v.size()) + " columns");
    DiagnosticsRecord r{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], {v.begin() + 8, v.end()}};
    out.push_back(std::move(r));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lusw
