#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "ks2d/analysis.hpp"
#include "ks2d/errors.hpp"
#include "ks2d/grid.hpp"
#include "ks2d/solver.hpp"
#include "ks2d/version.hpp"

namespace ks2d {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double value) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

// ---------------------------------------------------------------------------
// Binary snapshot files: magic "2DKS", u32 version, u32 n, then lx1, lx2 and
// the save time as f64, then n*n f64 values in row-major order (row = x2
// index). All integers and doubles are little-endian.
// ---------------------------------------------------------------------------

inline constexpr std::array<char, 4> snapshot_magic = {'2', 'D', 'K', 'S'};
inline constexpr std::uint32_t snapshot_format_version = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

inline double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

}  // namespace detail

struct SnapshotRecord {
  GridSpec grid;
  double time = 0.0;
  PhysicalField field;
};

inline void write_snapshot(const PhysicalField& field, const GridSpec& grid, double time,
                           const std::filesystem::path& path) {
  if (field.n != grid.n) throw std::invalid_argument("write_snapshot: field/grid size mismatch");
  std::string payload;
  payload.reserve(28 + field.values.size() * 8);
  payload.append(snapshot_magic.data(), snapshot_magic.size());
  detail::put_u32(payload, snapshot_format_version);
  detail::put_u32(payload, static_cast<std::uint32_t>(grid.n));
  detail::put_f64(payload, grid.lx1);
  detail::put_f64(payload, grid.lx2);
  detail::put_f64(payload, time);
  for (double v : field.values) detail::put_f64(payload, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open snapshot file for writing: " + path.string());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw io_error("short write to snapshot file: " + path.string());
}

inline SnapshotRecord read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open snapshot file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 4 || std::memcmp(bytes.data(), snapshot_magic.data(), 4) != 0)
    throw io_error("bad magic in snapshot file: " + path.string());
  if (bytes.size() < 12)
    throw io_error("truncated snapshot header: " + path.string());
  const std::uint32_t version = detail::get_u32(bytes.data() + 4);
  if (version != snapshot_format_version)
    throw io_error("unsupported snapshot version " + std::to_string(version) + " (expected " +
                   std::to_string(snapshot_format_version) + "): " + path.string());
  const std::uint32_t n = detail::get_u32(bytes.data() + 8);
  if (n < 4 || n % 2 != 0 || n > (1u << 20))
    throw io_error("corrupt snapshot header (n = " + std::to_string(n) + "): " + path.string());
  const std::size_t expected = 36 + static_cast<std::size_t>(n) * n * 8;
  if (bytes.size() != expected) {
    const std::size_t have = bytes.size() > 36 ? (bytes.size() - 36) / 8 : 0;
    throw io_error("truncated snapshot payload: expected " +
                   std::to_string(static_cast<std::size_t>(n) * n) + " values, got " +
                   std::to_string(have) + ": " + path.string());
  }

  SnapshotRecord record;
  record.grid.n = static_cast<int>(n);
  record.grid.lx1 = detail::get_f64(bytes.data() + 12);
  record.grid.lx2 = detail::get_f64(bytes.data() + 20);
  record.time = detail::get_f64(bytes.data() + 28);
  record.field = PhysicalField(static_cast<int>(n));
  for (std::size_t m = 0; m < record.field.values.size(); ++m)
    record.field.values[m] = detail::get_f64(bytes.data() + 36 + m * 8);
  return record;
}

// ---------------------------------------------------------------------------
// JSON config echo and run manifests
// ---------------------------------------------------------------------------

inline const char* to_string(OperatorMode mode) {
  return mode == OperatorMode::paper ? "paper" : "full-biharmonic";
}

inline const char* to_string(ScalingMode mode) {
  return mode == ScalingMode::paper ? "paper" : "physical";
}

inline OperatorMode operator_mode_from_string(const std::string& s) {
  if (s == "paper") return OperatorMode::paper;
  if (s == "full-biharmonic") return OperatorMode::full_biharmonic;
  throw config_error("operator: expected 'paper' or 'full-biharmonic', got '" + s + "'");
}

inline ScalingMode scaling_mode_from_string(const std::string& s) {
  if (s == "paper") return ScalingMode::paper;
  if (s == "physical") return ScalingMode::physical;
  throw config_error("scaling: expected 'paper' or 'physical', got '" + s + "'");
}

inline nlohmann::json config_to_json(const SolverConfig& config) {
  return nlohmann::json{{"n", config.grid.n},
                        {"lx1", config.grid.lx1},
                        {"lx2", config.grid.lx2},
                        {"dt", config.dt},
                        {"t_final", config.t_final},
                        {"n_save", config.n_save},
                        {"operator", to_string(config.operator_mode)},
                        {"scaling", to_string(config.scaling_mode)},
                        {"nonlinear", config.nonlinear_enabled},
                        {"blowup_ceiling", config.blowup_ceiling}};
}

inline SolverConfig config_from_json(const nlohmann::json& j) {
  SolverConfig config;
  config.grid.n = j.at("n").get<int>();
  config.grid.lx1 = j.at("lx1").get<double>();
  config.grid.lx2 = j.at("lx2").get<double>();
  config.dt = j.at("dt").get<double>();
  config.t_final = j.at("t_final").get<double>();
  config.n_save = j.at("n_save").get<int>();
  config.operator_mode = operator_mode_from_string(j.at("operator").get<std::string>());
  config.scaling_mode = scaling_mode_from_string(j.at("scaling").get<std::string>());
  config.nonlinear_enabled = j.at("nonlinear").get<bool>();
  config.blowup_ceiling = j.at("blowup_ceiling").get<double>();
  return config;
}

inline std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct SnapshotFileEntry {
  double time = 0.0;
  long step = 0;
  std::string file;  // path relative to the manifest's directory
};

/// Run/study provenance record written next to the output files. The echoed
/// config is sufficient to reproduce the run bit-for-bit on one platform.
struct RunManifest {
  int schema_version = 1;
  std::string tool = tool_version();
  std::string mode;
  SolverConfig config;
  std::string started_at;
  std::string finished_at;
  double wall_time_seconds = 0.0;
  std::vector<SnapshotFileEntry> snapshots;
  std::optional<DivergenceInfo> divergence;
  nlohmann::json extra;  // study axes, auxiliary file names

  nlohmann::json to_json() const {
    nlohmann::json j{{"schema_version", schema_version},
                     {"tool", tool},
                     {"mode", mode},
                     {"config", config_to_json(config)},
                     {"started_at", started_at},
                     {"finished_at", finished_at},
                     {"wall_time_seconds", wall_time_seconds}};
    j["snapshots"] = nlohmann::json::array();
    for (const auto& s : snapshots)
      j["snapshots"].push_back({{"time", s.time}, {"step", s.step}, {"file", s.file}});
    if (divergence) {
      j["divergence"] = {{"step", divergence->step},
                         {"value", divergence->value},
                         {"kind", divergence->kind == DivergenceInfo::Kind::blowup ? "blowup"
                                                                                   : "reality"}};
    } else {
      j["divergence"] = nullptr;
    }
    if (!extra.is_null()) j["study"] = extra;
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.tool = j.at("tool").get<std::string>();
    m.mode = j.at("mode").get<std::string>();
    m.config = config_from_json(j.at("config"));
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    for (const auto& s : j.at("snapshots"))
      m.snapshots.push_back({s.at("time").get<double>(), s.at("step").get<long>(),
                             s.at("file").get<std::string>()});
    if (!j.at("divergence").is_null()) {
      DivergenceInfo d;
      d.step = j["divergence"].at("step").get<long>();
      d.value = j["divergence"].at("value").get<double>();
      d.kind = j["divergence"].at("kind").get<std::string>() == "reality"
                   ? DivergenceInfo::Kind::reality
                   : DivergenceInfo::Kind::blowup;
      m.divergence = d;
    }
    if (j.contains("study")) m.extra = j["study"];
    return m;
  }
};

inline void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open manifest for writing: " + path.string());
  out << manifest.to_json().dump(2) << '\n';
  if (!out) throw io_error("short write to manifest: " + path.string());
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed manifest " + path.string() + ": " + e.what());
  }
  return RunManifest::from_json(j);
}

// ---------------------------------------------------------------------------
// CSV reports
// ---------------------------------------------------------------------------

/// One row per (axis value, checkpoint) with header
/// axis_value,T,l2,linf,wall_time_s; the reference row carries zero errors.
inline void write_errors_csv(const ConvergenceReport& report, const std::filesystem::path& path) {
  if (report.checkpoints.empty())
    throw config_error("report: checkpoint list must not be empty");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open report for writing: " + path.string());
  out << "axis_value,T,l2,linf,wall_time_s\n";
  for (const auto& row : report.rows)
    for (std::size_t c = 0; c < report.checkpoints.size(); ++c)
      out << format_double(row.axis_value) << ',' << format_double(report.checkpoints[c]) << ','
          << format_double(row.errors[c].l2) << ',' << format_double(row.errors[c].linf) << ','
          << format_double(row.wall_time_seconds) << '\n';
  if (!out) throw io_error("short write to report: " + path.string());
}

/// Plot-ready x1,x2,u triples for one snapshot.
inline void write_contour_csv(const PhysicalField& field, const GridSpec& grid,
                              const std::filesystem::path& path) {
  if (field.n != grid.n) throw std::invalid_argument("write_contour_csv: size mismatch");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open contour file for writing: " + path.string());
  out << "x1,x2,u\n";
  const double h1 = grid.length1() / grid.n;
  const double h2 = grid.length2() / grid.n;
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j)
      out << format_double(j * h1) << ',' << format_double(i * h2) << ','
          << format_double(field(i, j)) << '\n';
  if (!out) throw io_error("short write to contour file: " + path.string());
}

struct ContourRequest {
  std::string name;  // used as contour_<name>.csv
  GridSpec grid;
  const PhysicalField* field = nullptr;
};

/// Write a convergence report into a directory: errors.csv, one contour CSV
/// per requested snapshot, and the manifest JSON alongside. Nothing is
/// written when the report is empty.
inline std::vector<std::filesystem::path> write_report(const ConvergenceReport& report,
                                                       const std::filesystem::path& dir,
                                                       const std::vector<ContourRequest>& contours,
                                                       const RunManifest& manifest) {
  if (report.checkpoints.empty())
    throw config_error("report: checkpoint list must not be empty");
  if (report.rows.empty()) throw config_error("report: row list must not be empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  const auto errors_path = dir / "errors.csv";
  write_errors_csv(report, errors_path);
  written.push_back(errors_path);
  for (const auto& c : contours) {
    const auto path = dir / ("contour_" + c.name + ".csv");
    write_contour_csv(*c.field, c.grid, path);
    written.push_back(path);
  }
  const auto manifest_path = dir / "manifest.json";
  write_manifest(manifest, manifest_path);
  written.push_back(manifest_path);
  return written;
}

}  // namespace ks2d
