#pragma once

// JSON environments, gauge files and deterministic number formatting.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ptransfer/profiles.hpp"
#include "ptransfer/rayleigh.hpp"
#include "ptransfer/reconstruct.hpp"
#include "ptransfer/twofluid.hpp"

namespace ptransfer::io {

using json = nlohmann::json;

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
/// "fnv1a:" followed by 16 hex digits of the hash of the canonical dump.
std::string content_hash(const json& canonical);

ShearProfile shear_from_json(const json& j, double bottom, double top, bool upper_layer = false);
DensityProfile density_from_json(const json& j, double h0);

/// Single-fluid environment: {"shear": {...}, "density": {...}?, "h0", "g"}.
struct Environment {
  ShearProfile shear;
  std::optional<DensityProfile> density;
  double h0;
  double g;
  json canonical;

  const DensityProfile* density_ptr() const { return density ? &*density : nullptr; }
};
Environment environment_from_json(const json& j);

/// Two-fluid environment: the single-fluid keys plus "upper", "rho_minus",
/// "rho_plus", "H" (number or "inf") and "sigma".
struct TwoFluidConfig {
  TwoFluidEnv env;
  json canonical;
};
TwoFluidConfig two_fluid_from_json(const json& j);

/// Reads and parses a JSON file; errors are Errc::format.
json read_json_file(const std::string& path);

/// Samples from a two-column CSV (header optional, '#' comments skipped).
std::vector<Sample> read_table_csv(const std::string& path);

/// Gauge CSV with header "t,p" and an optional JSON sidecar
/// {rho_ref, h0, g, pressure_kind}.
GaugeRecord read_gauge(const std::string& csv_path, const std::optional<std::string>& meta_path,
                       const GaugeMeta& defaults);
std::string gauge_csv(const GaugeRecord& record);
json gauge_meta_json(const GaugeMeta& meta);
/// Path of the sidecar that accompanies a gauge CSV: the extension replaced by ".json".
std::string sidecar_path(const std::string& csv_path);

json mode_to_json(const ModeSolution& mode);

/// CSV text with a leading block of "# key=value" metadata lines.
class CsvTable {
public:
  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double value);
  void header(std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& cells);
  std::string str() const;

private:
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

}  // namespace ptransfer::io
