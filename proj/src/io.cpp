#include "ptransfer/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace ptransfer::io {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::format, msg); }

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) bad(where + " must be a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) bad("unknown key '" + key + "' in " + where);
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where + " is missing '" + key + "'");
  if (!j.at(key).is_number()) bad(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::string kind_of(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    bad(where + " needs a string 'kind'");
  return j.at("kind").get<std::string>();
}

std::vector<Sample> samples_of(const json& j, const std::string& where) {
  if (!j.contains("samples") || !j.at("samples").is_array())
    bad(where + " needs 'samples' as [[y, value], ...]");
  std::vector<Sample> out;
  for (const auto& row : j.at("samples")) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
      bad(where + ".samples entries must be [y, value] number pairs");
    out.emplace_back(row[0].get<double>(), row[1].get<double>());
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s, const std::string& where) {
  s = trim(s);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    bad("cannot parse number '" + std::string(s) + "' in " + where);
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Upper end used for an unbounded upper-layer profile that has no natural one.
double open_top(const json& j, double h0) {
  const std::string kind = kind_of(j, "upper");
  if (kind == "table") {
    const auto s = samples_of(j, "upper");
    if (s.empty()) bad("upper.samples is empty");
    return s.back().first;
  }
  if (kind == "piecewise") {
    const double h1 = number(j, "h1", "upper");
    return h1 + std::max(h1 - h0, h0);
  }
  return 2.0 * h0;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) bad("number formatting failed");
  return {buf, ptr};
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string content_hash(const json& canonical) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical.dump())));
  return std::string("fnv1a:") + buf;
}

ShearProfile shear_from_json(const json& j, double bottom, double top, bool upper_layer) {
  const std::string where = upper_layer ? "upper" : "shear";
  const std::string kind = kind_of(j, where);
  if (kind == "zero") {
    allow_keys(j, {"kind"}, where);
    return {shear::Zero{}, bottom, top};
  }
  if (kind == "linear") {
    allow_keys(j, {"kind", "gamma", "y_ref", "u_ref"}, where);
    shear::Linear p;
    p.gamma = number(j, "gamma", where);
    p.y_ref = number_or(j, "y_ref", upper_layer ? bottom : top, where);
    p.u_ref = number_or(j, "u_ref", 0.0, where);
    return {p, bottom, top};
  }
  if (kind == "piecewise") {
    allow_keys(j, {"kind", "gamma_minus", "gamma_plus", "h1"}, where);
    return {shear::PiecewiseLinear{number(j, "gamma_minus", where), number(j, "gamma_plus", where),
                                   number(j, "h1", where)},
            bottom, top};
  }
  if (kind == "table") {
    allow_keys(j, {"kind", "samples"}, where);
    return {shear::Tabulated{samples_of(j, where)}, bottom, top};
  }
  bad("unknown " + where + " kind '" + kind + "' (zero, linear, piecewise, table)");
}

DensityProfile density_from_json(const json& j, double h0) {
  const std::string kind = kind_of(j, "density");
  if (kind == "constant") {
    allow_keys(j, {"kind", "value"}, "density");
    return DensityProfile::constant(number(j, "value", "density"), h0);
  }
  if (kind == "exponential") {
    allow_keys(j, {"kind", "beta", "scale"}, "density");
    return DensityProfile::exponential(number(j, "beta", "density"), h0,
                                       number_or(j, "scale", 1.0, "density"));
  }
  if (kind == "table") {
    allow_keys(j, {"kind", "samples"}, "density");
    return {density::Tabulated{samples_of(j, "density")}, h0};
  }
  bad("unknown density kind '" + kind + "' (constant, exponential, table)");
}

Environment environment_from_json(const json& j) {
  allow_keys(j, {"shear", "density", "h0", "g"}, "environment");
  const double h0 = number(j, "h0", "environment");
  const double g = number_or(j, "g", 9.81, "environment");
  if (!j.contains("shear")) bad("environment is missing 'shear'");
  json canonical = j;
  canonical["g"] = g;
  std::optional<DensityProfile> dens;
  if (j.contains("density")) dens = density_from_json(j.at("density"), h0);
  if (!(g > 0)) throw Error(Errc::invalid_argument, "g must be positive");
  return {shear_from_json(j.at("shear"), 0.0, h0), std::move(dens), h0, g, canonical};
}

TwoFluidConfig two_fluid_from_json(const json& j) {
  allow_keys(j, {"shear", "upper", "h0", "g", "rho_minus", "rho_plus", "H", "sigma"},
             "two-fluid environment");
  const std::string where = "two-fluid environment";
  const double h0 = number(j, "h0", where);
  const double g = number_or(j, "g", 9.81, where);
  double H = std::numeric_limits<double>::infinity();
  if (j.contains("H")) {
    const auto& h = j.at("H");
    if (h.is_string()) {
      if (h.get<std::string>() != "inf") bad("H must be a number or \"inf\"");
    } else if (h.is_number()) {
      H = h.get<double>();
    } else {
      bad("H must be a number or \"inf\"");
    }
  }
  if (!j.contains("shear")) bad(where + " is missing 'shear'");
  const json upper = j.value("upper", json{{"kind", "zero"}});
  json canonical = j;
  canonical["g"] = g;
  canonical["upper"] = upper;
  canonical["H"] = std::isinf(H) ? json("inf") : json(H);
  canonical["rho_plus"] = number_or(j, "rho_plus", 0.0, where);
  canonical["sigma"] = number_or(j, "sigma", 0.0, where);
  if (!(H > h0)) throw Error(Errc::invalid_argument, "the lid H must lie above h0");
  const double top = std::isinf(H) ? open_top(upper, h0) : H;

  TwoFluidEnv env{shear_from_json(j.at("shear"), 0.0, h0),
                  shear_from_json(upper, h0, top, true),
                  number(j, "rho_minus", where),
                  canonical["rho_plus"].get<double>(),
                  h0,
                  H,
                  canonical["sigma"].get<double>(),
                  g};
  env.validate();
  return {std::move(env), canonical};
}

json read_json_file(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad("invalid JSON in '" + path + "': " + e.what());
  }
}

std::vector<Sample> read_table_csv(const std::string& path) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  std::vector<Sample> out;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t);
    if (cells.size() != 2) bad(path + ":" + std::to_string(lineno) + ": expected two columns");
    if (first) {
      first = false;
      double probe;
      const auto c0 = trim(cells[0]);
      if (std::from_chars(c0.data(), c0.data() + c0.size(), probe).ec != std::errc()) continue;
    }
    const std::string where = path + ":" + std::to_string(lineno);
    out.emplace_back(parse_double(cells[0], where), parse_double(cells[1], where));
  }
  return out;
}

std::string sidecar_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

GaugeRecord read_gauge(const std::string& csv_path, const std::optional<std::string>& meta_path,
                       const GaugeMeta& defaults) {
  const std::string text = read_text(csv_path);
  std::istringstream in(text);
  std::string line;
  std::vector<double> t, p;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::string where = csv_path + ":" + std::to_string(lineno);
    const auto cells = split(s);
    if (!header) {
      if (cells.size() != 2 || trim(cells[0]) != "t" || trim(cells[1]) != "p")
        bad(where + ": gauge header must be 't,p'");
      header = true;
      continue;
    }
    if (cells.size() != 2) bad(where + ": expected two columns");
    t.push_back(parse_double(cells[0], where));
    p.push_back(parse_double(cells[1], where));
  }
  if (!header) bad(csv_path + ": missing 't,p' header");

  GaugeRecord rec;
  rec.t = Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  rec.p = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  rec.meta = defaults;

  std::optional<std::string> sidecar = meta_path;
  if (!sidecar && std::filesystem::exists(sidecar_path(csv_path))) sidecar = sidecar_path(csv_path);
  if (sidecar) {
    const json m = read_json_file(*sidecar);
    allow_keys(m, {"rho_ref", "h0", "g", "pressure_kind"}, "gauge metadata");
    rec.meta.rho_ref = number_or(m, "rho_ref", defaults.rho_ref, "gauge metadata");
    rec.meta.h0 = number_or(m, "h0", defaults.h0, "gauge metadata");
    rec.meta.g = number_or(m, "g", defaults.g, "gauge metadata");
    if (m.contains("pressure_kind")) {
      if (!m.at("pressure_kind").is_string()) bad("gauge metadata.pressure_kind must be a string");
      rec.meta.kind = pressure_kind_from_string(m.at("pressure_kind").get<std::string>());
    }
  }
  rec.validate();
  return rec;
}

std::string gauge_csv(const GaugeRecord& record) {
  std::string out = "t,p\n";
  for (Eigen::Index i = 0; i < record.size(); ++i)
    out += format_double(record.t[i]) + "," + format_double(record.p[i]) + "\n";
  return out;
}

json gauge_meta_json(const GaugeMeta& meta) {
  return {{"rho_ref", meta.rho_ref},
          {"h0", meta.h0},
          {"g", meta.g},
          {"pressure_kind", to_string(meta.kind)}};
}

json mode_to_json(const ModeSolution& mode) {
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  json j = {{"y", vec(mode.y)},
            {"phi", vec(mode.phi)},
            {"phi_prime", vec(mode.phi_prime)},
            {"c", mode.c},
            {"k", mode.k},
            {"kind", mode.kind == ModeKind::stratified ? "stratified" : "homogeneous"}};
  if (mode.kind == ModeKind::stratified) {
    j["varphi"] = vec(mode.varphi);
    j["varphi_prime"] = vec(mode.varphi_prime);
  }
  if (!mode.jumps.empty()) {
    json jumps = json::array();
    for (const auto& s : mode.jumps) jumps.push_back({{"y", s.y}, {"phi_prime_above", s.phi_prime_above}});
    j["jumps"] = jumps;
  }
  return j;
}

void CsvTable::meta(const std::string& key, const std::string& value) {
  meta_.emplace_back(key, value);
}

void CsvTable::meta(const std::string& key, double value) { meta(key, format_double(value)); }

void CsvTable::header(std::vector<std::string> columns) { header_ = std::move(columns); }

void CsvTable::row(const std::vector<double>& values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_double(values[i]);
  }
  rows_.push_back(std::move(line));
}

void CsvTable::row_text(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& [k, v] : meta_) out += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  if (!header_.empty()) out += '\n';
  for (const auto& r : rows_) out += r + '\n';
  return out;
}

}  // namespace ptransfer::io
