#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "ptransfer/dispersion.hpp"
#include "ptransfer/io.hpp"
#include "ptransfer/reconstruct.hpp"
#include "ptransfer/transfer.hpp"
#include "ptransfer/twofluid.hpp"

namespace ptransfer::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

constexpr double unset = std::numeric_limits<double>::quiet_NaN();

bool given(double v) { return !std::isnan(v); }

[[noreturn]] void usage(const std::string& msg) { throw Error(Errc::invalid_argument, msg); }

enum class Format { csv, json };

/// One tabular result plus its metadata block.
struct Report {
  std::vector<std::pair<std::string, json>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add_meta(const std::string& key, json value) { meta.emplace_back(key, std::move(value)); }

  std::string render(Format f) const {
    if (f == Format::json) {
      json m = json::object();
      for (const auto& [k, v] : meta) m[k] = v;
      json r = json::array();
      for (const auto& row : rows) r.push_back(row);
      return json{{"meta", m}, {"columns", columns}, {"rows", r}}.dump(1) + "\n";
    }
    io::CsvTable t;
    for (const auto& [k, v] : meta) t.meta(k, cell(v));
    t.header(columns);
    for (const auto& row : rows) {
      std::vector<std::string> cells;
      for (const auto& v : row) cells.push_back(cell(v));
      t.row_text(cells);
    }
    return t.str();
  }

  static std::string cell(const json& v) {
    if (v.is_number()) return io::format_double(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "nan";
    return v.dump();
  }
};

json num(double v) { return std::isfinite(v) ? json(v) : json(io::format_double(v)); }

struct EnvFlags {
  std::string config;
  std::string shear;
  double gamma = unset, gamma_minus = unset, gamma_plus = unset, h1 = unset;
  std::string table;
  std::string density;
  double rho = unset, beta = unset, rho_scale = unset;
  std::string density_table;
  double h0 = unset, g = unset;
  // two-fluid
  std::string upper;
  double upper_gamma = unset;
  std::string upper_table;
  double rho_minus = unset, rho_plus = unset, sigma = unset;
  std::string lid;
};

struct SolverFlags {
  double rtol = 1e-10, atol = 1e-12, margin = 1e-8;
  int grid = 256;
  int scan = 64;
  bool strict = false;

  DispersionOptions dispersion() const {
    DispersionOptions d;
    d.solver.rtol = rtol;
    d.solver.atol = atol;
    d.solver.margin = margin;
    d.solver.grid_intervals = grid;
    d.solver.strict_no_critical_layer = strict;
    d.scan_points = scan;
    return d;
  }
};

struct Flags {
  EnvFlags env;
  SolverFlags solver;
  std::string format = "csv";
  std::string out;
  // k selection
  double k = unset, k_min = unset, k_max = unset;
  int count = 50;
  std::string spacing = "linear";
  // transfer / field
  double c = unset;
  std::string dump_mode;
  double amplitude = 1.0, phase = 0.0, t = 0.0;
  int nx = 64;
  // twofluid
  std::string layers;
  // synth / reconstruct
  std::vector<std::string> modes;
  double duration = 60.0, dt = 0.05, x_gauge = 0.0, rho_ref = unset;
  std::string gauge, meta, method = "spectral", modes_out, pressure_kind;
  double max_amplification = 100.0, recon_k_max = unset;
  int table_points = 64;
  bool detrend = false;
};

void add_env(CLI::App* app, EnvFlags& f) {
  app->add_option("--config", f.config,
                  "Environment JSON (relative paths also searched in $PTRANSFER_CONFIG_DIR)");
  app->add_option("--shear", f.shear, "Shear profile: zero|linear|piecewise|table")
      ->check(CLI::IsMember({"zero", "linear", "piecewise", "table"}));
  app->add_option("--gamma", f.gamma, "Linear shear rate (1/s); U = gamma (y - h0)");
  app->add_option("--gamma-minus", f.gamma_minus, "Piecewise shear rate below h1 (1/s)");
  app->add_option("--gamma-plus", f.gamma_plus, "Piecewise shear rate above h1 (1/s)");
  app->add_option("--h1", f.h1, "Piecewise breakpoint height (m)");
  app->add_option("--table", f.table, "CSV of (y, U) samples for --shear table");
  app->add_option("--h0", f.h0, "Undisturbed depth (m)");
  app->add_option("--g", f.g, "Gravity (m/s^2), default 9.81");
}

void add_density(CLI::App* app, EnvFlags& f) {
  app->add_option("--density", f.density, "Density profile: constant|exponential|table")
      ->check(CLI::IsMember({"constant", "exponential", "table"}));
  app->add_option("--rho", f.rho, "Constant density value");
  app->add_option("--beta", f.beta, "Exponential rate: R = scale exp(-2 beta y)");
  app->add_option("--rho-scale", f.rho_scale, "Exponential reference scale (default 1)");
  app->add_option("--density-table", f.density_table, "CSV of (y, R) samples");
}

void add_solver(CLI::App* app, SolverFlags& s) {
  app->add_option("--rtol", s.rtol, "Integrator relative tolerance")->capture_default_str();
  app->add_option("--atol", s.atol, "Integrator absolute tolerance")->capture_default_str();
  app->add_option("--margin", s.margin, "Relative critical-layer margin")->capture_default_str();
  app->add_option("--grid", s.grid, "Output intervals of sampled modes")->capture_default_str();
  app->add_option("--scan-points", s.scan, "Wave-speed scan resolution")->capture_default_str();
  app->add_flag("--strict-critical", s.strict,
                "Refuse every c <= max U, also for curvature-free currents");
}

void add_output(CLI::App* app, Flags& f) {
  app->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app->add_option("--out", f.out, "Output file (default: standard output)");
}

void add_k(CLI::App* app, Flags& f) {
  app->add_option("--k", f.k, "Wavenumber (1/m)");
  app->add_option("--k-min", f.k_min, "Smallest wavenumber of a sweep");
  app->add_option("--k-max", f.k_max, "Largest wavenumber of a sweep");
  app->add_option("--count", f.count, "Sweep size")->capture_default_str();
  app->add_option("--spacing", f.spacing, "Sweep spacing")
      ->check(CLI::IsMember({"linear", "log"}))
      ->capture_default_str();
}

std::string resolve_config(const std::string& path) {
  if (fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("PTRANSFER_CONFIG_DIR")) {
    const fs::path alt = fs::path(dir) / path;
    if (fs::exists(alt)) return alt.string();
  }
  return path;
}

json samples_json(const std::string& path) {
  json s = json::array();
  for (const auto& [y, v] : io::read_table_csv(path)) s.push_back({y, v});
  return s;
}

json shear_json(const std::string& kind, double gamma, double gm, double gp, double h1,
                const std::string& table, const char* flag_prefix) {
  const std::string pre = flag_prefix;
  if (kind == "zero") return {{"kind", "zero"}};
  if (kind == "linear") {
    if (!given(gamma)) usage("linear shear needs --" + pre + "gamma");
    return {{"kind", "linear"}, {"gamma", gamma}};
  }
  if (kind == "piecewise") {
    if (!given(gm) || !given(gp) || !given(h1))
      usage("piecewise shear needs --gamma-minus, --gamma-plus and --h1");
    return {{"kind", "piecewise"}, {"gamma_minus", gm}, {"gamma_plus", gp}, {"h1", h1}};
  }
  if (table.empty()) usage("table shear needs --" + pre + "table FILE");
  return {{"kind", "table"}, {"samples", samples_json(table)}};
}

json base_env_json(const EnvFlags& f) {
  json j = f.config.empty() ? json::object() : io::read_json_file(resolve_config(f.config));
  if (!j.is_object()) throw Error(Errc::format, "environment JSON must be an object");
  if (given(f.h0)) j["h0"] = f.h0;
  if (given(f.g)) j["g"] = f.g;
  std::string kind = f.shear;
  if (kind.empty() && given(f.gamma)) kind = "linear";
  if (kind.empty() && (given(f.gamma_minus) || given(f.gamma_plus))) kind = "piecewise";
  if (!kind.empty())
    j["shear"] = shear_json(kind, f.gamma, f.gamma_minus, f.gamma_plus, f.h1, f.table, "");
  else if (!j.contains("shear"))
    j["shear"] = {{"kind", "zero"}};
  if (!j.contains("h0")) usage("the depth is required (--h0 or \"h0\" in --config)");
  return j;
}

json env_json(const EnvFlags& f) {
  json j = base_env_json(f);
  if (!f.density.empty()) {
    if (f.density == "constant") {
      if (!given(f.rho)) usage("constant density needs --rho");
      j["density"] = {{"kind", "constant"}, {"value", f.rho}};
    } else if (f.density == "exponential") {
      if (!given(f.beta)) usage("exponential density needs --beta");
      j["density"] = {{"kind", "exponential"},
                      {"beta", f.beta},
                      {"scale", given(f.rho_scale) ? f.rho_scale : 1.0}};
    } else {
      if (f.density_table.empty()) usage("table density needs --density-table FILE");
      j["density"] = {{"kind", "table"}, {"samples", samples_json(f.density_table)}};
    }
  }
  return j;
}

json two_fluid_json(const EnvFlags& f) {
  json j = base_env_json(f);
  if (!f.upper.empty())
    j["upper"] = shear_json(f.upper, f.upper_gamma, unset, unset, unset, f.upper_table, "upper-");
  if (given(f.rho_minus)) j["rho_minus"] = f.rho_minus;
  if (given(f.rho_plus)) j["rho_plus"] = f.rho_plus;
  if (given(f.sigma)) j["sigma"] = f.sigma;
  if (!f.lid.empty()) {
    if (f.lid == "inf") {
      j["H"] = "inf";
    } else {
      double H = 0;
      std::istringstream in(f.lid);
      if (!(in >> H) || !in.eof()) usage("--H must be a number or 'inf'");
      j["H"] = H;
    }
  }
  if (!j.contains("rho_minus")) j["rho_minus"] = 1000.0;
  return j;
}

std::vector<double> k_values(const Flags& f) {
  if (given(f.k)) {
    if (given(f.k_min) || given(f.k_max)) usage("give either --k or --k-min/--k-max");
    if (!(f.k > 0)) usage("--k must be positive");
    return {f.k};
  }
  if (!given(f.k_min) || !given(f.k_max)) usage("give --k or both --k-min and --k-max");
  if (!(f.k_min > 0) || !(f.k_min <= f.k_max)) usage("need 0 < k_min <= k_max");
  if (f.count < 1) usage("--count must be at least 1");
  std::vector<double> ks;
  for (int i = 0; i < f.count; ++i) {
    const double s = f.count == 1 ? 0.0 : double(i) / (f.count - 1);
    ks.push_back(f.spacing == "log" ? f.k_min * std::pow(f.k_max / f.k_min, s)
                                    : f.k_min + (f.k_max - f.k_min) * s);
  }
  ks.back() = f.count == 1 ? f.k_min : f.k_max;
  return ks;
}

void common_meta(Report& r, const std::string& command, const json& canonical, double g,
                 const SolverFlags& s) {
  r.add_meta("tool", std::string("ptransfer ") + PTRANSFER_VERSION);
  r.add_meta("command", command);
  r.add_meta("profile_hash", io::content_hash(canonical));
  r.add_meta("environment", canonical.dump());
  r.add_meta("g", g);
  r.add_meta("rtol", s.rtol);
  r.add_meta("atol", s.atol);
  r.add_meta("margin", s.margin);
  r.add_meta("scan_points", s.scan);
  r.add_meta("root_tol", "1e-12*(1+|c|)");
}

struct Outcome {
  std::string stdout_text;
  std::vector<std::pair<std::string, std::string>> files;
};

void emit(Outcome& o, const Flags& f, const Report& r) {
  const Format fmt = f.format == "json" ? Format::json : Format::csv;
  if (f.out.empty())
    o.stdout_text += r.render(fmt);
  else
    o.files.emplace_back(f.out, r.render(fmt));
}

io::Environment load_env(const Flags& f) { return io::environment_from_json(env_json(f.env)); }

Outcome cmd_dispersion(const Flags& f) {
  const auto env = load_env(f);
  const auto ks = k_values(f);
  const auto opts = f.solver.dispersion();
  Report r;
  common_meta(r, "dispersion", env.canonical, env.g, f.solver);
  r.columns = {"k", "c", "residual", "roots"};
  for (const auto& d : dispersion_sweep(env.shear, env.density_ptr(), ks, env.g, opts))
    r.rows.push_back({d.k, d.c, d.residual, double(d.roots.size())});
  Outcome o;
  emit(o, f, r);
  return o;
}

Outcome cmd_burns(const Flags& f) {
  const auto env = load_env(f);
  Report r;
  common_meta(r, "burns", env.canonical, env.g, f.solver);
  r.add_meta("h0", env.h0);
  r.columns = {"c"};
  for (double c : burns_speed(env.shear, env.g)) r.rows.push_back({c});
  Outcome o;
  emit(o, f, r);
  return o;
}

struct SolvedMode {
  ModeSolution mode;
  TransferFunction tf;
  double residual;
};

SolvedMode solve_at(const io::Environment& env, const Flags& f, double k) {
  const auto opts = f.solver.dispersion();
  const auto* dens = env.density_ptr();
  const bool strat = dens && !dens->is_constant();
  double c = f.c, residual = unset;
  if (!given(c)) {
    const auto d = find_wave_speed(env.shear, dens, k, env.g, opts);
    c = d.c;
    residual = d.residual;
  } else {
    residual = strat ? bifurcation_residual(env.shear, *dens, c, k, env.g, opts.solver)
                     : bifurcation_residual(env.shear, c, k, env.g, opts.solver);
  }
  ModeSolution m = strat ? solve_mode_stratified(env.shear, *dens, c, k, env.g, opts.solver)
                         : solve_mode(env.shear, c, k, opts.solver);
  TransferFunction tf = transfer_from_mode(m, env.shear, strat ? dens : nullptr);
  return {std::move(m), std::move(tf), residual};
}

Outcome cmd_transfer(const Flags& f) {
  if (!given(f.k) || !(f.k > 0)) usage("transfer needs a positive --k");
  const auto env = load_env(f);
  const auto s = solve_at(env, f, f.k);
  const auto slopes = nonmonotonicity_profile(s.tf);
  Report r;
  common_meta(r, "transfer", env.canonical, env.g, f.solver);
  r.add_meta("k", f.k);
  r.add_meta("c", s.mode.c);
  r.add_meta("residual", num(s.residual));
  r.add_meta("T0", s.tf.T0);
  r.add_meta("gain", bed_gain(s.tf, env.g));
  r.add_meta("slope_sign_change", slope_changes_sign(slopes));
  r.columns = {"y", "T", "dT_dy", "slope_sign"};
  for (Eigen::Index i = 0; i < s.tf.y.size(); ++i) {
    const auto& sl = slopes[static_cast<std::size_t>(i)];
    r.rows.push_back({s.tf.y[i], s.tf.T[i], sl.dT, double(sl.sign)});
  }
  Outcome o;
  emit(o, f, r);
  if (!f.dump_mode.empty()) o.files.emplace_back(f.dump_mode, io::mode_to_json(s.mode).dump(1) + "\n");
  return o;
}

Outcome cmd_field(const Flags& f) {
  if (!given(f.k) || !(f.k > 0)) usage("field needs a positive --k");
  if (f.nx < 2) usage("--nx must be at least 2");
  if (!(f.amplitude >= 0)) usage("--amplitude must be non-negative");
  const auto env = load_env(f);
  const auto s = solve_at(env, f, f.k);
  FieldOptions fo;
  fo.amplitude = f.amplitude;
  fo.phase = f.phase;
  fo.t = f.t;
  fo.nx = f.nx;
  const auto* dens = env.density_ptr();
  const bool strat = s.mode.kind == ModeKind::stratified;
  const auto field = linear_field(s.mode, s.tf, env.shear, strat ? dens : nullptr, fo);
  Report r;
  common_meta(r, "field", env.canonical, env.g, f.solver);
  r.add_meta("k", f.k);
  r.add_meta("c", s.mode.c);
  r.add_meta("amplitude", f.amplitude);
  r.add_meta("phase", f.phase);
  r.add_meta("t", f.t);
  r.columns = {"x", "y", "u", "v", "p"};
  if (strat) r.columns.push_back("rho");
  for (Eigen::Index i = 0; i < field.y.size(); ++i)
    for (Eigen::Index j = 0; j < field.x.size(); ++j) {
      std::vector<json> row{field.x[j], field.y[i], field.u(i, j), field.v(i, j), field.p(i, j)};
      if (strat) row.emplace_back(field.rho(i, j));
      r.rows.push_back(std::move(row));
    }
  Outcome o;
  emit(o, f, r);
  return o;
}

Outcome cmd_twofluid(const Flags& f, std::ostream& err) {
  if (!f.env.density.empty()) usage("twofluid uses --rho-minus/--rho-plus, not --density");
  const auto cfg = io::two_fluid_from_json(two_fluid_json(f.env));
  const auto& env = cfg.env;
  for (const auto& w : env.warnings()) err << "warning: " << w << "\n";
  const auto ks = k_values(f);
  if (!f.layers.empty() && ks.size() != 1) usage("--layers needs a single --k");
  const auto opts = f.solver.dispersion();

  Report r;
  common_meta(r, "twofluid", cfg.canonical, env.g, f.solver);
  try {
    r.add_meta("generalized_burns_c", generalized_burns_speed(env));
  } catch (const Error& e) {
    if (e.code() != Errc::integrability) throw;
    r.add_meta("generalized_burns_c", "undefined (" + std::string(e.what()) + ")");
  }
  r.columns = {"k", "c", "residual", "T_minus_h0", "T_plus_h0"};
  Report layers;
  for (double k : ks) {
    const auto d = two_fluid_dispersion(env, k, opts);
    const auto modes = solve_two_layer_modes(env, d.c, k, opts.solver);
    const auto t = interface_transfer(env, modes);
    r.rows.push_back({k, d.c, d.residual, t.lower, t.upper});
    if (!f.layers.empty()) {
      common_meta(layers, "twofluid-layers", cfg.canonical, env.g, f.solver);
      layers.add_meta("k", k);
      layers.add_meta("c", d.c);
      if (env.unbounded()) layers.add_meta("y_trunc", modes.y_trunc);
      const auto [lo, up] = transfer_two_fluid(env, modes);
      layers.columns = {"layer", "y", "T"};
      for (Eigen::Index i = 0; i < lo.y.size(); ++i) layers.rows.push_back({"lower", lo.y[i], lo.T[i]});
      for (Eigen::Index i = 0; i < up.y.size(); ++i) layers.rows.push_back({"upper", up.y[i], up.T[i]});
    }
  }
  Outcome o;
  emit(o, f, r);
  if (!f.layers.empty())
    o.files.emplace_back(f.layers, layers.render(f.format == "json" ? Format::json : Format::csv));
  return o;
}

std::vector<SynthMode> parse_modes(const std::vector<std::string>& specs) {
  std::vector<SynthMode> out;
  for (const auto& s : specs) {
    std::istringstream in(s);
    SynthMode m{0, 0, 0};
    char c1 = 0, c2 = 0;
    in >> m.k >> c1 >> m.amplitude;
    if (!in || c1 != ',') usage("--mode expects k,amplitude[,phase], got '" + s + "'");
    if (in >> c2) {
      if (c2 != ',' || !(in >> m.phase)) usage("--mode expects k,amplitude[,phase], got '" + s + "'");
    }
    in >> std::ws;
    if (!in.eof()) usage("--mode expects k,amplitude[,phase], got '" + s + "'");
    out.push_back(m);
  }
  return out;
}

Outcome cmd_synth(const Flags& f) {
  if (f.out.empty()) usage("synth needs --out FILE for the gauge CSV");
  const auto modes = parse_modes(f.modes);
  const auto env = load_env(f);
  SynthOptions so;
  so.duration = f.duration;
  so.dt = f.dt;
  so.x_gauge = f.x_gauge;
  so.rho_ref = given(f.rho_ref) ? f.rho_ref : 1000.0;
  so.g = env.g;
  so.dispersion = f.solver.dispersion();
  const auto res = synthesize_record(modes, env.shear, env.density_ptr(), so);

  Report r;
  common_meta(r, "synth", env.canonical, env.g, f.solver);
  r.add_meta("rho_ref", so.rho_ref);
  r.add_meta("x_gauge", so.x_gauge);
  r.add_meta("duration", res.duration);
  r.add_meta("dt", res.record.dt());
  r.add_meta("samples", double(res.record.size()));
  r.columns = {"k", "amplitude", "phase", "c", "omega", "T0", "periods_in_record"};
  for (std::size_t i = 0; i < modes.size(); ++i)
    r.rows.push_back({modes[i].k, modes[i].amplitude, modes[i].phase, res.modes[i].c,
                      res.modes[i].omega, res.modes[i].T0, res.periods_in_record[i]});

  Outcome o;
  // The summary goes to standard output; the gauge file carries the metadata block.
  o.stdout_text = r.render(f.format == "json" ? Format::json : Format::csv);
  std::string gauge;
  for (const auto& [k, v] : r.meta) gauge += "# " + k + "=" + Report::cell(v) + "\n";
  gauge += io::gauge_csv(res.record);
  o.files.emplace_back(f.out, gauge);
  o.files.emplace_back(io::sidecar_path(f.out), io::gauge_meta_json(res.record.meta).dump(1) + "\n");
  return o;
}

Outcome cmd_reconstruct(const Flags& f) {
  if (f.gauge.empty()) usage("reconstruct needs --gauge FILE");
  if (!(f.max_amplification > 0)) usage("--max-amplification must be positive");
  GaugeMeta defaults;
  defaults.rho_ref = given(f.rho_ref) ? f.rho_ref : 1000.0;
  defaults.g = given(f.env.g) ? f.env.g : 9.81;
  defaults.h0 = given(f.env.h0) ? f.env.h0 : 1.0;
  defaults.kind = f.pressure_kind.empty() ? PressureKind::dynamic
                                          : pressure_kind_from_string(f.pressure_kind);
  const std::optional<std::string> meta =
      f.meta.empty() ? std::nullopt : std::optional<std::string>(f.meta);
  GaugeRecord rec = io::read_gauge(f.gauge, meta, defaults);

  // The record's metadata fills in what the command line leaves open.
  EnvFlags ef = f.env;
  json base = ef.config.empty() ? json::object() : io::read_json_file(resolve_config(ef.config));
  if (!given(ef.h0) && !base.contains("h0")) ef.h0 = rec.meta.h0;
  if (!given(ef.g) && !base.contains("g")) ef.g = rec.meta.g;
  const auto env = io::environment_from_json(env_json(ef));
  if (std::abs(env.g - rec.meta.g) > 1e-12 * env.g)
    throw Error(Errc::consistency, "gauge metadata g differs from the environment g");
  if (std::abs(env.h0 - rec.meta.h0) > 1e-9 * env.h0)
    throw Error(Errc::consistency, "gauge metadata h0 differs from the environment h0");

  PreprocessOptions pre;
  pre.detrend = f.detrend;
  ReconstructionResult res;
  if (f.method == "hydrostatic") {
    res = reconstruct_hydrostatic(rec, pre);
  } else {
    ReconstructOptions ro;
    ro.max_amplification = f.max_amplification;
    if (given(f.recon_k_max)) ro.k_max = f.recon_k_max;
    ro.table_points = f.table_points;
    ro.dispersion = f.solver.dispersion();
    ro.preprocess = pre;
    res = reconstruct_spectral(rec, env.shear, env.density_ptr(), ro);
  }

  Report r;
  common_meta(r, "reconstruct", env.canonical, env.g, f.solver);
  r.add_meta("method", f.method);
  r.add_meta("max_amplification", f.max_amplification);
  r.add_meta("rho_ref", rec.meta.rho_ref);
  r.add_meta("pressure_kind", to_string(rec.meta.kind));
  r.add_meta("detrend", f.detrend);
  r.columns = {"t", "eta"};
  for (Eigen::Index i = 0; i < res.t.size(); ++i) r.rows.push_back({res.t[i], res.eta[i]});

  Outcome o;
  emit(o, f, r);
  if (!f.modes_out.empty()) {
    Report m;
    common_meta(m, "reconstruct-modes", env.canonical, env.g, f.solver);
    m.add_meta("max_amplification", f.max_amplification);
    m.columns = {"omega", "k", "gain", "kept", "amplitude", "psi"};
    for (const auto& g : res.per_mode)
      m.rows.push_back({g.omega, num(g.k), num(g.gain), g.kept, g.amplitude, g.psi});
    o.files.emplace_back(f.modes_out, m.render(f.format == "json" ? Format::json : Format::csv));
  }
  return o;
}

Outcome cmd_stagnation(const Flags& f) {
  if (!given(f.env.gamma) || !given(f.k) || !given(f.env.h0))
    usage("stagnation needs --gamma, --k and --h0");
  const double g = given(f.env.g) ? f.env.g : 9.81;
  const auto s = stagnation_condition(f.env.gamma, f.k, f.env.h0, g);
  Report r;
  const json canonical = {{"gamma", f.env.gamma}, {"k", f.k}, {"h0", f.env.h0}, {"g", g}};
  r.add_meta("tool", std::string("ptransfer ") + PTRANSFER_VERSION);
  r.add_meta("command", "stagnation");
  r.add_meta("profile_hash", io::content_hash(canonical));
  r.add_meta("g", g);
  r.columns = {"gamma", "k", "h0", "stagnation", "threshold", "gamma_squared"};
  r.rows.push_back({f.env.gamma, f.k, f.env.h0, s.stagnation, s.threshold, f.env.gamma * f.env.gamma});
  Outcome o;
  emit(o, f, r);
  return o;
}

void write_outputs(const Outcome& o, std::ostream& out) {
  for (const auto& [path, text] : o.files) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(Errc::invalid_argument, "cannot write '" + path + "'");
    file << text;
    if (!file) throw Error(Errc::invalid_argument, "failed writing '" + path + "'");
  }
  out << o.stdout_text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pressure transfer functions for linear waves over shear currents"};
  app.set_version_flag("--version", std::string("ptransfer ") + PTRANSFER_VERSION);
  app.require_subcommand(1);
  Flags f;

  auto* disp = app.add_subcommand("dispersion", "Wave speed c(k) from the bifurcation condition");
  add_env(disp, f.env);
  add_density(disp, f.env);
  add_k(disp, f);

  auto* burns = app.add_subcommand("burns", "Long-wave speed from the Burns condition");
  add_env(burns, f.env);

  auto* transfer = app.add_subcommand("transfer", "Pressure transfer function T(y) and bed gain");
  add_env(transfer, f.env);
  add_density(transfer, f.env);
  transfer->add_option("--k", f.k, "Wavenumber (1/m)")->required();
  transfer->add_option("--c", f.c, "Wave speed; default: the dispersion root");
  transfer->add_option("--dump-mode", f.dump_mode, "Write the solved mode as JSON");

  auto* field = app.add_subcommand("field", "Linear wave field (u, v, p[, rho]) over one wavelength");
  add_env(field, f.env);
  add_density(field, f.env);
  field->add_option("--k", f.k, "Wavenumber (1/m)")->required();
  field->add_option("--c", f.c, "Wave speed; default: the dispersion root");
  field->add_option("--amplitude", f.amplitude, "Surface amplitude (m)")->capture_default_str();
  field->add_option("--phase", f.phase, "Phase (rad)")->capture_default_str();
  field->add_option("--t", f.t, "Time (s)")->capture_default_str();
  field->add_option("--nx", f.nx, "Samples across one wavelength")->capture_default_str();

  auto* two = app.add_subcommand("twofluid", "Two-layer dispersion root and interface transfer");
  add_env(two, f.env);
  add_k(two, f);
  two->add_option("--upper", f.env.upper, "Upper-layer shear: zero|linear|table")
      ->check(CLI::IsMember({"zero", "linear", "table"}));
  two->add_option("--upper-gamma", f.env.upper_gamma, "Upper linear shear rate (1/s)");
  two->add_option("--upper-table", f.env.upper_table, "CSV of upper-layer (y, U) samples");
  two->add_option("--rho-minus", f.env.rho_minus, "Lower-layer density");
  two->add_option("--rho-plus", f.env.rho_plus, "Upper-layer density");
  two->add_option("--sigma", f.env.sigma, "Interfacial tension (N/m)");
  two->add_option("--H", f.env.lid, "Lid height (m) or 'inf'");
  two->add_option("--layers", f.layers, "Write per-layer T(y) for a single --k");

  auto* synth = app.add_subcommand("synth", "Synthesize a bed-pressure gauge record");
  add_env(synth, f.env);
  add_density(synth, f.env);
  synth->add_option("--mode", f.modes, "Mode k,amplitude[,phase] (repeatable)");
  synth->add_option("--duration", f.duration, "Minimum record length (s)")->capture_default_str();
  synth->add_option("--dt", f.dt, "Sampling interval (s)")->capture_default_str();
  synth->add_option("--x-gauge", f.x_gauge, "Gauge position (m)")->capture_default_str();
  synth->add_option("--rho-ref", f.rho_ref, "Reference density (default 1000)");

  auto* recon = app.add_subcommand("reconstruct", "Surface elevation from a bed-pressure record");
  add_env(recon, f.env);
  add_density(recon, f.env);
  recon->add_option("--gauge", f.gauge, "Gauge CSV with header t,p")->required();
  recon->add_option("--meta", f.meta, "Gauge metadata JSON (default: the CSV's .json sidecar)");
  recon->add_option("--method", f.method, "Inversion method")
      ->check(CLI::IsMember({"spectral", "hydrostatic"}))
      ->capture_default_str();
  recon->add_option("--max-amplification", f.max_amplification, "Cap on |gain| g")
      ->capture_default_str();
  recon->add_option("--k-max", f.recon_k_max, "Largest wavenumber considered (default 40/h0)");
  recon->add_option("--table-points", f.table_points, "omega(k) table size")->capture_default_str();
  recon->add_option("--rho-ref", f.rho_ref, "Reference density when there is no sidecar");
  recon->add_option("--pressure-kind", f.pressure_kind, "absolute|dynamic|kinematic (no sidecar)")
      ->check(CLI::IsMember({"absolute", "dynamic", "kinematic"}));
  recon->add_flag("--detrend", f.detrend, "Remove a least-squares line after the mean");
  recon->add_option("--modes", f.modes_out, "Write per-bin gains to this CSV");

  auto* stag = app.add_subcommand("stagnation", "Stagnation criterion for constant vorticity");
  stag->add_option("--gamma", f.env.gamma, "Shear rate (1/s)")->required();
  stag->add_option("--k", f.k, "Wavenumber (1/m)")->required();
  stag->add_option("--h0", f.env.h0, "Depth (m)")->required();
  stag->add_option("--g", f.env.g, "Gravity (m/s^2), default 9.81");

  for (auto* sub : {disp, burns, transfer, field, two, synth, recon, stag}) {
    add_output(sub, f);
    if (sub != stag) add_solver(sub, f.solver);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Outcome o;
    if (*disp) o = cmd_dispersion(f);
    else if (*burns) o = cmd_burns(f);
    else if (*transfer) o = cmd_transfer(f);
    else if (*field) o = cmd_field(f);
    else if (*two) o = cmd_twofluid(f, err);
    else if (*synth) o = cmd_synth(f);
    else if (*recon) o = cmd_reconstruct(f);
    else o = cmd_stagnation(f);
    write_outputs(o, out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_usage() ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"ptransfer"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ptransfer::cli
