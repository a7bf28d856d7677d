#pragma once

// Surface elevation at a bed pressure gauge: spectral inversion through the
// per-wavenumber bed gain 1/T_k(0), the hydrostatic rule eta = p/g, and a
// forward synthesizer for round trips.
//
// A stationary gauge at x_g sees theta = k x_g - omega t, so each temporal
// frequency omega maps to the wavenumber solving omega = k c(k).

#include <Eigen/Core>

#include <limits>
#include <optional>
#include <vector>

#include "ptransfer/dispersion.hpp"
#include "ptransfer/profiles.hpp"

namespace ptransfer {

/// absolute: Pa including atmosphere and hydrostatic head.
/// dynamic:  Pa, deviation from the background.
/// kinematic: dynamic pressure divided by the reference density (m^2/s^2).
enum class PressureKind { absolute, dynamic, kinematic };

const char* to_string(PressureKind kind);
PressureKind pressure_kind_from_string(const std::string& s);

struct GaugeMeta {
  double rho_ref = 1.0;
  double h0 = 1.0;
  double g = 9.81;
  PressureKind kind = PressureKind::dynamic;
};

struct GaugeRecord {
  Eigen::VectorXd t;
  Eigen::VectorXd p;
  GaugeMeta meta;

  Eigen::Index size() const { return t.size(); }
  double dt() const { return t.size() > 1 ? (t[t.size() - 1] - t[0]) / double(t.size() - 1) : 0; }
  /// Length >= 16, finite values, uniform spacing within 1e-9 dt.
  void validate() const;
};

struct PreprocessOptions {
  /// Remove a least-squares line after the mean. It biases sinusoids sampled
  /// over whole periods, so it is off unless asked for.
  bool detrend = false;
};

/// Converts to kinematic pressure: absolute records lose their mean, then
/// everything is divided by rho_ref.
GaugeRecord preprocess(const GaugeRecord& record, const PreprocessOptions& opts = {});

enum class ReconstructMethod { spectral, hydrostatic };

struct ModeGain {
  double omega;  // rad/s
  double k;      // 1/m, NaN when no wavenumber was found
  double gain;   // m per (m^2/s^2)
  bool kept;
  /// Recovered elevation component A cos(omega t + psi) at this bin.
  double amplitude;
  double psi;
};

struct ReconstructionResult {
  Eigen::VectorXd t;
  Eigen::VectorXd eta;
  std::vector<ModeGain> per_mode;
  ReconstructMethod method = ReconstructMethod::spectral;
  double max_amplification = 0;
};

/// eta = p / g on the kinematic record. Independent of the current.
ReconstructionResult reconstruct_hydrostatic(const GaugeRecord& record,
                                             const PreprocessOptions& pre = {});

struct ReconstructOptions {
  /// Modes with |gain| g above this are zeroed.
  double max_amplification = 100.0;
  /// Largest wavenumber considered; defaults to 40 / h0.
  std::optional<double> k_max;
  /// Log-spaced nodes of the omega(k) table used for bracketing.
  int table_points = 64;
  DispersionOptions dispersion;
  PreprocessOptions preprocess;
};

ReconstructionResult reconstruct_spectral(const GaugeRecord& record, const ShearProfile& shear,
                                          const DensityProfile* dens,
                                          const ReconstructOptions& opts = {});

/// Per-wavenumber quantities of the forward model.
struct ModeResponse {
  double k;
  double c;
  double omega;
  double T0;
};
ModeResponse mode_response(const ShearProfile& shear, const DensityProfile* dens, double k,
                           double g, const DispersionOptions& opts = {});

struct SynthMode {
  double k;
  double amplitude;  // m
  double phase;      // rad
};

struct SynthOptions {
  double duration = 60.0;
  double dt = 0.05;
  double x_gauge = 0.0;
  double rho_ref = 1.0;
  double g = 9.81;
  DispersionOptions dispersion;
};

struct SynthResult {
  GaugeRecord record;
  std::vector<ModeResponse> modes;
  /// Whole periods of each mode in the final duration (fractional when the
  /// modes are incommensurate).
  std::vector<double> periods_in_record;
  double duration;
};

/// p(t) = rho_ref sum a T_k(0) cos(k x_g - omega t + phase), a dynamic record.
/// The duration is raised to a whole number of periods of the longest mode
/// and dt is shrunk slightly so the samples tile it exactly.
SynthResult synthesize_record(const std::vector<SynthMode>& modes, const ShearProfile& shear,
                              const DensityProfile* dens, const SynthOptions& opts);

}  // namespace ptransfer
