#pragma once

// Wave speeds: bifurcation roots c(k), the closed forms for uniform and
// constant-vorticity currents, long-wave (Burns) speeds and the two-fluid
// dispersion relation.

#include <optional>
#include <utility>
#include <vector>

#include "ptransfer/profiles.hpp"
#include "ptransfer/rayleigh.hpp"
#include "ptransfer/twofluid.hpp"

namespace ptransfer {

struct DispersionResult {
  double c = 0;
  double k = 0;
  double residual = 0;
  std::pair<double, double> bracket{0, 0};
  int iterations = 0;
  /// Every root located by the scan, ascending; c is the largest.
  std::vector<double> roots;
};

struct DispersionOptions {
  SolverOptions solver;
  /// Initial uniform scan; the spacing is halved (up to four times) until
  /// the located roots stop changing.
  int scan_points = 64;
  /// Overrides the scan; the residual must change sign on it.
  std::optional<std::pair<double, double>> bracket_hint;
  /// Overrides max U + 10 sqrt(g h0).
  std::optional<double> c_upper;
  /// Brent-converged sign changes with a larger residual are poles, not roots.
  double accept_residual = 1e-6;
};

/// Largest bifurcation root of the homogeneous (dens == nullptr or constant)
/// or stratified problem.
DispersionResult find_wave_speed(const ShearProfile& shear, const DensityProfile* dens, double k,
                                 double g, const DispersionOptions& opts = {});

/// c(k) and residuals along a k sweep; failures propagate.
std::vector<DispersionResult> dispersion_sweep(const ShearProfile& shear,
                                               const DensityProfile* dens,
                                               const std::vector<double>& ks, double g,
                                               const DispersionOptions& opts = {});

/// c^2 = g tanh(k h0) / k
double closed_form_c_zero(double k, double h0, double g);

/// Positive root of c^2 + (gamma tanh(k h0) / k) c - g tanh(k h0) / k = 0
/// for U = gamma (y - h0).
double closed_form_c_const_vorticity(double gamma, double k, double h0, double g);

struct StagnationResult {
  bool stagnation;
  /// g tanh(k h0) / (k h0^2 - h0 tanh(k h0))
  double threshold;
};

/// gamma < 0 and gamma^2 > threshold: the linear wave over U = gamma (y - h0)
/// carries an interior stagnation point.
StagnationResult stagnation_condition(double gamma, double k, double h0, double g);

/// Roots c > max U of  int_0^h0 dy / (U - c)^2 = 1/g.
std::vector<double> burns_speed(const ShearProfile& shear, double g);

/// Root c > max U of
///   w+ int_{h0}^{H} dy / (U+ - c)^2 + w- int_0^{h0} dy / (U- - c)^2 = 1
/// with the layer weights taken as given.
double generalized_burns_speed(const ShearProfile& lower, const ShearProfile& upper,
                               double w_minus, double w_plus, bool unbounded_upper);

/// Same with weights w- = g, w+ = g rho+ / rho-, so rho+ = 0 gives the
/// single-fluid Burns speed.
double generalized_burns_speed(const TwoFluidEnv& env);

/// Largest root of the two-fluid dispersion residual.
DispersionResult two_fluid_dispersion(const TwoFluidEnv& env, double k,
                                      const DispersionOptions& opts = {});

}  // namespace ptransfer
