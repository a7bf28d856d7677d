#pragma once

// Two immiscible constant-density layers between a flat bed at y = 0 and a
// rigid lid at y = H (possibly H = infinity), with surface tension on the
// interface y = h0.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ptransfer/profiles.hpp"
#include "ptransfer/rayleigh.hpp"

namespace ptransfer {

struct TwoFluidEnv {
  ShearProfile lower;  // on [0, h0]
  /// On [h0, H]. For an unbounded upper layer the profile covers [h0, y*]
  /// and is continued as the constant U(y*) above.
  ShearProfile upper;
  double rho_minus = 1000.0;
  double rho_plus = 0.0;
  double h0 = 1.0;
  double H = std::numeric_limits<double>::infinity();
  double sigma = 0.0;
  double g = 9.81;

  bool unbounded() const { return std::isinf(H); }
  /// Throws on any violated invariant.
  void validate() const;
  /// Non-fatal remarks, e.g. a heavier upper layer.
  std::vector<std::string> warnings() const;
};

struct TwoLayerModes {
  ModeSolution lower;
  ModeSolution upper;
  /// Height where the decaying far-field closure is imposed (H = infinity only).
  double y_trunc = std::numeric_limits<double>::quiet_NaN();
};

/// y_trunc = max(h0 + max(10/k, 5 h0), y*) for an unbounded upper layer.
double truncation_height(const TwoFluidEnv& env, double k);

/// Modes normalized to phi(h0) = k in both layers. `y_trunc` overrides the
/// default truncation height when H is infinite.
TwoLayerModes solve_two_layer_modes(const TwoFluidEnv& env, double c, double k,
                                    const SolverOptions& opts = {},
                                    std::optional<double> y_trunc = std::nullopt);

/// Per-density interface pressures T-(h0), T+(h0).
struct InterfaceTransfer {
  double lower;
  double upper;
};
InterfaceTransfer interface_transfer(const TwoFluidEnv& env, const TwoLayerModes& modes);

/// Normalized residual of
///   (R+ - R-) g - k^2 sigma - [R+ T+(h0) - R- T-(h0)].
double two_fluid_residual(const TwoFluidEnv& env, double c, double k,
                          const SolverOptions& opts = {});

/// Interface elevation from the depth-independent long-wave pressures:
///   p- - (rho+/rho-) p+ = (1 - rho+/rho-) g eta.
/// With H infinite p+ is taken to be zero.
double interface_hydrostatic(double p_bed_minus, double p_lid_plus, const TwoFluidEnv& env);

}  // namespace ptransfer
