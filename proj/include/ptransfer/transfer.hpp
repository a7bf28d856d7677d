#pragma once

// Pressure transfer functions p = T(y) eta for a solved mode, the bed gain
// 1/T(0), and the full linear wave field.

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "ptransfer/profiles.hpp"
#include "ptransfer/rayleigh.hpp"
#include "ptransfer/twofluid.hpp"

namespace ptransfer {

enum class TransferKind { homogeneous, stratified, two_fluid_lower, two_fluid_upper };

struct TransferFunction {
  Eigen::VectorXd y;
  Eigen::VectorXd T;
  /// T at the lowest grid node: the bed for single fluids and the lower layer,
  /// the interface for the upper layer.
  double T0 = 0;
  double c = 0;
  double k = 0;
  TransferKind kind = TransferKind::homogeneous;
  /// (node index, T from above) at slope discontinuities.
  std::vector<std::pair<Eigen::Index, double>> jumps;
};

/// Homogeneous: T = ((c - U) phi' + U' phi) / k.
/// Stratified:  T = R (c - U)^2 varphi' / k  (needs the density).
TransferFunction transfer_from_mode(const ModeSolution& mode, const ShearProfile& shear,
                                    const DensityProfile* dens = nullptr);

/// Per-density layer transfer functions
///   T(y) = (c - U(h0)) ((c - U) phi' + U' phi) / k.
std::pair<TransferFunction, TransferFunction> transfer_two_fluid(const TwoFluidEnv& env,
                                                                 const TwoLayerModes& modes);

/// 1/T(0). Throws Errc::ill_conditioned when |T(0)| < 1e-14 g.
double bed_gain(const TransferFunction& tf, double g);

struct SlopeSample {
  double y;
  double dT;
  int sign;  // -1, 0, +1; zero when |dT| is at round-off level
};

/// dT/dy from five-point finite differences on the (possibly non-uniform) grid.
std::vector<SlopeSample> nonmonotonicity_profile(const TransferFunction& tf);

/// True when dT/dy takes both signs strictly inside the layer.
bool slope_changes_sign(const std::vector<SlopeSample>& slopes);

struct FieldOptions {
  double amplitude = 1.0;
  double phase = 0.0;
  double t = 0.0;
  /// Points across one wavelength [0, 2 pi / k).
  int nx = 64;
};

/// u = (a s / k) phi' cos(theta), v = a s phi sin(theta), p = a T cos(theta) and,
/// when stratified, rho = -a R' phi cos(theta) / (k (c - U)), with
/// theta = k (x - c t) + phase. `s` is 1 for single fluids and c - U(h0) for a
/// two-fluid layer. Matrices are indexed (y, x).
struct LinearField {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd u, v, p, rho;
};

LinearField linear_field(const ModeSolution& mode, const TransferFunction& tf,
                         const ShearProfile& shear, const DensityProfile* dens,
                         const FieldOptions& opts, double mode_scale = 1.0);

}  // namespace ptransfer
