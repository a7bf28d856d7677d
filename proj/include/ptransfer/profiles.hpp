#pragma once

// Background shear currents U(y) and density stratifications R(y).
//
// All quantities are SI. A profile lives on a vertical interval
// [bottom, top]; for a single fluid that is [0, h0].

#include <Eigen/Core>

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "ptransfer/numerics/spline.hpp"

namespace ptransfer {

using Sample = std::pair<double, double>;

namespace shear {
struct Zero {};
/// U(y) = u_ref + gamma (y - y_ref). Without an explicit reference the
/// profile is anchored at the top of its interval with U(top) = 0.
struct Linear {
  double gamma = 0;
  std::optional<double> y_ref;
  double u_ref = 0;
};
/// Two constant-vorticity layers joined at h1:
/// U = gamma_minus (y - h0) below h1, continued with slope gamma_plus above.
struct PiecewiseLinear {
  double gamma_minus = 0;
  double gamma_plus = 0;
  double h1 = 0;
};
struct Tabulated {
  std::vector<Sample> samples;  // (y, U)
};
}  // namespace shear

/// Side selector for one-sided derivatives at a slope discontinuity.
enum class Side { unspecified, below, above };

struct ShearDerivs {
  double dU;
  double d2U;
};

class ShearProfile {
public:
  using Kind = std::variant<shear::Zero, shear::Linear, shear::PiecewiseLinear, shear::Tabulated>;

  /// Profile on [0, h0].
  ShearProfile(Kind kind, double h0);
  /// Profile on [bottom, top], used for the upper layer of a two-fluid setup.
  ShearProfile(Kind kind, double bottom, double top);

  static ShearProfile zero(double h0) { return {shear::Zero{}, h0}; }
  static ShearProfile linear(double gamma, double h0) { return {shear::Linear{gamma, {}, 0}, h0}; }
  static ShearProfile piecewise(double gamma_minus, double gamma_plus, double h1, double h0) {
    return {shear::PiecewiseLinear{gamma_minus, gamma_plus, h1}, h0};
  }
  static ShearProfile tabulated(std::vector<Sample> samples, double h0) {
    return {shear::Tabulated{std::move(samples)}, h0};
  }

  const Kind& kind() const { return kind_; }
  double bottom() const { return bottom_; }
  double top() const { return top_; }
  double depth() const { return top_ - bottom_; }

  double U(double y) const;
  /// U' and U''. At a slope discontinuity a side must be requested;
  /// U'' excludes the Dirac mass there (the solvers apply the jump).
  ShearDerivs derivs(double y, Side side = Side::unspecified) const;

  double max_U() const { return max_.second; }
  double argmax_U() const { return max_.first; }
  double min_U() const;

  /// Interior points where U' jumps.
  std::vector<double> breakpoints() const;
  /// True when U'' vanishes away from breakpoints, so U = c makes no
  /// coefficient of the Rayleigh equation singular.
  bool curvature_free() const;

  /// U(y) for y above top(), continued as the constant U(top()). Used for
  /// an unbounded upper layer.
  double U_extended(double y) const { return y > top_ ? U(top_) : U(y); }
  ShearDerivs derivs_extended(double y) const {
    return y > top_ ? ShearDerivs{0.0, 0.0} : derivs(y, Side::below);
  }

private:
  void check_domain(double y) const;

  Kind kind_;
  double bottom_, top_;
  numerics::NaturalCubicSpline<double> spline_;
  std::pair<double, double> max_;
};

namespace density {
struct Constant {
  double value = 1.0;
};
/// R(y) = scale * exp(-2 beta y)
struct Exponential {
  double beta = 0;
  double scale = 1.0;
};
struct Tabulated {
  std::vector<Sample> samples;  // (y, R)
};
}  // namespace density

class DensityProfile {
public:
  using Kind = std::variant<density::Constant, density::Exponential, density::Tabulated>;

  DensityProfile(Kind kind, double h0);

  static DensityProfile constant(double value, double h0) { return {density::Constant{value}, h0}; }
  static DensityProfile exponential(double beta, double h0, double scale = 1.0) {
    return {density::Exponential{beta, scale}, h0};
  }

  const Kind& kind() const { return kind_; }
  double h0() const { return h0_; }
  bool is_constant() const { return std::holds_alternative<density::Constant>(kind_); }

  double R(double y) const;
  double dR(double y) const;

private:
  void check_domain(double y) const;

  Kind kind_;
  double h0_;
  numerics::NaturalCubicSpline<double> spline_;
};

}  // namespace ptransfer
