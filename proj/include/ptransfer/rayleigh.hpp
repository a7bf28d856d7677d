#pragma once

// Shooting solvers for the Rayleigh boundary-value problem
//
//   (U - c)(phi'' - k^2 phi) - U'' phi = 0,   phi(0) = 0,  phi(h0) = k (c - U(h0)),
//
// its distributional form for piecewise-constant vorticity, and the
// stratified (Taylor-Goldstein type) form written for varphi = phi / (c - U):
//
//   (R (c - U)^2 varphi')' = (k^2 (c - U)^2 R + g R') varphi,  varphi(0) = 0, varphi(h0) = k.
//
// Each problem is a linear second-order ODE, so one initial-value shot from
// the bed with unit slope, rescaled to meet the surface normalization, gives
// the unique mode.

#include <Eigen/Core>

#include <vector>

#include "ptransfer/profiles.hpp"

namespace ptransfer {

enum class ModeKind { homogeneous, stratified };

/// phi' is one-sided where U' jumps. The sample at such a node holds the
/// limit from below; the limit from above is kept here.
struct SlopeJump {
  double y;
  Eigen::Index index;
  double phi_prime_above;
};

struct ModeSolution {
  Eigen::VectorXd y;
  Eigen::VectorXd phi;
  Eigen::VectorXd phi_prime;
  // stratified only: varphi = phi / (c - U)
  Eigen::VectorXd varphi;
  Eigen::VectorXd varphi_prime;
  double c = 0;
  double k = 0;
  ModeKind kind = ModeKind::homogeneous;
  std::vector<SlopeJump> jumps;

  Eigen::Index size() const { return y.size(); }
};

struct SolverOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 1'000'000;
  /// Uniform output intervals; breakpoints are added as extra nodes.
  int grid_intervals = 256;
  /// Initial slope of the shot. Any nonzero value yields the same mode.
  double seed_slope = 1.0;
  /// Relative critical-layer margin: c must clear U by margin * (1 + |c|).
  double margin = 1e-8;
  /// Refuse every c <= max U, even for profiles whose Rayleigh coefficient
  /// stays regular at U = c (zero, linear, piecewise-linear).
  bool strict_no_critical_layer = false;

  double margin_for(double c) const;
};

/// Nodes used for sampled modes: uniform on [bottom, top] plus breakpoints.
Eigen::VectorXd mode_grid(double bottom, double top, const std::vector<double>& breakpoints,
                          int intervals);

/// Raises Errc::critical_layer unless the Rayleigh problem is regular at c.
void check_wave_speed(const ShearProfile& shear, double c, const SolverOptions& opts = {});

ModeSolution solve_mode(const ShearProfile& shear, double c, double k,
                        const SolverOptions& opts = {});

/// Same as solve_mode but insists on a piecewise-linear profile.
ModeSolution solve_mode_piecewise(const ShearProfile& shear, double c, double k,
                                  const SolverOptions& opts = {});

ModeSolution solve_mode_stratified(const ShearProfile& shear, const DensityProfile& dens,
                                   double c, double k, double g, const SolverOptions& opts = {});

/// Normalized residual of the surface condition for the unit-slope shot;
/// zero exactly at a bifurcation point (c, k).
double bifurcation_residual(const ShearProfile& shear, double c, double k, double g,
                            const SolverOptions& opts = {});

/// Stratified analogue, from p = g R eta at the surface. Constant density
/// falls back to the homogeneous residual.
double bifurcation_residual(const ShearProfile& shear, const DensityProfile& dens, double c,
                            double k, double g, const SolverOptions& opts = {});

namespace detail {

/// End state of an unscaled homogeneous shot.
struct ShotEnd {
  double phi;
  double phi_prime;
};

/// Shoots the homogeneous Rayleigh equation across [from, to] (either
/// direction) starting from (phi0, dphi0), applying slope jumps at
/// breakpoints. `extended` continues the profile as a constant above its
/// top. Samples land on `stations` (ordered from -> to) when given.
ShotEnd shoot_rayleigh(const ShearProfile& shear, double c, double k, double from, double to,
                       double phi0, double dphi0, const SolverOptions& opts, bool extended,
                       const Eigen::VectorXd* stations, ModeSolution* out);

}  // namespace detail

}  // namespace ptransfer
