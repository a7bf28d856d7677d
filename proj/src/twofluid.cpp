#include "ptransfer/twofluid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ptransfer {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

void check_layer(const ShearProfile& shear, double c, const SolverOptions& opts, const char* name) {
  if (!std::isfinite(c)) throw Error(Errc::invalid_argument, "wave speed must be finite");
  if ((opts.strict_no_critical_layer || !shear.curvature_free()) &&
      c <= shear.max_U() + opts.margin_for(c)) {
    std::ostringstream os;
    os << "c = " << c << " does not exceed max U = " << shear.max_U() << " in the " << name
       << " layer";
    throw Error(Errc::critical_layer, os.str());
  }
}

ModeSolution shoot_layer(const ShearProfile& shear, double c, double k, double lo, double hi,
                         bool downward, double phi0, double dphi0, bool extended,
                         const SolverOptions& opts) {
  ModeSolution m;
  m.c = c;
  m.k = k;
  m.kind = ModeKind::homogeneous;
  m.y = mode_grid(lo, hi, shear.breakpoints(), opts.grid_intervals);
  m.phi.resize(m.y.size());
  m.phi_prime.resize(m.y.size());
  const double from = downward ? hi : lo;
  const double to = downward ? lo : hi;
  const auto end = detail::shoot_rayleigh(shear, c, k, from, to, phi0, dphi0, opts, extended,
                                          &m.y, &m);
  if (end.phi == 0.0 || std::abs(end.phi) <= 1e-12 * std::abs(end.phi_prime) * (hi - lo))
    throw Error(Errc::degenerate_mode,
                "the layer shot vanishes at the interface; the mode cannot be normalized");
  const double s = k / end.phi;
  m.phi *= s;
  m.phi_prime *= s;
  for (auto& j : m.jumps) j.phi_prime_above *= s;
  if (downward) {
    m.phi[0] = k;
  } else {
    m.phi[0] = 0.0;
    m.phi[m.size() - 1] = k;
  }
  return m;
}

}  // namespace

void TwoFluidEnv::validate() const {
  if (!(h0 > 0) || !std::isfinite(h0)) throw Error(Errc::invalid_argument, "h0 must be positive");
  if (!(H > h0)) throw Error(Errc::invalid_argument, "the lid must lie above the interface");
  if (!(rho_minus > 0) || !std::isfinite(rho_minus))
    throw Error(Errc::invalid_argument, "rho_minus must be positive");
  if (!(rho_plus >= 0) || !std::isfinite(rho_plus))
    throw Error(Errc::invalid_argument, "rho_plus must be non-negative");
  if (!(sigma >= 0) || !std::isfinite(sigma))
    throw Error(Errc::invalid_argument, "sigma must be non-negative");
  if (!(g > 0) || !std::isfinite(g)) throw Error(Errc::invalid_argument, "g must be positive");
  if (lower.bottom() != 0.0 || !near(lower.top(), h0))
    throw Error(Errc::consistency, "lower shear profile must cover [0, h0]");
  if (!near(upper.bottom(), h0))
    throw Error(Errc::consistency, "upper shear profile must start at h0");
  if (!unbounded()) {
    if (!near(upper.top(), H))
      throw Error(Errc::consistency, "upper shear profile must end at the lid");
    return;
  }
  // The decaying closure needs a constant far field.
  const double top = upper.top();
  const double slope = upper.derivs(top, Side::below).dU;
  const double scale = 1.0 + std::max(std::abs(upper.max_U()), std::abs(upper.min_U()));
  if (std::abs(slope) * upper.depth() > 1e-8 * scale)
    throw Error(Errc::consistency,
                "an unbounded upper layer needs a current that is constant above its last sample");
}

std::vector<std::string> TwoFluidEnv::warnings() const {
  std::vector<std::string> w;
  if (rho_plus > rho_minus) w.emplace_back("upper layer is heavier than the lower layer (unstable)");
  return w;
}

double truncation_height(const TwoFluidEnv& env, double k) {
  return std::max(env.h0 + std::max(10.0 / k, 5.0 * env.h0), env.upper.top());
}

TwoLayerModes solve_two_layer_modes(const TwoFluidEnv& env, double c, double k,
                                    const SolverOptions& opts, std::optional<double> y_trunc) {
  env.validate();
  if (!(k > 0) || !std::isfinite(k))
    throw Error(Errc::invalid_argument, "wavenumber k must be positive and finite");
  if (opts.seed_slope == 0.0 || !std::isfinite(opts.seed_slope))
    throw Error(Errc::invalid_argument, "seed slope must be nonzero");
  check_layer(env.lower, c, opts, "lower");
  check_layer(env.upper, c, opts, "upper");

  TwoLayerModes out;
  out.lower = shoot_layer(env.lower, c, k, 0.0, env.h0, false, 0.0, opts.seed_slope, false, opts);
  if (env.unbounded()) {
    const double top = y_trunc.value_or(truncation_height(env, k));
    if (!(top >= env.upper.top()))
      throw Error(Errc::invalid_argument, "truncation height lies inside the sampled upper profile");
    out.y_trunc = top;
    // phi' = -k phi: the decaying solution of phi'' = k^2 phi.
    out.upper = shoot_layer(env.upper, c, k, env.h0, top, true, opts.seed_slope,
                            -k * opts.seed_slope, true, opts);
  } else {
    out.upper = shoot_layer(env.upper, c, k, env.h0, env.H, true, 0.0, -opts.seed_slope, false,
                            opts);
  }
  return out;
}

InterfaceTransfer interface_transfer(const TwoFluidEnv& env, const TwoLayerModes& modes) {
  const double c = modes.lower.c, k = modes.lower.k;
  auto at_interface = [&](const ShearProfile& shear, const ModeSolution& m, Eigen::Index i,
                          Side side) {
    const double rel = c - shear.U(env.h0);
    const double du = shear.derivs(env.h0, side).dU;
    return rel * (rel * m.phi_prime[i] + du * m.phi[i]) / k;
  };
  return {at_interface(env.lower, modes.lower, modes.lower.size() - 1, Side::below),
          at_interface(env.upper, modes.upper, 0, Side::above)};
}

double two_fluid_residual(const TwoFluidEnv& env, double c, double k, const SolverOptions& opts) {
  const auto modes = solve_two_layer_modes(env, c, k, opts);
  const auto t = interface_transfer(env, modes);
  const double rp = env.rho_plus, rm = env.rho_minus;
  const double raw = (rp - rm) * env.g - k * k * env.sigma - (rp * t.upper - rm * t.lower);
  const double scale =
      (rp + rm) * env.g + k * k * env.sigma + std::abs(rp * t.upper) + std::abs(rm * t.lower);
  return raw / scale;
}

double interface_hydrostatic(double p_bed_minus, double p_lid_plus, const TwoFluidEnv& env) {
  if (!(env.rho_plus < env.rho_minus))
    throw Error(Errc::degenerate_coefficient,
                "interface inversion needs a lighter upper layer (rho_plus < rho_minus)");
  const double ratio = env.rho_plus / env.rho_minus;
  const double p_plus = env.unbounded() ? 0.0 : p_lid_plus;
  return (p_bed_minus - ratio * p_plus) / ((1.0 - ratio) * env.g);
}

}  // namespace ptransfer
