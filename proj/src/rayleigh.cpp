#include "ptransfer/rayleigh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>
#include <vector>

#include "ptransfer/numerics/ode.hpp"

namespace ptransfer {

namespace {

using Vec2 = Eigen::Vector2d;

numerics::OdeOptions<double> ode_options(const SolverOptions& opts, double seed_scale) {
  numerics::OdeOptions<double> o;
  o.rtol = opts.rtol;
  o.atol = opts.atol * seed_scale;
  o.max_steps = opts.max_steps;
  return o;
}

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v))
    throw Error(Errc::invalid_argument, std::string(name) + " must be positive and finite");
}

bool is_degenerate(double end_value, double end_slope, double span) {
  return std::abs(end_value) <= 1e-12 * std::abs(end_slope) * span || end_value == 0.0;
}

void scale_mode(ModeSolution& m, double s) {
  m.phi *= s;
  m.phi_prime *= s;
  if (m.varphi.size()) {
    m.varphi *= s;
    m.varphi_prime *= s;
  }
  for (auto& j : m.jumps) j.phi_prime_above *= s;
}

}  // namespace

double SolverOptions::margin_for(double c) const { return margin * (1.0 + std::abs(c)); }

Eigen::VectorXd mode_grid(double bottom, double top, const std::vector<double>& breakpoints,
                          int intervals) {
  if (intervals < 1) throw Error(Errc::invalid_argument, "grid needs at least one interval");
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(intervals) + 1 + breakpoints.size());
  for (int i = 0; i <= intervals; ++i)
    nodes.push_back(i == intervals ? top : bottom + (top - bottom) * i / intervals);
  for (double b : breakpoints)
    if (b > bottom && b < top) nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return Eigen::Map<Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
}

void check_wave_speed(const ShearProfile& shear, double c, const SolverOptions& opts) {
  if (!std::isfinite(c)) throw Error(Errc::invalid_argument, "wave speed must be finite");
  const double margin = opts.margin_for(c);
  if (opts.strict_no_critical_layer || !shear.curvature_free()) {
    if (c <= shear.max_U() + margin) {
      std::ostringstream os;
      os << "c = " << c << " does not exceed max U = " << shear.max_U();
      throw Error(Errc::critical_layer, os.str());
    }
    return;
  }
  if (std::abs(c - shear.U(shear.top())) <= margin)
    throw Error(Errc::critical_layer, "wave speed equals the current at the top of the layer");
  for (double b : shear.breakpoints()) {
    const double jump = shear.derivs(b, Side::above).dU - shear.derivs(b, Side::below).dU;
    if (jump != 0.0 && std::abs(c - shear.U(b)) <= margin)
      throw Error(Errc::singular_jump, "wave speed equals the current at the vorticity jump");
  }
}

namespace detail {

ShotEnd shoot_rayleigh(const ShearProfile& shear, double c, double k, double from, double to,
                       double phi0, double dphi0, const SolverOptions& opts, bool extended,
                       const Eigen::VectorXd* stations, ModeSolution* out) {
  const bool up = to > from;
  const double lo = std::min(from, to), hi = std::max(from, to);
  const double k2 = k * k;
  const bool flat = shear.curvature_free();

  auto rhs = [&](double y, const Vec2& s) -> Vec2 {
    double coeff = k2;
    if (!flat && !(extended && y > shear.top())) {
      const double d2 = shear.derivs(y, Side::below).d2U;
      if (d2 != 0.0) coeff += d2 / (shear.U(y) - c);
    }
    return {s[1], coeff * s[0]};
  };

  std::vector<double> bps;
  for (double b : shear.breakpoints())
    if (b > lo && b < hi) bps.push_back(b);
  if (up)
    std::sort(bps.begin(), bps.end());
  else
    std::sort(bps.begin(), bps.end(), std::greater<>());

  // Station indices in integration order.
  std::vector<Eigen::Index> order;
  if (stations) {
    order.resize(static_cast<std::size_t>(stations->size()));
    for (Eigen::Index i = 0; i < stations->size(); ++i)
      order[static_cast<std::size_t>(i)] = up ? i : stations->size() - 1 - i;
  }

  const double seed_scale = std::max(std::abs(dphi0), std::abs(phi0));
  const auto ode = ode_options(opts, seed_scale > 0 ? seed_scale : 1.0);

  Vec2 state(phi0, dphi0);
  double a = from;
  std::size_t next = 0;
  for (std::size_t seg = 0; seg <= bps.size(); ++seg) {
    const double b = seg < bps.size() ? bps[seg] : to;
    std::vector<double> st;
    std::vector<Eigen::Index> idx;
    while (next < order.size()) {
      const double s = (*stations)[order[next]];
      const bool inside = up ? (s <= b) : (s >= b);
      if (!inside) break;
      st.push_back(s);
      idx.push_back(order[next]);
      ++next;
    }
    if (st.empty() || st.back() != b) {
      st.push_back(b);
      idx.push_back(-1);
    }
    std::size_t hit = 0;
    auto observe = [&](double, const Vec2& s) {
      const Eigen::Index i = idx[hit++];
      if (i >= 0 && out) {
        out->phi[i] = s[0];
        out->phi_prime[i] = s[1];
      }
    };
    state = numerics::integrate<double, 2>(rhs, a, state, std::span<const double>(st), observe,
                                           ode);
    if (seg < bps.size()) {
      const double before = state[1];
      const Side from_side = up ? Side::below : Side::above;
      const Side to_side = up ? Side::above : Side::below;
      const double jump = shear.derivs(b, to_side).dU - shear.derivs(b, from_side).dU;
      const double denom = shear.U(b) - c;
      if (jump != 0.0 && std::abs(denom) <= opts.margin_for(c))
        throw Error(Errc::singular_jump, "wave speed equals the current at the vorticity jump");
      // [phi'] = [U'] phi / (U - c), read off the Dirac mass in U''.
      const double after = jump == 0.0 ? before : before + jump / denom * state[0];
      state[1] = after;
      if (out) {
        const Eigen::Index node = idx.back();
        const double below = up ? before : after;
        const double above = up ? after : before;
        if (node >= 0) out->phi_prime[node] = below;
        out->jumps.push_back({b, node, above});
      }
    }
    a = b;
  }
  if (out && !up) std::reverse(out->jumps.begin(), out->jumps.end());
  return {state[0], state[1]};
}

}  // namespace detail

ModeSolution solve_mode(const ShearProfile& shear, double c, double k, const SolverOptions& opts) {
  require_positive(k, "wavenumber k");
  if (opts.seed_slope == 0.0 || !std::isfinite(opts.seed_slope))
    throw Error(Errc::invalid_argument, "seed slope must be nonzero");
  check_wave_speed(shear, c, opts);

  ModeSolution m;
  m.c = c;
  m.k = k;
  m.kind = ModeKind::homogeneous;
  m.y = mode_grid(shear.bottom(), shear.top(), shear.breakpoints(), opts.grid_intervals);
  m.phi.resize(m.y.size());
  m.phi_prime.resize(m.y.size());

  const auto end = detail::shoot_rayleigh(shear, c, k, shear.bottom(), shear.top(), 0.0,
                                          opts.seed_slope, opts, false, &m.y, &m);
  if (is_degenerate(end.phi, end.phi_prime, shear.depth()))
    throw Error(Errc::degenerate_mode,
                "the unit-slope shot vanishes at the surface; the mode cannot be normalized");
  const double target = k * (c - shear.U(shear.top()));
  scale_mode(m, target / end.phi);
  m.phi[0] = 0.0;
  m.phi[m.size() - 1] = target;
  return m;
}

ModeSolution solve_mode_piecewise(const ShearProfile& shear, double c, double k,
                                  const SolverOptions& opts) {
  if (!std::holds_alternative<shear::PiecewiseLinear>(shear.kind()))
    throw Error(Errc::invalid_argument, "solve_mode_piecewise needs a piecewise-linear profile");
  return solve_mode(shear, c, k, opts);
}

namespace {

struct StratifiedShot {
  double varphi;
  double varphi_prime;
};

StratifiedShot shoot_stratified(const ShearProfile& shear, const DensityProfile& dens, double c,
                                double k, double g, const SolverOptions& opts,
                                ModeSolution* out) {
  const double h0 = shear.top();
  auto density = [&](double y) {
    const double r = dens.R(y);
    if (!(r > 0)) {
      std::ostringstream os;
      os << "density vanishes at y = " << y;
      throw Error(Errc::vacuum_layer, os.str());
    }
    return r;
  };
  // state = (varphi, w), w = R (c - U)^2 varphi'
  auto rhs = [&](double y, const Vec2& s) -> Vec2 {
    const double r = density(y);
    const double rel = c - shear.U(y);
    return {s[1] / (r * rel * rel), (k * k * rel * rel * r + g * dens.dR(y)) * s[0]};
  };

  const double r0 = density(shear.bottom());
  const double rel0 = c - shear.U(shear.bottom());
  const Vec2 start(0.0, r0 * rel0 * rel0 * opts.seed_slope);
  auto ode = ode_options(opts, std::abs(opts.seed_slope));

  auto slope_of = [&](double y, const Vec2& s) {
    const double rel = c - shear.U(y);
    return s[1] / (density(y) * rel * rel);
  };

  Vec2 end;
  if (out) {
    std::span<const double> st(out->y.data(), static_cast<std::size_t>(out->y.size()));
    Eigen::Index i = 0;
    auto observe = [&](double y, const Vec2& s) {
      out->varphi[i] = s[0];
      out->varphi_prime[i] = slope_of(y, s);
      ++i;
    };
    end = numerics::integrate<double, 2>(rhs, shear.bottom(), start, st, observe, ode);
  } else {
    end = numerics::integrate<double, 2>(rhs, shear.bottom(), start, h0, ode);
  }
  return {end[0], slope_of(h0, end)};
}

void check_stratified_inputs(const ShearProfile& shear, const DensityProfile& dens, double c,
                             double k, double g, const SolverOptions& opts) {
  require_positive(k, "wavenumber k");
  require_positive(g, "gravity g");
  if (opts.seed_slope == 0.0 || !std::isfinite(opts.seed_slope))
    throw Error(Errc::invalid_argument, "seed slope must be nonzero");
  if (shear.bottom() != 0.0 || std::abs(shear.top() - dens.h0()) > 1e-12 * dens.h0())
    throw Error(Errc::consistency, "shear and density profiles cover different layers");
  SolverOptions strict = opts;
  strict.strict_no_critical_layer = true;
  check_wave_speed(shear, c, strict);

  // A vanishing density stalls the integrator long before it is sampled
  // exactly, so look for it up front.
  std::vector<double> probe;
  if (const auto* t = std::get_if<density::Tabulated>(&dens.kind()))
    for (const auto& [y, r] : t->samples) probe.push_back(y);
  const int n = 1024;
  for (int i = 0; i <= n; ++i) probe.push_back(dens.h0() * i / n);
  for (double y : probe) {
    if (y < 0 || y > dens.h0() || dens.R(y) > 0) continue;
    std::ostringstream os;
    os << "density vanishes at y = " << y;
    throw Error(Errc::vacuum_layer, os.str());
  }
}

}  // namespace

ModeSolution solve_mode_stratified(const ShearProfile& shear, const DensityProfile& dens,
                                   double c, double k, double g, const SolverOptions& opts) {
  check_stratified_inputs(shear, dens, c, k, g, opts);

  ModeSolution m;
  m.c = c;
  m.k = k;
  m.kind = ModeKind::stratified;
  m.y = mode_grid(shear.bottom(), shear.top(), shear.breakpoints(), opts.grid_intervals);
  const Eigen::Index n = m.y.size();
  m.varphi.resize(n);
  m.varphi_prime.resize(n);

  const auto end = shoot_stratified(shear, dens, c, k, g, opts, &m);
  if (is_degenerate(end.varphi, end.varphi_prime, shear.depth()))
    throw Error(Errc::degenerate_mode,
                "the unit-slope shot vanishes at the surface; the mode cannot be normalized");
  const double s = k / end.varphi;
  m.varphi *= s;
  m.varphi_prime *= s;
  m.varphi[0] = 0.0;
  m.varphi[n - 1] = k;

  // phi = (c - U) varphi,  phi' = (c - U) varphi' - U' varphi
  m.phi.resize(n);
  m.phi_prime.resize(n);
  const auto bps = shear.breakpoints();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = m.y[i];
    const double rel = c - shear.U(y);
    const bool at_break = std::find(bps.begin(), bps.end(), y) != bps.end();
    const double du = shear.derivs(y, at_break ? Side::below : Side::unspecified).dU;
    m.phi[i] = rel * m.varphi[i];
    m.phi_prime[i] = rel * m.varphi_prime[i] - du * m.varphi[i];
    if (at_break) {
      const double du_above = shear.derivs(y, Side::above).dU;
      m.jumps.push_back({y, i, rel * m.varphi_prime[i] - du_above * m.varphi[i]});
    }
  }
  return m;
}

double bifurcation_residual(const ShearProfile& shear, double c, double k, double g,
                            const SolverOptions& opts) {
  require_positive(k, "wavenumber k");
  require_positive(g, "gravity g");
  check_wave_speed(shear, c, opts);
  const auto end = detail::shoot_rayleigh(shear, c, k, shear.bottom(), shear.top(), 0.0,
                                          opts.seed_slope, opts, false, nullptr, nullptr);
  const double top = shear.top();
  const double rel = shear.U(top) - c;
  const double du = shear.derivs(top, Side::below).dU;
  const double raw = end.phi_prime - (g / (rel * rel) + du / rel) * end.phi;
  const double scale =
      std::max(std::abs(end.phi), std::abs(end.phi_prime)) * (1.0 + g / (rel * rel));
  return raw / scale;
}

double bifurcation_residual(const ShearProfile& shear, const DensityProfile& dens, double c,
                            double k, double g, const SolverOptions& opts) {
  if (dens.is_constant()) return bifurcation_residual(shear, c, k, g, opts);
  check_stratified_inputs(shear, dens, c, k, g, opts);
  const auto end = shoot_stratified(shear, dens, c, k, g, opts, nullptr);
  const double rel = c - shear.U(shear.top());
  const double w = g / (rel * rel);
  const double raw = end.varphi_prime - w * end.varphi;
  const double scale = std::max(std::abs(end.varphi), std::abs(end.varphi_prime)) * (1.0 + w);
  return raw / scale;
}

}  // namespace ptransfer
