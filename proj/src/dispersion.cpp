#include "ptransfer/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "ptransfer/numerics/brent.hpp"
#include "ptransfer/numerics/quadrature.hpp"

namespace ptransfer {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v))
    throw Error(Errc::invalid_argument, std::string(name) + " must be positive and finite");
}

double brent_tol(double c) { return 1e-12 * (1.0 + std::abs(c)); }

/// Residual evaluations that hit a refused speed count as scan gaps.
bool is_gap(const Error& e) {
  switch (e.code()) {
    case Errc::critical_layer:
    case Errc::singular_jump:
    case Errc::degenerate_mode:
    case Errc::convergence:
      return true;
    default:
      return false;
  }
}

DispersionResult bracketed_root(const std::function<double(double)>& f, double a, double b,
                                double fa, double fb, double k) {
  const auto r = numerics::brent(f, a, b, fa, fb, brent_tol(std::max(std::abs(a), std::abs(b))));
  DispersionResult out;
  out.c = r.root;
  out.k = k;
  out.residual = r.value;
  out.bracket = {a, b};
  out.iterations = r.iterations;
  return out;
}

DispersionResult scan_for_roots(const std::function<double(double)>& f, double lo, double hi,
                                double k, const DispersionOptions& opts) {
  if (opts.bracket_hint) {
    auto [a, b] = *opts.bracket_hint;
    if (!(a < b)) throw Error(Errc::invalid_argument, "bracket hint must satisfy a < b");
    auto r = bracketed_root(f, a, b, f(a), f(b), k);
    r.roots = {r.c};
    return r;
  }
  if (opts.scan_points < 2) throw Error(Errc::invalid_argument, "scan needs at least two points");
  if (!(hi > lo)) throw Error(Errc::no_root, "empty wave-speed interval");

  const int n = opts.scan_points;
  auto eval = [&](double c) {
    try {
      return f(c);
    } catch (const Error& e) {
      if (!is_gap(e)) throw;
      return nan;
    }
  };
  std::vector<double> cs(static_cast<std::size_t>(n)), fs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double c = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    cs[static_cast<std::size_t>(i)] = c;
    fs[static_cast<std::size_t>(i)] = eval(c);
  }

  auto roots_on_grid = [&] {
    std::vector<DispersionResult> found;
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
      const double fa = fs[i], fb = fs[i + 1];
      if (std::isnan(fa) || std::isnan(fb)) continue;
      if (fa == 0.0 || (fa > 0) != (fb > 0)) {
        if (fa == 0.0 && !found.empty() && found.back().c == cs[i]) continue;
        try {
          auto r = bracketed_root(f, cs[i], cs[i + 1], fa, fb, k);
          if (std::abs(r.residual) <= opts.accept_residual) found.push_back(r);
        } catch (const Error& e) {
          // A pole at a refused speed inside the bracket, not a root.
          if (!is_gap(e)) throw;
        }
      }
    }
    if (fs.back() == 0.0) {
      DispersionResult r;
      r.c = cs.back();
      r.k = k;
      r.bracket = {cs.back(), cs.back()};
      found.push_back(r);
    }
    return found;
  };

  // Two roots inside one scan interval leave no sign change, which happens
  // below the surface mode of stratified problems. Halve the spacing until
  // the set of roots stops changing.
  auto found = roots_on_grid();
  for (int level = 0; level < 4; ++level) {
    std::vector<double> c2, f2;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      c2.push_back(cs[i]);
      f2.push_back(fs[i]);
      if (i + 1 < cs.size()) {
        const double m = 0.5 * (cs[i] + cs[i + 1]);
        c2.push_back(m);
        f2.push_back(eval(m));
      }
    }
    cs.swap(c2);
    fs.swap(f2);
    auto refined = roots_on_grid();
    bool same = refined.size() == found.size();
    for (std::size_t i = 0; same && i < found.size(); ++i)
      same = std::abs(refined[i].c - found[i].c) <= 1e-9 * (1 + std::abs(found[i].c));
    found = std::move(refined);
    if (same) break;
  }
  if (found.empty()) {
    std::ostringstream os;
    os << "no sign change of the dispersion residual on [" << lo << ", " << hi << "] at k = " << k
       << "; scan (c, residual):";
    for (std::size_t i = 0; i < cs.size(); ++i) os << " (" << cs[i] << ", " << fs[i] << ")";
    throw Error(Errc::no_root, os.str());
  }
  DispersionResult best = found.back();
  for (const auto& r : found) best.roots.push_back(r.c);
  return best;
}

/// Lowest admissible speed: curvature-free profiles only need to avoid the
/// surface current, anything else must clear max U.
double lowest_speed(const ShearProfile& shear, double level, const SolverOptions& s) {
  const bool relaxed = shear.curvature_free() && !s.strict_no_critical_layer;
  const double base = relaxed ? level : shear.max_U();
  // Twice the refusal margin, so the first scan point is admissible.
  return base + 2.0 * s.margin_for(base);
}

std::vector<double> quadrature_breaks(const ShearProfile& shear) {
  std::vector<double> b = shear.breakpoints();
  if (const auto* t = std::get_if<shear::Tabulated>(&shear.kind()))
    for (const auto& s : t->samples) b.push_back(s.first);
  return b;
}

double inverse_square_integral(const ShearProfile& shear, double c, double lo, double hi) {
  auto f = [&](double y) {
    const double d = shear.U(y) - c;
    return 1.0 / (d * d);
  };
  return numerics::integrate_adaptive<double>(f, lo, hi, 1e-12, 0.0, quadrature_breaks(shear))
      .value;
}

/// Root of a function that is positive just above `floor` and negative at
/// floor + span: halve the offset until positive, then bracket.
double long_wave_root(const std::function<double(double)>& F, double floor, double span) {
  const double hi = floor + span;
  const double fhi = F(hi);
  if (!(fhi < 0)) throw Error(Errc::no_root, "long-wave residual is not negative at the upper bound");
  double delta = span / 2;
  double flo = F(floor + delta);
  int halvings = 0;
  while (!(flo > 0)) {
    if (++halvings > 200) throw Error(Errc::no_root, "long-wave residual never turns positive");
    delta /= 2;
    flo = F(floor + delta);
  }
  return numerics::brent(F, floor + delta, hi, flo, fhi, brent_tol(hi)).root;
}

}  // namespace

DispersionResult find_wave_speed(const ShearProfile& shear, const DensityProfile* dens, double k,
                                 double g, const DispersionOptions& opts) {
  require_positive(k, "wavenumber k");
  require_positive(g, "gravity g");
  const bool stratified = dens && !dens->is_constant();
  const double h0 = shear.depth();
  const double lo = stratified ? shear.max_U() + 2.0 * opts.solver.margin_for(shear.max_U())
                               : lowest_speed(shear, shear.U(shear.top()), opts.solver);
  const double hi = opts.c_upper.value_or(shear.max_U() + 10.0 * std::sqrt(g * h0));
  std::function<double(double)> f;
  if (stratified)
    f = [&](double c) { return bifurcation_residual(shear, *dens, c, k, g, opts.solver); };
  else
    f = [&](double c) { return bifurcation_residual(shear, c, k, g, opts.solver); };
  return scan_for_roots(f, lo, hi, k, opts);
}

std::vector<DispersionResult> dispersion_sweep(const ShearProfile& shear,
                                               const DensityProfile* dens,
                                               const std::vector<double>& ks, double g,
                                               const DispersionOptions& opts) {
  std::vector<DispersionResult> out;
  out.reserve(ks.size());
  for (double k : ks) out.push_back(find_wave_speed(shear, dens, k, g, opts));
  return out;
}

double closed_form_c_zero(double k, double h0, double g) {
  require_positive(k, "k");
  require_positive(h0, "h0");
  require_positive(g, "g");
  return std::sqrt(g * std::tanh(k * h0) / k);
}

double closed_form_c_const_vorticity(double gamma, double k, double h0, double g) {
  require_positive(k, "k");
  require_positive(h0, "h0");
  require_positive(g, "g");
  const double t = std::tanh(k * h0);
  const double half_b = gamma * t / (2.0 * k);
  return -half_b + std::sqrt(half_b * half_b + g * t / k);
}

StagnationResult stagnation_condition(double gamma, double k, double h0, double g) {
  require_positive(k, "k");
  require_positive(h0, "h0");
  require_positive(g, "g");
  const double t = std::tanh(k * h0);
  const double den = k * h0 * h0 - h0 * t;
  if (!(den > 0))
    throw Error(Errc::degenerate_geometry,
                "k h0^2 - h0 tanh(k h0) vanishes; the stagnation threshold is undefined");
  const double threshold = g * t / den;
  return {gamma < 0 && gamma * gamma > threshold, threshold};
}

std::vector<double> burns_speed(const ShearProfile& shear, double g) {
  require_positive(g, "gravity g");
  const double lo = shear.bottom(), hi = shear.top();
  auto F = [&](double c) { return inverse_square_integral(shear, c, lo, hi) - 1.0 / g; };
  return {long_wave_root(F, shear.max_U(), 2.0 * std::sqrt(g * shear.depth()))};
}

double generalized_burns_speed(const ShearProfile& lower, const ShearProfile& upper,
                               double w_minus, double w_plus, bool unbounded_upper) {
  if (!(w_minus > 0) || !std::isfinite(w_minus))
    throw Error(Errc::invalid_argument, "lower-layer weight must be positive");
  if (!(w_plus >= 0) || !std::isfinite(w_plus))
    throw Error(Errc::invalid_argument, "upper-layer weight must be non-negative");
  if (unbounded_upper && w_plus > 0)
    throw Error(Errc::integrability,
                "with an unbounded upper layer and a constant far-field current, "
                "1/(U+ - c)^2 is not integrable");
  const bool use_upper = w_plus > 0;
  const double floor = use_upper ? std::max(lower.max_U(), upper.max_U()) : lower.max_U();
  const double mass = w_minus * lower.depth() + (use_upper ? w_plus * upper.depth() : 0.0);
  auto F = [&](double c) {
    double v = w_minus * inverse_square_integral(lower, c, lower.bottom(), lower.top());
    if (use_upper) v += w_plus * inverse_square_integral(upper, c, upper.bottom(), upper.top());
    return v - 1.0;
  };
  return long_wave_root(F, floor, 2.0 * std::sqrt(mass));
}

double generalized_burns_speed(const TwoFluidEnv& env) {
  env.validate();
  return generalized_burns_speed(env.lower, env.upper, env.g, env.g * env.rho_plus / env.rho_minus,
                                 env.unbounded());
}

DispersionResult two_fluid_dispersion(const TwoFluidEnv& env, double k,
                                      const DispersionOptions& opts) {
  env.validate();
  require_positive(k, "wavenumber k");
  const double lo = std::max(lowest_speed(env.lower, env.lower.U(env.h0), opts.solver),
                             lowest_speed(env.upper, env.upper.U(env.h0), opts.solver));
  const double top_u = std::max(env.lower.max_U(), env.upper.max_U());
  const double hi = opts.c_upper.value_or(top_u + 10.0 * std::sqrt(env.g * env.h0) +
                                          10.0 * std::sqrt(env.sigma * k / env.rho_minus));
  auto f = [&](double c) { return two_fluid_residual(env, c, k, opts.solver); };
  return scan_for_roots(f, lo, hi, k, opts);
}

}  // namespace ptransfer
