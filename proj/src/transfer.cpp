#include "ptransfer/transfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ptransfer {

namespace {

bool close(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, scale);
}

void check_match(const ModeSolution& mode, const ShearProfile& shear, bool extended) {
  if (mode.size() < 2 || mode.phi.size() != mode.size() || mode.phi_prime.size() != mode.size())
    throw Error(Errc::consistency, "mode samples are incomplete");
  const double lo = mode.y[0], hi = mode.y[mode.size() - 1];
  const bool top_ok = extended ? hi >= shear.top() - 1e-9 * shear.depth()
                               : close(hi, shear.top(), shear.depth());
  if (!close(lo, shear.bottom(), shear.depth()) || !top_ok)
    throw Error(Errc::consistency, "mode grid does not span the shear profile");
}

bool is_break(const ShearProfile& shear, double y) {
  const auto b = shear.breakpoints();
  return std::find(b.begin(), b.end(), y) != b.end();
}

/// (c - U) phi' + U' phi at node i, optionally with the slope from above.
double flux(const ModeSolution& m, const ShearProfile& shear, Eigen::Index i, double phi_prime,
            Side side, bool extended) {
  const double y = m.y[i];
  const double u = extended ? shear.U_extended(y) : shear.U(y);
  const double du = extended && y > shear.top() ? 0.0 : shear.derivs(y, side).dU;
  return (m.c - u) * phi_prime + du * m.phi[i];
}

TransferFunction homogeneous(const ModeSolution& m, const ShearProfile& shear, double factor,
                             bool extended, TransferKind kind) {
  TransferFunction tf;
  tf.y = m.y;
  tf.c = m.c;
  tf.k = m.k;
  tf.kind = kind;
  tf.T.resize(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const bool brk = is_break(shear, m.y[i]);
    tf.T[i] = factor * flux(m, shear, i, m.phi_prime[i], brk ? Side::below : Side::unspecified,
                            extended) / m.k;
  }
  for (const auto& j : m.jumps)
    tf.jumps.emplace_back(j.index,
                          factor * flux(m, shear, j.index, j.phi_prime_above, Side::above,
                                        extended) / m.k);
  tf.T0 = tf.T[0];
  return tf;
}

}  // namespace

TransferFunction transfer_from_mode(const ModeSolution& mode, const ShearProfile& shear,
                                    const DensityProfile* dens) {
  check_match(mode, shear, false);
  if (!std::isfinite(mode.c) || !(mode.k > 0))
    throw Error(Errc::consistency, "mode carries an invalid wave speed or wavenumber");
  if (mode.kind == ModeKind::homogeneous)
    return homogeneous(mode, shear, 1.0, false, TransferKind::homogeneous);

  if (!dens) throw Error(Errc::consistency, "a stratified mode needs its density profile");
  if (mode.varphi_prime.size() != mode.size())
    throw Error(Errc::consistency, "stratified mode lacks varphi samples");
  TransferFunction tf;
  tf.y = mode.y;
  tf.c = mode.c;
  tf.k = mode.k;
  tf.kind = TransferKind::stratified;
  tf.T.resize(mode.size());
  for (Eigen::Index i = 0; i < mode.size(); ++i) {
    const double rel = mode.c - shear.U(mode.y[i]);
    tf.T[i] = dens->R(mode.y[i]) * rel * rel * mode.varphi_prime[i] / mode.k;
  }
  // varphi' is continuous, so T is too; jumps repeat the node value.
  for (const auto& j : mode.jumps) tf.jumps.emplace_back(j.index, tf.T[j.index]);
  tf.T0 = tf.T[0];
  return tf;
}

std::pair<TransferFunction, TransferFunction> transfer_two_fluid(const TwoFluidEnv& env,
                                                                 const TwoLayerModes& modes) {
  check_match(modes.lower, env.lower, false);
  check_match(modes.upper, env.upper, env.unbounded());
  const double c = modes.lower.c;
  return {homogeneous(modes.lower, env.lower, c - env.lower.U(env.h0), false,
                      TransferKind::two_fluid_lower),
          homogeneous(modes.upper, env.upper, c - env.upper.U(env.h0), env.unbounded(),
                      TransferKind::two_fluid_upper)};
}

double bed_gain(const TransferFunction& tf, double g) {
  if (!(std::abs(tf.T0) >= 1e-14 * g))
    throw Error(Errc::ill_conditioned, "bed transfer value vanishes; the inversion is singular");
  return 1.0 / tf.T0;
}

namespace {

/// Weights of the first derivative at x0 from nodes x[0..n) (Fornberg).
std::array<double, 5> fd_weights(double x0, const double* x) {
  constexpr int n = 5;
  double c[n][2] = {};
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int m = mn; m >= 1; --m) c[i][m] = c1 * (m * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int m = mn; m >= 1; --m) c[j][m] = (c4 * c[j][m] - m * c[j][m - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  return {c[0][1], c[1][1], c[2][1], c[3][1], c[4][1]};
}

}  // namespace

std::vector<SlopeSample> nonmonotonicity_profile(const TransferFunction& tf) {
  const Eigen::Index n = tf.y.size();
  if (n < 5) throw Error(Errc::invalid_argument, "slope profile needs at least five samples");
  std::vector<SlopeSample> out(static_cast<std::size_t>(n));
  double peak = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index start = std::clamp<Eigen::Index>(i - 2, 0, n - 5);
    const auto w = fd_weights(tf.y[i], tf.y.data() + start);
    double d = 0;
    for (int j = 0; j < 5; ++j) d += w[static_cast<std::size_t>(j)] * tf.T[start + j];
    out[static_cast<std::size_t>(i)] = {tf.y[i], d, 0};
    peak = std::max(peak, std::abs(d));
  }
  const double floor = 1e-9 * peak;
  for (auto& s : out) s.sign = s.dT > floor ? 1 : (s.dT < -floor ? -1 : 0);
  return out;
}

bool slope_changes_sign(const std::vector<SlopeSample>& slopes) {
  bool pos = false, neg = false;
  for (std::size_t i = 1; i + 1 < slopes.size(); ++i) {
    pos |= slopes[i].sign > 0;
    neg |= slopes[i].sign < 0;
  }
  return pos && neg;
}

LinearField linear_field(const ModeSolution& mode, const TransferFunction& tf,
                         const ShearProfile& shear, const DensityProfile* dens,
                         const FieldOptions& opts, double mode_scale) {
  if (!(opts.amplitude >= 0) || !std::isfinite(opts.amplitude))
    throw Error(Errc::invalid_argument, "amplitude must be non-negative");
  if (opts.nx < 2) throw Error(Errc::invalid_argument, "field needs at least two x samples");
  if (tf.T.size() != mode.size())
    throw Error(Errc::consistency, "transfer function and mode use different grids");
  const bool stratified = mode.kind == ModeKind::stratified;
  if (stratified && !dens) throw Error(Errc::consistency, "stratified field needs the density");

  const double k = mode.k, c = mode.c, a = opts.amplitude;
  LinearField f;
  f.y = mode.y;
  f.x.resize(opts.nx);
  const double wavelength = 2.0 * std::numbers::pi / k;
  for (int j = 0; j < opts.nx; ++j) f.x[j] = wavelength * j / opts.nx;

  Eigen::ArrayXd cos_t(opts.nx), sin_t(opts.nx);
  for (int j = 0; j < opts.nx; ++j) {
    const double theta = k * (f.x[j] - c * opts.t) + opts.phase;
    cos_t[j] = std::cos(theta);
    sin_t[j] = std::sin(theta);
  }
  const Eigen::Index ny = mode.size();
  f.u.resize(ny, opts.nx);
  f.v.resize(ny, opts.nx);
  f.p.resize(ny, opts.nx);
  if (stratified) f.rho.resize(ny, opts.nx);
  for (Eigen::Index i = 0; i < ny; ++i) {
    f.u.row(i) = (a * mode_scale * mode.phi_prime[i] / k) * cos_t.matrix().transpose();
    f.v.row(i) = (a * mode_scale * mode.phi[i]) * sin_t.matrix().transpose();
    f.p.row(i) = (a * tf.T[i]) * cos_t.matrix().transpose();
    if (stratified) {
      const double y = mode.y[i];
      const double amp = -a * dens->dR(y) * mode.phi[i] / (k * (c - shear.U(y)));
      f.rho.row(i) = amp * cos_t.matrix().transpose();
    }
  }
  return f;
}

}  // namespace ptransfer
