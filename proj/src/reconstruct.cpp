#include "ptransfer/reconstruct.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "ptransfer/numerics/brent.hpp"
#include "ptransfer/transfer.hpp"

namespace ptransfer {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double two_pi = 2.0 * std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v))
    throw Error(Errc::invalid_argument, std::string(name) + " must be positive and finite");
}

std::vector<std::complex<double>> forward(const Eigen::VectorXd& x) {
  std::vector<std::complex<double>> in(static_cast<std::size_t>(x.size())), out;
  for (Eigen::Index i = 0; i < x.size(); ++i) in[static_cast<std::size_t>(i)] = x[i];
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  return out;
}

Eigen::VectorXd inverse_real(const std::vector<std::complex<double>>& spec) {
  std::vector<std::complex<double>> out;
  Eigen::FFT<double> fft;
  fft.inv(out, spec);
  Eigen::VectorXd x(static_cast<Eigen::Index>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) x[static_cast<Eigen::Index>(i)] = out[i].real();
  return x;
}

bool stratified(const DensityProfile* dens) { return dens && !dens->is_constant(); }

double residual_at(const ShearProfile& shear, const DensityProfile* dens, double c, double k,
                   double g, const SolverOptions& s) {
  return stratified(dens) ? bifurcation_residual(shear, *dens, c, k, g, s)
                          : bifurcation_residual(shear, c, k, g, s);
}

double bed_transfer(const ShearProfile& shear, const DensityProfile* dens, double c, double k,
                    double g, const SolverOptions& s) {
  if (stratified(dens)) {
    const auto m = solve_mode_stratified(shear, *dens, c, k, g, s);
    return transfer_from_mode(m, shear, dens).T0;
  }
  const auto m = solve_mode(shear, c, k, s);
  const double scale = dens ? dens->R(0.0) : 1.0;
  return scale * transfer_from_mode(m, shear).T0;
}

void check_depth(const GaugeMeta& meta, const ShearProfile& shear) {
  if (std::abs(meta.h0 - shear.depth()) > 1e-9 * std::max(1.0, shear.depth())) {
    std::ostringstream os;
    os << "gauge depth " << meta.h0 << " differs from the profile depth " << shear.depth();
    throw Error(Errc::consistency, os.str());
  }
}

}  // namespace

const char* to_string(PressureKind kind) {
  switch (kind) {
    case PressureKind::absolute:
      return "absolute";
    case PressureKind::dynamic:
      return "dynamic";
    case PressureKind::kinematic:
      return "kinematic";
  }
  return "?";
}

PressureKind pressure_kind_from_string(const std::string& s) {
  if (s == "absolute") return PressureKind::absolute;
  if (s == "dynamic") return PressureKind::dynamic;
  if (s == "kinematic") return PressureKind::kinematic;
  throw Error(Errc::format, "unknown pressure kind '" + s + "'");
}

void GaugeRecord::validate() const {
  const Eigen::Index n = t.size();
  if (p.size() != n) throw Error(Errc::format, "gauge record has mismatched t and p columns");
  if (n < 16) throw Error(Errc::format, "gauge record needs at least 16 samples");
  if (!t.allFinite() || !p.allFinite()) throw Error(Errc::format, "gauge record has non-finite values");
  const double step = dt();
  if (!(step > 0)) throw Error(Errc::format, "gauge times must increase");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * step) {
      std::ostringstream os;
      os << "non-uniform sampling at row " << i << ": step " << t[i] - t[i - 1] << " vs " << step;
      throw Error(Errc::format, os.str());
    }
  }
  require_positive(meta.rho_ref, "rho_ref");
  require_positive(meta.h0, "h0");
  require_positive(meta.g, "g");
}

GaugeRecord preprocess(const GaugeRecord& record, const PreprocessOptions& opts) {
  record.validate();
  GaugeRecord out = record;
  if (record.meta.kind == PressureKind::absolute) out.p.array() -= out.p.mean();
  if (opts.detrend) {
    const Eigen::ArrayXd s = (out.t.array() - out.t.mean());
    const double slope = (s * out.p.array()).sum() / (s * s).sum();
    out.p.array() -= out.p.mean() + slope * s;
  }
  if (record.meta.kind != PressureKind::kinematic) out.p /= record.meta.rho_ref;
  out.meta.kind = PressureKind::kinematic;
  return out;
}

ReconstructionResult reconstruct_hydrostatic(const GaugeRecord& record,
                                             const PreprocessOptions& pre) {
  const GaugeRecord kin = preprocess(record, pre);
  ReconstructionResult r;
  r.t = kin.t;
  r.eta = kin.p / kin.meta.g;
  r.method = ReconstructMethod::hydrostatic;
  return r;
}

ModeResponse mode_response(const ShearProfile& shear, const DensityProfile* dens, double k,
                           double g, const DispersionOptions& opts) {
  const auto d = find_wave_speed(shear, dens, k, g, opts);
  return {k, d.c, k * d.c, bed_transfer(shear, dens, d.c, k, g, opts.solver)};
}

ReconstructionResult reconstruct_spectral(const GaugeRecord& record, const ShearProfile& shear,
                                          const DensityProfile* dens,
                                          const ReconstructOptions& opts) {
  const GaugeRecord kin = preprocess(record, opts.preprocess);
  check_depth(kin.meta, shear);
  require_positive(opts.max_amplification, "max_amplification");
  if (opts.table_points < 2) throw Error(Errc::invalid_argument, "k table needs two points");
  const double g = kin.meta.g, h0 = shear.depth();
  const double k_max = opts.k_max.value_or(40.0 / h0);
  require_positive(k_max, "k_max");

  const Eigen::Index n = kin.size();
  const double span = double(n) * kin.dt();
  const auto X = forward(kin.p);

  // omega(k) table, extended downward until it covers the first bin.
  auto omega_of = [&](double k) { return k * find_wave_speed(shear, dens, k, g, opts.dispersion).c; };
  const double omega_1 = two_pi / span;
  double k_lo = std::min(1e-3 / h0, k_max / 2);
  for (int i = 0; i < 60 && omega_of(k_lo) > omega_1; ++i) k_lo /= 4;
  std::vector<double> ks, ws;
  const int m_tab = opts.table_points;
  for (int j = 0; j < m_tab; ++j) {
    const double k = j == m_tab - 1 ? k_max : k_lo * std::pow(k_max / k_lo, double(j) / (m_tab - 1));
    const double w = omega_of(k);
    if (!ws.empty() && !(w > ws.back())) break;  // non-monotone branch: stop the table here
    ks.push_back(k);
    ws.push_back(w);
  }

  ReconstructionResult r;
  r.t = kin.t;
  r.method = ReconstructMethod::spectral;
  r.max_amplification = opts.max_amplification;

  std::vector<std::complex<double>> Y(X.size(), {0.0, 0.0});
  const auto N = static_cast<std::size_t>(n);
  Y[0] = X[0] / g;
  r.per_mode.push_back({0.0, 0.0, 1.0 / g, true, std::abs(Y[0]) / double(n), std::arg(Y[0])});

  for (std::size_t m = 1; m <= N / 2; ++m) {
    const double omega = two_pi * double(m) / span;
    ModeGain mg{omega, nan, nan, false, 0.0, 0.0};
    const auto it = std::lower_bound(ws.begin(), ws.end(), omega);
    if (it != ws.end() && omega >= ws.front()) {
      const std::size_t j = static_cast<std::size_t>(it - ws.begin());
      try {
        double k;
        if (*it == omega) {
          k = ks[j];
        } else {
          auto f = [&](double kk) {
            return residual_at(shear, dens, omega / kk, kk, g, opts.dispersion.solver);
          };
          k = numerics::brent(f, ks[j - 1], ks[j], 1e-12 * (1.0 + ks[j])).root;
        }
        const double gain = 1.0 / bed_transfer(shear, dens, omega / k, k, g, opts.dispersion.solver);
        mg.k = k;
        mg.gain = gain;
        mg.kept = std::isfinite(gain) && std::abs(gain) * g <= opts.max_amplification;
      } catch (const Error& e) {
        if (e.code() == Errc::invalid_argument) throw;
      }
    }
    if (mg.kept) {
      Y[m] = mg.gain * X[m];
      if (m != N - m) Y[N - m] = mg.gain * X[N - m];
      const double weight = (m == N - m) ? 1.0 : 2.0;
      mg.amplitude = weight * std::abs(Y[m]) / double(n);
      mg.psi = std::arg(Y[m]);
    }
    r.per_mode.push_back(mg);
  }
  r.eta = inverse_real(Y);
  return r;
}

SynthResult synthesize_record(const std::vector<SynthMode>& modes, const ShearProfile& shear,
                              const DensityProfile* dens, const SynthOptions& opts) {
  require_positive(opts.duration, "duration");
  require_positive(opts.dt, "dt");
  require_positive(opts.rho_ref, "rho_ref");
  require_positive(opts.g, "g");
  if (!std::isfinite(opts.x_gauge)) throw Error(Errc::invalid_argument, "x_gauge must be finite");

  SynthResult out;
  double longest = 0;
  for (const auto& m : modes) {
    require_positive(m.k, "mode wavenumber");
    if (!(m.amplitude >= 0) || !std::isfinite(m.amplitude) || !std::isfinite(m.phase))
      throw Error(Errc::invalid_argument, "mode amplitude must be non-negative and finite");
    out.modes.push_back(mode_response(shear, dens, m.k, opts.g, opts.dispersion));
    if (!(out.modes.back().omega > 0))
      throw Error(Errc::invalid_argument, "mode does not propagate forward (omega <= 0)");
    longest = std::max(longest, two_pi / out.modes.back().omega);
  }

  double duration = opts.duration;
  if (longest > 0) duration = std::ceil(opts.duration / longest - 1e-9) * longest;
  const auto n = std::max<Eigen::Index>(16, std::llround(duration / opts.dt));
  const double dt = duration / double(n);

  GaugeRecord& rec = out.record;
  rec.meta = {opts.rho_ref, shear.depth(), opts.g, PressureKind::dynamic};
  rec.t.resize(n);
  rec.p.setZero(n);
  for (Eigen::Index i = 0; i < n; ++i) rec.t[i] = dt * double(i);
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto& resp = out.modes[j];
    const double amp = opts.rho_ref * modes[j].amplitude * resp.T0;
    for (Eigen::Index i = 0; i < n; ++i)
      rec.p[i] += amp * std::cos(resp.k * opts.x_gauge - resp.omega * rec.t[i] + modes[j].phase);
    out.periods_in_record.push_back(duration * resp.omega / two_pi);
  }
  out.duration = duration;
  return out;
}

}  // namespace ptransfer
