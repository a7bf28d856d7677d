#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ptransfer/reconstruct.hpp"

using namespace ptransfer;

namespace {
constexpr double g = 9.81;

GaugeRecord record(int n, double dt, const std::function<double(double)>& p, GaugeMeta meta = {}) {
  GaugeRecord r;
  r.t = Eigen::VectorXd::LinSpaced(n, 0, dt * (n - 1));
  r.p.resize(n);
  for (int i = 0; i < n; ++i) r.p[i] = p(r.t[i]);
  r.meta = meta;
  return r;
}

SynthOptions synth_opts() {
  SynthOptions so;
  so.duration = 20;
  so.dt = 0.05;
  so.rho_ref = 1000;
  so.g = g;
  return so;
}
}  // namespace

TEST_CASE("gauge records are validated") {
  auto r = record(32, 0.1, [](double) { return 0.0; });
  CHECK_NOTHROW(r.validate());
  r.t[5] += 0.01;
  CHECK_THROWS_AS(r.validate(), Error);
  CHECK_THROWS_AS(preprocess(r), Error);
  CHECK_THROWS_AS(record(8, 0.1, [](double) { return 0.0; }).validate(), Error);
}

TEST_CASE("preprocess to kinematic pressure") {
  GaugeMeta abs{1025, 2, g, PressureKind::absolute};
  const auto flat = preprocess(record(64, 0.1, [](double) { return 101325.0; }, abs));
  CHECK(flat.p.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(flat.meta.kind == PressureKind::kinematic);

  const double w = 2 * M_PI / 3.2;  // 64 samples, 2 periods
  const auto wave =
      preprocess(record(64, 0.1, [&](double t) { return 1025 * (g * 2 + 0.3 * std::cos(w * t)); }, abs));
  for (Eigen::Index i = 0; i < wave.size(); ++i)
    CHECK(wave.p[i] == doctest::Approx(0.3 * std::cos(w * wave.t[i])).scale(1).epsilon(1e-12));

  GaugeMeta dyn{1000, 2, g, PressureKind::dynamic};
  const auto d = preprocess(record(32, 0.1, [](double) { return 500.0; }, dyn));
  CHECK(d.p[3] == doctest::Approx(0.5));
}

TEST_CASE("detrending removes a linear drift") {
  GaugeMeta kin{1, 2, g, PressureKind::kinematic};
  PreprocessOptions pre;
  pre.detrend = true;
  const auto r = preprocess(record(50, 0.2, [](double t) { return 3 + 0.1 * t; }, kin), pre);
  CHECK(r.p.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hydrostatic reconstruction") {
  GaugeMeta kin{1, 2, g, PressureKind::kinematic};
  const auto zero = reconstruct_hydrostatic(record(20, 0.1, [](double) { return 0.0; }, kin));
  CHECK(zero.eta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.per_mode.empty());
  CHECK(zero.method == ReconstructMethod::hydrostatic);
  const auto one = reconstruct_hydrostatic(record(20, 0.1, [](double) { return 9.81; }, kin));
  CHECK(one.eta[7] == doctest::Approx(1.0));
}

TEST_CASE("synthesized records") {
  const auto shear = ShearProfile::zero(2);
  const auto none = synthesize_record({}, shear, nullptr, synth_opts());
  CHECK(none.record.p.cwiseAbs().maxCoeff() == 0.0);

  const auto one = synthesize_record({{1, 1, 0}}, shear, nullptr, synth_opts());
  CHECK(one.record.meta.kind == PressureKind::dynamic);
  CHECK(one.modes[0].T0 == doctest::Approx(g / std::cosh(2.0)).epsilon(1e-10));
  CHECK(one.periods_in_record[0] == doctest::Approx(std::round(one.periods_in_record[0])));
  const auto [amp, psi] = oracle::tone(one.record.t, one.record.p, one.modes[0].omega);
  CHECK(amp == doctest::Approx(1000 * g / std::cosh(2.0)).epsilon(1e-9));
  CHECK(psi == doctest::Approx(0).scale(1));
  // preprocess returns the per-density dynamic signal
  const auto kin = preprocess(one.record);
  for (Eigen::Index i = 0; i < kin.size(); i += 13)
    CHECK(kin.p[i] == doctest::Approx(one.record.p[i] / 1000).epsilon(1e-12));

  // superposition
  auto so = synth_opts();
  const auto a = synthesize_record({{1, 0.5, 0.2}}, shear, nullptr, so);
  so.duration = a.duration;
  so.dt = a.record.dt();
  // a silent k = 1 mode keeps the record length
  const auto b = synthesize_record({{1, 0.0, 0.0}, {2, 0.2, -1.0}}, shear, nullptr, so);
  const auto ab = synthesize_record({{1, 0.5, 0.2}, {2, 0.2, -1.0}}, shear, nullptr, so);
  REQUIRE(ab.record.size() == a.record.size());
  REQUIRE(ab.record.size() == b.record.size());
  CHECK((ab.record.p - a.record.p - b.record.p).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("spectral reconstruction of a single mode") {
  const auto shear = ShearProfile::zero(2);
  const auto s = synthesize_record({{1, 1, 0.4}}, shear, nullptr, synth_opts());
  const auto r = reconstruct_spectral(s.record, shear, nullptr);
  CHECK(r.method == ReconstructMethod::spectral);
  CHECK(r.max_amplification == 100);
  CHECK(r.eta.size() == s.record.size());
  const auto [amp, psi] = oracle::tone(r.t, r.eta, s.modes[0].omega);
  CHECK(amp == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(psi == doctest::Approx(-0.4).epsilon(1e-6));
  for (Eigen::Index i = 0; i < r.t.size(); i += 11)
    CHECK(r.eta[i] == doctest::Approx(std::cos(s.modes[0].omega * r.t[i] - 0.4)).scale(1).epsilon(1e-6));

  const auto h = reconstruct_hydrostatic(s.record);
  CHECK(oracle::tone(h.t, h.eta, s.modes[0].omega).first ==
        doctest::Approx(1 / std::cosh(2.0)).epsilon(1e-9));
}

TEST_CASE("per-mode gains match the constant-vorticity closed form") {
  const auto shear = ShearProfile::linear(-5, 2);
  auto so = synth_opts();
  so.duration = 60;
  const auto s = synthesize_record({{0.5, 0.3, 0}, {2, 0.05, 1}}, shear, nullptr, so);
  const auto r = reconstruct_spectral(s.record, shear, nullptr);
  for (double k : {0.5, 2.0}) {
    const double c = oracle::c_gamma(-5, k, 2, g);
    const double omega = k * c;
    const auto it = std::min_element(r.per_mode.begin(), r.per_mode.end(),
                                      [&](const ModeGain& a, const ModeGain& b) {
                                        return std::abs(a.omega - omega) < std::abs(b.omega - omega);
                                      });
    REQUIRE(it != r.per_mode.end());
    // gain at the bin's own wavenumber
    const double c_bin = oracle::c_gamma(-5, it->k, 2, g);
    CHECK(it->omega == doctest::Approx(it->k * c_bin).epsilon(1e-9));
    CHECK(it->gain == doctest::Approx(1 / oracle::T_gamma(0, -5, it->k, 2, c_bin)).epsilon(1e-6));
  }
}

TEST_CASE("amplification cap drops short waves and the result is the kept spectrum") {
  const auto shear = ShearProfile::zero(2);
  const auto s = synthesize_record({{1, 1, 0}, {3, 0.01, 0}}, shear, nullptr, synth_opts());
  ReconstructOptions ro;
  ro.max_amplification = 10;
  const auto r = reconstruct_spectral(s.record, shear, nullptr, ro);
  CHECK(r.max_amplification == 10);
  int kept = 0, dropped = 0;
  for (const auto& m : r.per_mode) {
    if (m.kept) {
      ++kept;
      CHECK(std::abs(m.gain) * g <= 10);
    } else {
      ++dropped;
      CHECK(m.amplitude == 0.0);
    }
  }
  CHECK(kept > 0);
  CHECK(dropped > 0);
  // eta is the sum of the kept components
  for (Eigen::Index i = 0; i < r.t.size(); i += 29) {
    double sum = 0;
    for (const auto& m : r.per_mode)
      if (m.kept) sum += m.amplitude * std::cos(m.omega * r.t[i] + m.psi);
    CHECK(r.eta[i] == doctest::Approx(sum).scale(1).epsilon(1e-9));
  }
  // the same call is bit-reproducible
  const auto again = reconstruct_spectral(s.record, shear, nullptr, ro);
  CHECK((again.eta.array() == r.eta.array()).all());
}

TEST_CASE("long waves: spectral and hydrostatic agree") {
  const auto shear = ShearProfile::zero(2);
  auto so = synth_opts();
  so.duration = 150;
  so.dt = 0.1;
  const auto s = synthesize_record({{0.01, 1, 0}}, shear, nullptr, so);
  const auto a = reconstruct_spectral(s.record, shear, nullptr);
  const auto b = reconstruct_hydrostatic(s.record);
  CHECK((a.eta - b.eta).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("a record for a different depth is refused") {
  const auto s = synthesize_record({{1, 1, 0}}, ShearProfile::zero(2), nullptr, synth_opts());
  CHECK_THROWS_AS(reconstruct_spectral(s.record, ShearProfile::zero(3), nullptr), Error);
}
