#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "ptransfer/dispersion.hpp"
#include "ptransfer/transfer.hpp"
#include "ptransfer/twofluid.hpp"

using namespace ptransfer;

namespace {
constexpr double g = 9.81;
constexpr double inf = std::numeric_limits<double>::infinity();

TwoFluidEnv still(double h0, double H, double rm, double rp, double sigma = 0) {
  TwoFluidEnv env{ShearProfile::zero(h0),
                  ShearProfile({shear::Zero{}}, h0, std::isinf(H) ? 2 * h0 : H)};
  env.rho_minus = rm;
  env.rho_plus = rp;
  env.h0 = h0;
  env.H = H;
  env.sigma = sigma;
  env.g = g;
  return env;
}
}  // namespace

TEST_CASE("still layers under a lid: sinh modes") {
  const double k = 1.2, h0 = 1, H = 2.5;
  const auto env = still(h0, H, 1000, 950);
  const auto m = solve_two_layer_modes(env, 0.5, k);
  CHECK(m.lower.phi[m.lower.size() - 1] == k);
  CHECK(m.upper.phi[0] == k);
  for (Eigen::Index i = 0; i < m.lower.size(); ++i)
    CHECK(m.lower.phi[i] ==
          doctest::Approx(k * std::sinh(k * m.lower.y[i]) / std::sinh(k * h0)).scale(k).epsilon(1e-9));
  for (Eigen::Index i = 0; i < m.upper.size(); ++i)
    CHECK(m.upper.phi[i] == doctest::Approx(k * std::sinh(k * (H - m.upper.y[i])) /
                                            std::sinh(k * (H - h0)))
                                .scale(k)
                                .epsilon(1e-9));
}

TEST_CASE("unbounded upper layer decays exponentially") {
  const double k = 0.8, h0 = 1;
  const auto env = still(h0, inf, 1000, 1.2);
  const auto m = solve_two_layer_modes(env, 0.9, k);
  CHECK(m.y_trunc >= h0 + 10 / k);
  const double y = h0 + 3 / k;
  Eigen::Index best = 0;
  for (Eigen::Index i = 0; i < m.upper.size(); ++i)
    if (std::abs(m.upper.y[i] - y) < std::abs(m.upper.y[best] - y)) best = i;
  const double yy = m.upper.y[best];
  CHECK(m.upper.phi[best] == doctest::Approx(k * std::exp(-k * (yy - h0))).epsilon(1e-6));
}

TEST_CASE("two-layer dispersion relation") {
  for (double sigma : {0.0, 0.07})
    for (double k : {0.4, 2.0}) {
      const auto env = still(1, 3, 1000, 900, sigma);
      const auto d = two_fluid_dispersion(env, k);
      CHECK(d.c == doctest::Approx(oracle::c_two_layer(k, 1, 3, 1000, 900, sigma, g)).epsilon(1e-8));
      const auto t = interface_transfer(env, solve_two_layer_modes(env, d.c, k));
      CHECK(t.lower == doctest::Approx(d.c * d.c * k / std::tanh(k)).epsilon(1e-8));
    }
}

TEST_CASE("a vanishing upper layer gives back the free-surface waves") {
  TwoFluidEnv env = still(2, inf, 1000, 1000e-8);
  CHECK(two_fluid_dispersion(env, 1).c == doctest::Approx(oracle::c_zero(1, 2, g)).epsilon(1e-6));
  env.lower = ShearProfile::linear(-1, 2);
  CHECK(two_fluid_dispersion(env, 1).c ==
        doctest::Approx(oracle::c_gamma(-1, 1, 2, g)).epsilon(1e-6));
}

TEST_CASE("layer transfer functions") {
  const auto env = still(1, 3, 1000, 900);
  const auto d = two_fluid_dispersion(env, 1);
  const auto m = solve_two_layer_modes(env, d.c, 1);
  const auto [lo, up] = transfer_two_fluid(env, m);
  CHECK(lo.kind == TransferKind::two_fluid_lower);
  CHECK(up.kind == TransferKind::two_fluid_upper);
  const auto t = interface_transfer(env, m);
  CHECK(lo.T[lo.T.size() - 1] == doctest::Approx(t.lower));
  CHECK(up.T[0] == doctest::Approx(t.upper));
  // bed pressure relative to the interface value: 1 / cosh(k h0)
  CHECK(lo.T0 / t.lower == doctest::Approx(1 / std::cosh(1.0)).epsilon(1e-9));
}

TEST_CASE("generalized Burns speed") {
  const auto lower = ShearProfile::zero(1);
  const ShearProfile upper({shear::Zero{}}, 1, 3);
  CHECK(generalized_burns_speed(lower, upper, 1000, 500, false) ==
        doctest::Approx(std::sqrt(500 * 2 + 1000 * 1)).epsilon(1e-12));
  CHECK(generalized_burns_speed(lower, ShearProfile({shear::Zero{}}, 1, 2), 1000, 1000, false) ==
        doctest::Approx(std::sqrt(2 * 1000 * 1)).epsilon(1e-12));
  const auto env = still(1, 3, 1000, 500);
  CHECK(generalized_burns_speed(env) == doctest::Approx(std::sqrt(g * (1 + 0.5 * 2))).epsilon(1e-12));
  auto light = still(2, inf, 1000, 0);
  light.lower = ShearProfile::linear(1, 2);
  CHECK(generalized_burns_speed(light) ==
        doctest::Approx(oracle::burns_linear(1, 2, g)).epsilon(1e-10));
  try {
    generalized_burns_speed(still(1, inf, 1000, 1));
    FAIL("expected an integrability error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::integrability);
  }
}

TEST_CASE("interface hydrostatic rule") {
  auto env = still(1, 3, 1000, 0);
  CHECK(interface_hydrostatic(9.81, 0, env) == doctest::Approx(1.0));
  CHECK(interface_hydrostatic(0, 0, env) == 0.0);
  env.rho_plus = 500;
  CHECK(interface_hydrostatic(9.81, 0, env) == doctest::Approx(2.0));
  env.rho_plus = 1000;
  CHECK_THROWS_AS(interface_hydrostatic(1, 0, env), Error);
}

TEST_CASE("environment validation") {
  CHECK_NOTHROW(still(1, 3, 1000, 900).validate());
  CHECK_THROWS_AS(still(1, 1, 1000, 900).validate(), Error);
  CHECK_THROWS_AS(still(1, 3, 0, 0).validate(), Error);
  CHECK_THROWS_AS(still(1, 3, 1000, -1).validate(), Error);
  CHECK_THROWS_AS(still(1, 3, 1000, 0, -0.1).validate(), Error);
  CHECK(still(1, 3, 1000, 900).warnings().empty());
  CHECK_FALSE(still(1, 3, 900, 1000).warnings().empty());
}
