#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ptransfer/dispersion.hpp"

using namespace ptransfer;

namespace {
constexpr double g = 9.81;
}

TEST_CASE("closed forms") {
  CHECK(closed_form_c_zero(1, 2, g) == doctest::Approx(3.0753).epsilon(1e-4));
  CHECK(closed_form_c_zero(1e-6, 2, g) == doctest::Approx(std::sqrt(19.62)).epsilon(1e-9));
  CHECK(closed_form_c_zero(50, 2, g) == doctest::Approx(std::sqrt(9.81 / 50)).epsilon(1e-9));
  CHECK(closed_form_c_const_vorticity(0, 1.3, 2, g) == doctest::Approx(closed_form_c_zero(1.3, 2, g)));
  const double t = std::tanh(2.0);
  CHECK(closed_form_c_const_vorticity(-5, 1, 2, g) ==
        doctest::Approx(5 * t / 2 + std::sqrt(25 * t * t / 4 + g * t)));
  CHECK(closed_form_c_const_vorticity(-5, 1, 2, g) == doctest::Approx(6.317).epsilon(1e-3));
  CHECK(closed_form_c_const_vorticity(5, 1, 2, g) < closed_form_c_zero(1, 2, g));
}

TEST_CASE("numerical roots match the closed forms") {
  const auto d = find_wave_speed(ShearProfile::zero(2), nullptr, 1, g);
  CHECK(d.c == doctest::Approx(oracle::c_zero(1, 2, g)).epsilon(1e-10));
  CHECK(std::abs(d.residual) < 1e-10);
  CHECK(d.roots.size() == 1);
  const auto v = find_wave_speed(ShearProfile::linear(-5, 2), nullptr, 1, g);
  CHECK(v.c == doctest::Approx(oracle::c_gamma(-5, 1, 2, g)).epsilon(1e-10));
}

TEST_CASE("favourable currents speed waves up") {
  const double plus = find_wave_speed(ShearProfile::linear(2, 2), nullptr, 1, g).c;
  const double zero = find_wave_speed(ShearProfile::zero(2), nullptr, 1, g).c;
  const double minus = find_wave_speed(ShearProfile::linear(-2, 2), nullptr, 1, g).c;
  CHECK(minus > zero);
  CHECK(zero > plus);
}

TEST_CASE("sweep and bracket hint") {
  const auto shear = ShearProfile::linear(1, 1.5);
  const auto sweep = dispersion_sweep(shear, nullptr, {0.5, 1, 2}, g);
  REQUIRE(sweep.size() == 3);
  for (const auto& d : sweep) CHECK(d.c == doctest::Approx(oracle::c_gamma(1, d.k, 1.5, g)));
  DispersionOptions hint;
  hint.bracket_hint = std::make_pair(2.0, 4.0);
  CHECK(find_wave_speed(shear, nullptr, 1, g, hint).c ==
        doctest::Approx(oracle::c_gamma(1, 1, 1.5, g)).epsilon(1e-10));
  hint.bracket_hint = std::make_pair(5.0, 6.0);
  CHECK_THROWS_AS(find_wave_speed(shear, nullptr, 1, g, hint), Error);
}

TEST_CASE("missing roots are reported with the scan") {
  DispersionOptions opts;
  opts.c_upper = 1.0;
  try {
    find_wave_speed(ShearProfile::zero(2), nullptr, 1, g, opts);
    FAIL("expected a no-root error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_root);
    CHECK(std::string(e.what()).find("scan") != std::string::npos);
  }
}

TEST_CASE("stratified roots: the surface mode sits above the internal ones") {
  const oracle::Exponential e{1.5, 3, 2, g};
  const auto dens = DensityProfile::exponential(1.5, 2);
  const auto d = find_wave_speed(ShearProfile::zero(2), &dens, 3, g);
  CHECK(d.roots.size() > 1);
  CHECK(d.c == doctest::Approx(oracle::largest_root([&](double c) { return e.dispersion(c); },
                                                    0.05, 30))
                   .epsilon(1e-9));
}

TEST_CASE("stagnation criterion") {
  const auto s = stagnation_condition(-5, 1, 2, g);
  CHECK(s.stagnation);
  const double t = std::tanh(2.0);
  CHECK(s.threshold == doctest::Approx(g * t / (4 - 2 * t)));
  CHECK(s.threshold == doctest::Approx(4.5644).epsilon(1e-4));
  CHECK_FALSE(stagnation_condition(5, 1, 2, g).stagnation);
  CHECK_FALSE(stagnation_condition(-0.1, 1, 2, g).stagnation);
  // k h0^2 = h0 tanh(k h0) only as k h0 -> 0
  CHECK_THROWS_AS(stagnation_condition(-1, 1e-12, 1e-6, g), Error);
}

TEST_CASE("Burns speeds") {
  const auto zero = burns_speed(ShearProfile::zero(2), g);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == doctest::Approx(std::sqrt(19.62)).epsilon(1e-13));
  const auto lin = burns_speed(ShearProfile::linear(1, 2), g);
  REQUIRE(!lin.empty());
  CHECK(lin.back() == doctest::Approx(-1 + std::sqrt(1 + 19.62)).epsilon(1e-12));
  CHECK(lin.back() == doctest::Approx(oracle::burns_linear(1, 2, g)).epsilon(1e-12));
  for (double gamma : {0.0, 1.0, -1.0}) {
    const auto shear = gamma == 0 ? ShearProfile::zero(2) : ShearProfile::linear(gamma, 2);
    const double c = find_wave_speed(shear, nullptr, 1e-4, g).c;
    CHECK(std::abs(c - burns_speed(shear, g).back()) / c < 1e-3);
  }
}
