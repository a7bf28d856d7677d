#include <doctest.h>

#include <cmath>

#include "ptransfer/error.hpp"
#include "ptransfer/profiles.hpp"

using namespace ptransfer;

TEST_CASE("shear profile values") {
  CHECK(ShearProfile::zero(2).U(1.0) == 0.0);
  const auto lin = ShearProfile::linear(-5, 2);
  CHECK(lin.U(2.0) == 0.0);
  CHECK(lin.U(0.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(lin.U(2.5), Error);
  CHECK_THROWS_AS(lin.U(-0.1), Error);
}

TEST_CASE("shear derivatives and one-sided slopes") {
  const auto lin = ShearProfile::linear(-5, 2);
  CHECK(lin.derivs(1.0).dU == -5.0);
  CHECK(lin.derivs(1.0).d2U == 0.0);
  CHECK(ShearProfile::zero(2).derivs(0.5).dU == 0.0);

  const auto pw = ShearProfile::piecewise(1, 3, 1, 2);
  CHECK(pw.derivs(0.5).dU == 1.0);
  CHECK(pw.derivs(1.5).dU == 3.0);
  CHECK(pw.derivs(1.0, Side::below).dU == 1.0);
  CHECK(pw.derivs(1.0, Side::above).dU == 3.0);
  try {
    pw.derivs(1.0);
    FAIL("expected an ambiguity error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ambiguous_side);
  }
  CHECK(pw.breakpoints() == std::vector<double>{1.0});
  // continuous at h1, U(h0) = (gm - gp)(h1 - h0)
  CHECK(pw.U(1.0) == doctest::Approx(-1.0));
  CHECK(pw.U(2.0) == doctest::Approx(2.0));
}

TEST_CASE("maximum of the current") {
  CHECK(ShearProfile::zero(2).max_U() == 0.0);
  const auto fav = ShearProfile::linear(-5, 2);
  CHECK(fav.max_U() == doctest::Approx(10.0));
  CHECK(fav.argmax_U() == 0.0);
  const auto adv = ShearProfile::linear(5, 2);
  CHECK(adv.max_U() == doctest::Approx(0.0));
  CHECK(adv.argmax_U() == doctest::Approx(2.0));
}

TEST_CASE("tabulated current interpolates and locates an interior maximum") {
  std::vector<Sample> s;
  for (int i = 0; i <= 20; ++i) {
    const double y = 0.1 * i;
    s.emplace_back(y, std::sin(M_PI * y / 2));
  }
  const auto tab = ShearProfile::tabulated(s, 2);
  CHECK(tab.U(0.55) == doctest::Approx(std::sin(M_PI * 0.55 / 2)).epsilon(1e-4));
  CHECK(tab.max_U() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(tab.argmax_U() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_FALSE(tab.curvature_free());
  CHECK(ShearProfile::piecewise(1, 3, 1, 2).curvature_free());
}

TEST_CASE("invalid profiles are rejected") {
  CHECK_THROWS_AS(ShearProfile::piecewise(1, 3, 2.5, 2), Error);
  CHECK_THROWS_AS(ShearProfile::piecewise(1, 3, 0.0, 2), Error);
  CHECK_THROWS_AS(ShearProfile::tabulated({{0, 0}, {1, 1}, {2, 0}}, 2), Error);
  CHECK_THROWS_AS(ShearProfile::tabulated({{0, 0}, {1, 1}, {0.5, 1}, {2, 0}}, 2), Error);
  CHECK_THROWS_AS(ShearProfile::zero(-1), Error);
}

TEST_CASE("density profiles") {
  const auto c = DensityProfile::constant(1000, 2);
  CHECK(c.R(1) == 1000);
  CHECK(c.dR(1) == 0);
  CHECK(c.is_constant());
  const auto e = DensityProfile::exponential(0.1, 2);
  CHECK(e.R(0) == doctest::Approx(1.0));
  CHECK(e.dR(0) == doctest::Approx(-0.2));
  CHECK(e.R(2) == doctest::Approx(std::exp(-0.4)));
  CHECK(e.R(2) == doctest::Approx(0.6703).epsilon(1e-4));
  CHECK_THROWS_AS(e.R(3), Error);
  // density must not increase upward
  CHECK_THROWS_AS(DensityProfile({density::Tabulated{{{0, 1}, {0.5, 1.1}, {1, 1.2}, {2, 1.3}}}}, 2),
                  Error);
  CHECK_THROWS_AS(DensityProfile::constant(-1, 2), Error);
}
