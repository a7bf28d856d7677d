#include <doctest.h>

#include <cmath>

#include "ptransfer/numerics/brent.hpp"
#include "ptransfer/numerics/ode.hpp"
#include "ptransfer/numerics/quadrature.hpp"
#include "ptransfer/numerics/spline.hpp"

using namespace ptransfer;
using numerics::NaturalCubicSpline;

TEST_CASE("brent finds the root of a cubic") {
  auto f = [](double x) { return x * x * x - 2 * x - 5; };
  const auto r = numerics::brent<double>(f, 2.0, 3.0, 1e-14);
  CHECK(r.root == doctest::Approx(2.0945514815423265).epsilon(1e-14));
  CHECK(r.iterations < 20);
}

TEST_CASE("brent rejects an unbracketed interval") {
  auto f = [](double x) { return x * x + 1; };
  CHECK_THROWS_AS(numerics::brent<double>(f, -1.0, 1.0, 1e-12), Error);
}

TEST_CASE("Dormand-Prince integrates harmonic motion") {
  using V = Eigen::Vector2d;
  auto rhs = [](double, const V& y) { return V(y[1], -y[0]); };
  numerics::OdeOptions<double> opts;
  opts.rtol = 1e-12;
  opts.atol = 1e-14;
  const V end = numerics::integrate<double, 2>(rhs, 0.0, V(0, 1), 10.0, opts);
  CHECK(end[0] == doctest::Approx(std::sin(10.0)).epsilon(1e-10));
  CHECK(end[1] == doctest::Approx(std::cos(10.0)).epsilon(1e-10));
}

TEST_CASE("Dormand-Prince hits every station and runs backwards") {
  using V = Eigen::Matrix<double, 1, 1>;
  auto rhs = [](double, const V& y) { return V(y[0]); };
  const double stations[] = {1.5, 1.0, 0.25, 0.0};
  std::vector<double> seen;
  numerics::integrate<double, 1>(rhs, 2.0, V(std::exp(2.0)), std::span<const double>(stations),
                                 [&](double t, const V& y) {
                                   seen.push_back(t);
                                   CHECK(y[0] == doctest::Approx(std::exp(t)).epsilon(1e-9));
                                 });
  CHECK(seen == std::vector<double>{1.5, 1.0, 0.25, 0.0});
}

TEST_CASE("Gauss-Kronrod handles a kink at a declared break") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  const auto r = numerics::integrate_adaptive<double>(f, 0.0, 1.0, 1e-13, 0.0, {0.3});
  CHECK(r.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-13));
  const auto s = numerics::integrate_adaptive<double>([](double x) { return 1 / (1 + x * x); },
                                                      0.0, 1.0, 1e-13);
  CHECK(s.value == doctest::Approx(M_PI / 4).epsilon(1e-13));
}

TEST_CASE("natural cubic spline reproduces straight lines and finds maxima") {
  Eigen::VectorXd x(5), y(5);
  x << 0, 0.5, 1.2, 2, 3;
  y = 2 * x.array() - 1;
  const NaturalCubicSpline<double> line(x, y);
  CHECK(line(0.8) == doctest::Approx(0.6));
  CHECK(line.derivative(2.2) == doctest::Approx(2.0));

  Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(41, 0, M_PI);
  Eigen::VectorXd ys = xs.array().sin();
  const NaturalCubicSpline<double> bump(xs, ys);
  const auto [xm, ym] = bump.maximum();
  CHECK(xm == doctest::Approx(M_PI / 2).epsilon(1e-4));
  CHECK(ym == doctest::Approx(1.0).epsilon(1e-5));
}
