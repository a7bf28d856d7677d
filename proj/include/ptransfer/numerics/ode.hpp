#pragma once

// Adaptive Dormand-Prince 5(4) integrator with first-same-as-last stages.
//
// The integrator walks through a list of output stations and lands exactly on
// each of them; the step-size controller keeps its own prediction so that a
// step shortened to hit a station does not shrink the following steps.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "ptransfer/error.hpp"

namespace ptransfer::numerics {

template <typename Scalar>
struct OdeOptions {
  Scalar rtol = Scalar(1e-10);
  Scalar atol = Scalar(1e-12);
  long max_steps = 1'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

namespace detail {

template <typename Scalar>
struct DormandPrinceTableau {
  static constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5,
                          c5 = Scalar(8) / 9;
  static constexpr Scalar a21 = Scalar(1) / 5;
  static constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  static constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  static constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                          a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  static constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                          a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                          a65 = Scalar(-5103) / 18656;
  static constexpr Scalar b1 = Scalar(35) / 384, b3 = Scalar(500) / 1113, b4 = Scalar(125) / 192,
                          b5 = Scalar(-2187) / 6784, b6 = Scalar(11) / 84;
  static constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695,
                          e4 = Scalar(71) / 1920, e5 = Scalar(-17253) / 339200,
                          e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
};

}  // namespace detail

/// Integrates y' = rhs(t, y) from (t0, y0) through every station in `stations`
/// (monotone, all on the same side of t0) and calls observe(t, y) on arrival.
/// Returns the state at the last station.
template <typename Scalar, int Dim, typename Rhs, typename Observer>
Eigen::Matrix<Scalar, Dim, 1> integrate(Rhs&& rhs, Scalar t0, Eigen::Matrix<Scalar, Dim, 1> y0,
                                        std::span<const Scalar> stations, Observer&& observe,
                                        const OdeOptions<Scalar>& opts = {},
                                        OdeStats* stats = nullptr) {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  using T = detail::DormandPrinceTableau<Scalar>;
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  OdeStats local;
  OdeStats& st = stats ? *stats : local;
  if (stations.empty()) return y0;

  const Scalar t_end = stations.back();
  const Scalar dir = t_end >= t0 ? Scalar(1) : Scalar(-1);
  const Scalar span = abs(t_end - t0);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  Scalar t = t0;
  State y = y0;
  State k1 = rhs(t, y);
  ++st.evaluations;

  auto error_scale = [&](const State& a, const State& b) {
    return (opts.atol + opts.rtol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix();
  };

  // Initial step from the derivative scale (Hairer, Norsett & Wanner II.4).
  Scalar h;
  {
    const State sc = error_scale(y, y);
    const Scalar d0 = sqrt((y.array() / sc.array()).square().mean());
    const Scalar d1 = sqrt((k1.array() / sc.array()).square().mean());
    Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) * max(span, Scalar(1))
                                                         : Scalar(0.01) * d0 / d1;
    h0 = min(h0, span);
    const State k2 = rhs(t + dir * h0, (y + dir * h0 * k1).eval());
    ++st.evaluations;
    const Scalar d2 = sqrt((((k2 - k1).array() / sc.array())).square().mean()) / h0;
    const Scalar dm = max(d1, d2);
    const Scalar h1 = dm <= Scalar(1e-15) ? max(Scalar(1e-6), h0 * Scalar(1e-3))
                                          : pow(Scalar(0.01) / dm, Scalar(0.2));
    h = min(Scalar(100) * h0, h1);
    h = min(h, span);
    if (!(h > 0)) h = span;
  }

  bool last_rejected = false;
  std::size_t next = 0;
  while (next < stations.size() && dir * (stations[next] - t) <= 0) {
    observe(stations[next], y);
    ++next;
  }

  while (next < stations.size()) {
    if (st.accepted + st.rejected >= opts.max_steps)
      throw Error(Errc::convergence, "ODE integration exceeded the maximum number of steps");
    const Scalar target = stations[next];
    const Scalar remaining = abs(target - t);
    const bool lands = h >= remaining * (Scalar(1) - Scalar(4) * eps);
    const Scalar step = lands ? remaining : h;
    if (step <= Scalar(10) * eps * max(abs(t), Scalar(1)))
      throw Error(Errc::convergence, "ODE step size underflow");
    const Scalar hs = dir * step;

    const State k2 = rhs(t + T::c2 * hs, (y + hs * (T::a21 * k1)).eval());
    const State k3 = rhs(t + T::c3 * hs, (y + hs * (T::a31 * k1 + T::a32 * k2)).eval());
    const State k4 =
        rhs(t + T::c4 * hs, (y + hs * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3)).eval());
    const State k5 = rhs(t + T::c5 * hs, (y + hs * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 +
                                                    T::a54 * k4))
                                             .eval());
    const State k6 = rhs(t + hs, (y + hs * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 +
                                            T::a64 * k4 + T::a65 * k5))
                                     .eval());
    const Scalar t_new = lands ? target : t + hs;
    const State y_new =
        y + hs * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
    const State k7 = rhs(t_new, y_new);
    st.evaluations += 6;

    const State err =
        hs * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);
    const State sc = error_scale(y, y_new);
    const Scalar err_norm = sqrt((err.array() / sc.array()).square().mean());
    if (!std::isfinite(static_cast<double>(err_norm)))
      throw Error(Errc::convergence, "non-finite state in ODE integration");

    Scalar factor = err_norm == 0 ? Scalar(5) : Scalar(0.9) * pow(err_norm, Scalar(-0.2));
    if (err_norm <= 1) {
      factor = min(factor, last_rejected ? Scalar(1) : Scalar(5));
      factor = max(factor, Scalar(0.2));
      ++st.accepted;
      t = t_new;
      y = y_new;
      k1 = k7;
      last_rejected = false;
      // A shortened landing step keeps the previous prediction.
      h = lands && step < h ? max(h, step * factor) : step * factor;
      if (lands) {
        observe(t, y);
        ++next;
      }
    } else {
      ++st.rejected;
      last_rejected = true;
      h = step * max(Scalar(0.2), factor);
    }
  }
  return y;
}

/// Convenience overload: integrate to a single end point.
template <typename Scalar, int Dim, typename Rhs>
Eigen::Matrix<Scalar, Dim, 1> integrate(Rhs&& rhs, Scalar t0, Eigen::Matrix<Scalar, Dim, 1> y0,
                                        Scalar t1, const OdeOptions<Scalar>& opts = {},
                                        OdeStats* stats = nullptr) {
  const Scalar station[1] = {t1};
  return integrate<Scalar, Dim>(std::forward<Rhs>(rhs), t0, std::move(y0),
                                std::span<const Scalar>(station, 1),
                                [](Scalar, const Eigen::Matrix<Scalar, Dim, 1>&) {}, opts, stats);
}

}  // namespace ptransfer::numerics
