#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "ptransfer/error.hpp"

namespace ptransfer::numerics {

template <typename Scalar>
struct RootResult {
  Scalar root;
  Scalar value;
  int iterations;
};

/// Brent's bracketed root finder (zeroin). `f(a)` and `f(b)` must differ in
/// sign; the returned root is within 2*eps*|x| + tol of a sign change.
template <typename Scalar, typename F>
RootResult<Scalar> brent(F&& f, Scalar a, Scalar b, Scalar fa, Scalar fb, Scalar tol,
                         int max_iterations = 200) {
  using std::abs;
  if (fa == 0) return {a, fa, 0};
  if (fb == 0) return {b, fb, 0};
  if ((fa > 0) == (fb > 0))
    throw Error(Errc::no_root, "Brent: interval does not bracket a sign change");

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar c = a, fc = fa, d = b - a, e = d;
  for (int it = 1; it <= max_iterations; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (abs(fc) < abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const Scalar tol1 = 2 * eps * abs(b) + tol / 2;
    const Scalar m = (c - b) / 2;
    if (abs(m) <= tol1 || fb == 0) return {b, fb, it};

    if (abs(e) >= tol1 && abs(fa) > abs(fb)) {
      Scalar p, q;
      const Scalar s = fb / fa;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        const Scalar qq = fa / fc, r = fb / fc;
        p = s * (2 * m * qq * (qq - r) - (b - a) * (r - 1));
        q = (qq - 1) * (r - 1) * (s - 1);
      }
      if (p > 0)
        q = -q;
      else
        p = -p;
      if (2 * p < std::min(3 * m * q - abs(tol1 * q), abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += abs(d) > tol1 ? d : (m > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw Error(Errc::convergence, "Brent: maximum iterations reached");
}

template <typename Scalar, typename F>
RootResult<Scalar> brent(F&& f, Scalar a, Scalar b, Scalar tol, int max_iterations = 200) {
  const Scalar fa = f(a);
  const Scalar fb = f(b);
  return brent<Scalar>(std::forward<F>(f), a, b, fa, fb, tol, max_iterations);
}

}  // namespace ptransfer::numerics
