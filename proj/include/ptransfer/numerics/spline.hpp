#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <utility>

#include "ptransfer/error.hpp"

namespace ptransfer::numerics {

/// Natural cubic spline (zero second derivative at both ends).
template <typename Scalar>
class NaturalCubicSpline {
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  NaturalCubicSpline() = default;

  NaturalCubicSpline(Vector x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
    const Eigen::Index n = x_.size();
    if (n < 2 || y_.size() != n)
      throw Error(Errc::invalid_argument, "spline needs at least two matching samples");
    for (Eigen::Index i = 0; i + 1 < n; ++i)
      if (!(x_[i + 1] > x_[i]))
        throw Error(Errc::invalid_argument, "spline abscissae must be strictly increasing");

    // Thomas algorithm on the interior second derivatives.
    m_ = Vector::Zero(n);
    if (n > 2) {
      const Eigen::Index k = n - 2;
      Vector diag(k), upper(k), rhs(k);
      for (Eigen::Index i = 1; i <= k; ++i) {
        const Scalar hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        diag[i - 1] = (hl + hr) / 3;
        upper[i - 1] = hr / 6;
        rhs[i - 1] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
      }
      for (Eigen::Index i = 1; i < k; ++i) {
        const Scalar lower = (x_[i + 1] - x_[i]) / 6;  // h_i / 6, below the diagonal
        const Scalar w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
      }
      m_[k] = rhs[k - 1] / diag[k - 1];
      for (Eigen::Index i = k - 1; i >= 1; --i)
        m_[i] = (rhs[i - 1] - upper[i - 1] * m_[i + 1]) / diag[i - 1];
    }
  }

  Scalar lower() const { return x_[0]; }
  Scalar upper() const { return x_[x_.size() - 1]; }
  const Vector& knots() const { return x_; }
  const Vector& values() const { return y_; }
  const Vector& second_derivatives() const { return m_; }

  Scalar operator()(Scalar x) const { return eval(x, 0); }
  Scalar derivative(Scalar x, int order = 1) const { return eval(x, order); }

  /// Maximum of the interpolant on [lo, hi] with its location. Each piece is
  /// a cubic, so the candidates are the end points, the knots, and the real
  /// roots of the piecewise quadratic derivative.
  std::pair<Scalar, Scalar> maximum(Scalar lo, Scalar hi) const {
    Scalar arg = lo, val = eval(lo, 0);
    auto consider = [&](Scalar x) {
      if (x < lo || x > hi) return;
      const Scalar v = eval(x, 0);
      if (v > val) {
        val = v;
        arg = x;
      }
    };
    consider(hi);
    for (Eigen::Index i = 0; i < x_.size(); ++i) consider(x_[i]);
    for (Eigen::Index i = 0; i + 1 < x_.size(); ++i) {
      const Scalar h = x_[i + 1] - x_[i];
      // S'(x_i + s) = qa s^2 + qb s + qc on [0, h]
      const Scalar qa = (m_[i + 1] - m_[i]) / (2 * h);
      const Scalar qb = m_[i];
      const Scalar qc = (y_[i + 1] - y_[i]) / h - h * (2 * m_[i] + m_[i + 1]) / 6;
      if (qa == 0) {
        if (qb != 0) {
          const Scalar s = -qc / qb;
          if (s > 0 && s < h) consider(x_[i] + s);
        }
        continue;
      }
      const Scalar disc = qb * qb - 4 * qa * qc;
      if (disc < 0) continue;
      const Scalar sq = std::sqrt(disc);
      const Scalar q = -(qb + (qb >= 0 ? sq : -sq)) / 2;
      for (Scalar s : {q != 0 ? qc / q : Scalar(-1), q / qa})
        if (s > 0 && s < h) consider(x_[i] + s);
    }
    return {arg, val};
  }

  std::pair<Scalar, Scalar> maximum() const { return maximum(lower(), upper()); }

private:
  Scalar eval(Scalar x, int order) const {
    const Eigen::Index n = x_.size();
    const Scalar* begin = x_.data();
    Eigen::Index i = std::upper_bound(begin, begin + n, x) - begin - 1;
    i = std::clamp<Eigen::Index>(i, 0, n - 2);
    const Scalar h = x_[i + 1] - x_[i];
    const Scalar a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
    switch (order) {
      case 0:
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6;
      case 1:
        return (y_[i + 1] - y_[i]) / h - (3 * a * a - 1) * h * m_[i] / 6 +
               (3 * b * b - 1) * h * m_[i + 1] / 6;
      case 2:
        return a * m_[i] + b * m_[i + 1];
      default:
        return Scalar(0);
    }
  }

  Vector x_, y_, m_;
};

}  // namespace ptransfer::numerics
