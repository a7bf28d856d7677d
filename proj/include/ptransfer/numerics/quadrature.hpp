#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "ptransfer/error.hpp"

namespace ptransfer::numerics {

template <typename Scalar>
struct QuadratureResult {
  Scalar value;
  Scalar error;
  int intervals;
};

namespace detail {

template <typename Scalar>
struct Kronrod15 {
  static constexpr std::array<Scalar, 8> xk = {
      Scalar(0.991455371120812639206854697526329),
      Scalar(0.949107912342758524526189684047851),
      Scalar(0.864864423359769072789712788640926),
      Scalar(0.741531185599394439863864773280788),
      Scalar(0.586087235467691130294144845693013),
      Scalar(0.405845151377397166906606412076961),
      Scalar(0.207784955007898467600689403773245),
      Scalar(0)};
  static constexpr std::array<Scalar, 8> wk = {
      Scalar(0.022935322010529224963732008058970),
      Scalar(0.063092092629978553290700663189204),
      Scalar(0.104790010322250183839876322541518),
      Scalar(0.140653259715525918745189590510238),
      Scalar(0.169004726639267902826583426598550),
      Scalar(0.190350578064785409913256402421014),
      Scalar(0.204432940075298892414161999234649),
      Scalar(0.209482141084727828012999174891714)};
  // Gauss weights for the odd Kronrod nodes xk[1], xk[3], xk[5], xk[7].
  static constexpr std::array<Scalar, 4> wg = {
      Scalar(0.129484966168869693270611432679082),
      Scalar(0.279705391489276667901467771423780),
      Scalar(0.381830050505118944950369775488975),
      Scalar(0.417959183673469387755102040816327)};
};

template <typename Scalar, typename F>
std::pair<Scalar, Scalar> gk15(F& f, Scalar a, Scalar b) {
  using K = Kronrod15<Scalar>;
  const Scalar mid = (a + b) / 2, half = (b - a) / 2;
  const Scalar fc = f(mid);
  Scalar kron = K::wk[7] * fc;
  Scalar gauss = K::wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const Scalar dx = half * K::xk[i];
    const Scalar s = f(mid - dx) + f(mid + dx);
    kron += K::wk[i] * s;
    if (i % 2 == 1) gauss += K::wg[i / 2] * s;
  }
  return {kron * half, std::abs((kron - gauss) * half)};
}

}  // namespace detail

/// Integrates f over [a, b]; `breaks` are optional interior points (kinks,
/// spline knots) used as the initial partition.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar a, Scalar b, Scalar rel_tol,
                                            Scalar abs_tol = Scalar(0),
                                            const std::vector<Scalar>& breaks = {},
                                            int max_intervals = 4000) {
  struct Piece {
    Scalar a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::vector<Scalar> nodes{a};
  for (Scalar x : breaks)
    if (x > a && x < b) nodes.push_back(x);
  nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());

  std::priority_queue<Piece> heap;
  Scalar total = 0, total_err = 0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    auto [v, e] = detail::gk15(f, nodes[i], nodes[i + 1]);
    heap.push({nodes[i], nodes[i + 1], v, e});
    total += v;
    total_err += e;
  }
  int count = static_cast<int>(heap.size());
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (count >= max_intervals)
      throw Error(Errc::integration, "adaptive quadrature did not reach the requested tolerance");
    Piece worst = heap.top();
    heap.pop();
    const Scalar m = (worst.a + worst.b) / 2;
    if (!(m > worst.a && m < worst.b))
      throw Error(Errc::integration, "adaptive quadrature interval underflow");
    auto [v1, e1] = detail::gk15(f, worst.a, m);
    auto [v2, e2] = detail::gk15(f, m, worst.b);
    total += v1 + v2 - worst.value;
    total_err += e1 + e2 - worst.error;
    heap.push({worst.a, m, v1, e1});
    heap.push({m, worst.b, v2, e2});
    ++count;
    if (!std::isfinite(static_cast<double>(total)))
      throw Error(Errc::integration, "non-finite integrand");
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0;
  total_err = 0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  return {total, total_err, count};
}

}  // namespace ptransfer::numerics
