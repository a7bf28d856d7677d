#include "ptransfer/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ptransfer {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

numerics::NaturalCubicSpline<double> make_spline(const std::vector<Sample>& samples) {
  Eigen::VectorXd x(samples.size()), y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x[static_cast<Eigen::Index>(i)] = samples[i].first;
    y[static_cast<Eigen::Index>(i)] = samples[i].second;
  }
  return {std::move(x), std::move(y)};
}

void check_table(const std::vector<Sample>& samples, double bottom, double top, const char* what) {
  if (samples.size() < 4) {
    std::ostringstream os;
    os << what << " table needs at least 4 samples, got " << samples.size();
    throw Error(Errc::invalid_argument, os.str());
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second))
      throw Error(Errc::invalid_argument, std::string(what) + " table has non-finite entries");
    if (i > 0 && !(samples[i].first > samples[i - 1].first))
      throw Error(Errc::invalid_argument,
                  std::string(what) + " table heights must be strictly increasing");
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(top - bottom));
  if (samples.front().first > bottom + slack || samples.back().first < top - slack)
    throw Error(Errc::invalid_argument, std::string(what) + " table does not cover the layer");
}

}  // namespace

ShearProfile::ShearProfile(Kind kind, double h0) : ShearProfile(std::move(kind), 0.0, h0) {}

ShearProfile::ShearProfile(Kind kind, double bottom, double top)
    : kind_(std::move(kind)), bottom_(bottom), top_(top) {
  if (!(top_ > bottom_) || !std::isfinite(top_) || !std::isfinite(bottom_))
    throw Error(Errc::invalid_argument, "shear profile needs a finite interval with top > bottom");

  std::visit(overloaded{
                 [&](shear::Zero&) { max_ = {bottom_, 0.0}; },
                 [&](shear::Linear& p) {
                   if (!std::isfinite(p.gamma) || !std::isfinite(p.u_ref))
                     throw Error(Errc::invalid_argument, "linear shear needs finite parameters");
                   if (!p.y_ref) p.y_ref = top_;
                   const double ub = U(bottom_), ut = U(top_);
                   max_ = ub > ut ? std::pair{bottom_, ub} : std::pair{top_, ut};
                 },
                 [&](shear::PiecewiseLinear& p) {
                   if (!(p.h1 > bottom_ && p.h1 < top_))
                     throw Error(Errc::invalid_argument,
                                 "piecewise shear needs bottom < h1 < top");
                   std::pair<double, double> best{bottom_, U(bottom_)};
                   for (double y : {p.h1, top_})
                     if (U(y) > best.second) best = {y, U(y)};
                   max_ = best;
                 },
                 [&](shear::Tabulated& p) {
                   check_table(p.samples, bottom_, top_, "shear");
                   spline_ = make_spline(p.samples);
                   max_ = spline_.maximum(bottom_, top_);
                 },
             },
             kind_);
}

void ShearProfile::check_domain(double y) const {
  const double slack = 1e-12 * std::max(1.0, depth());
  if (!(y >= bottom_ - slack && y <= top_ + slack)) {
    std::ostringstream os;
    os << "height " << y << " outside [" << bottom_ << ", " << top_ << "]";
    throw Error(Errc::domain, os.str());
  }
}

double ShearProfile::U(double y) const {
  check_domain(y);
  return std::visit(overloaded{
                        [](const shear::Zero&) { return 0.0; },
                        [&](const shear::Linear& p) { return p.u_ref + p.gamma * (y - *p.y_ref); },
                        [&](const shear::PiecewiseLinear& p) {
                          if (y <= p.h1) return p.gamma_minus * (y - top_);
                          return p.gamma_minus * (p.h1 - top_) + p.gamma_plus * (y - p.h1);
                        },
                        [&](const shear::Tabulated&) { return spline_(y); },
                    },
                    kind_);
}

ShearDerivs ShearProfile::derivs(double y, Side side) const {
  check_domain(y);
  return std::visit(
      overloaded{
          [](const shear::Zero&) { return ShearDerivs{0.0, 0.0}; },
          [](const shear::Linear& p) { return ShearDerivs{p.gamma, 0.0}; },
          [&](const shear::PiecewiseLinear& p) {
            if (y == p.h1) {
              if (side == Side::unspecified)
                throw Error(Errc::ambiguous_side,
                            "U' is one-sided at the vorticity jump; request a side");
              return ShearDerivs{side == Side::below ? p.gamma_minus : p.gamma_plus, 0.0};
            }
            return ShearDerivs{y < p.h1 ? p.gamma_minus : p.gamma_plus, 0.0};
          },
          [&](const shear::Tabulated&) {
            return ShearDerivs{spline_.derivative(y, 1), spline_.derivative(y, 2)};
          },
      },
      kind_);
}

double ShearProfile::min_U() const {
  if (std::holds_alternative<shear::Tabulated>(kind_)) {
    // min U = -max(-U); the negated data has the negated spline.
    const numerics::NaturalCubicSpline<double> neg(spline_.knots(), -spline_.values());
    return -neg.maximum(bottom_, top_).second;
  }
  double m = std::min(U(bottom_), U(top_));
  for (double b : breakpoints()) m = std::min(m, U(b));
  return m;
}

std::vector<double> ShearProfile::breakpoints() const {
  // h1 stays a node even when the two slopes agree.
  if (const auto* p = std::get_if<shear::PiecewiseLinear>(&kind_)) return {p->h1};
  return {};
}

bool ShearProfile::curvature_free() const {
  return !std::holds_alternative<shear::Tabulated>(kind_);
}

DensityProfile::DensityProfile(Kind kind, double h0) : kind_(std::move(kind)), h0_(h0) {
  if (!(h0_ > 0) || !std::isfinite(h0_))
    throw Error(Errc::invalid_argument, "density profile needs a positive depth");
  std::visit(overloaded{
                 [](const density::Constant& p) {
                   if (!(p.value >= 0) || !std::isfinite(p.value))
                     throw Error(Errc::invalid_argument, "density must be non-negative");
                 },
                 [](const density::Exponential& p) {
                   if (!(p.beta >= 0) || !std::isfinite(p.beta))
                     throw Error(Errc::invalid_argument,
                                 "exponential density needs beta >= 0 (non-increasing)");
                   if (!(p.scale >= 0) || !std::isfinite(p.scale))
                     throw Error(Errc::invalid_argument, "density scale must be non-negative");
                 },
                 [&](const density::Tabulated& p) {
                   check_table(p.samples, 0.0, h0_, "density");
                   for (std::size_t i = 0; i < p.samples.size(); ++i) {
                     if (p.samples[i].second < 0)
                       throw Error(Errc::invalid_argument, "density samples must be non-negative");
                     if (i > 0 && p.samples[i].second > p.samples[i - 1].second)
                       throw Error(Errc::invalid_argument,
                                   "density must be non-increasing with height");
                   }
                   spline_ = make_spline(p.samples);
                 },
             },
             kind_);
}

void DensityProfile::check_domain(double y) const {
  const double slack = 1e-12 * std::max(1.0, h0_);
  if (!(y >= -slack && y <= h0_ + slack)) {
    std::ostringstream os;
    os << "height " << y << " outside [0, " << h0_ << "]";
    throw Error(Errc::domain, os.str());
  }
}

double DensityProfile::R(double y) const {
  check_domain(y);
  return std::visit(overloaded{
                        [](const density::Constant& p) { return p.value; },
                        [&](const density::Exponential& p) {
                          return p.scale * std::exp(-2.0 * p.beta * y);
                        },
                        [&](const density::Tabulated&) { return spline_(y); },
                    },
                    kind_);
}

double DensityProfile::dR(double y) const {
  check_domain(y);
  return std::visit(overloaded{
                        [](const density::Constant&) { return 0.0; },
                        [&](const density::Exponential& p) {
                          return -2.0 * p.beta * p.scale * std::exp(-2.0 * p.beta * y);
                        },
                        [&](const density::Tabulated&) { return spline_.derivative(y, 1); },
                    },
                    kind_);
}

}  // namespace ptransfer
