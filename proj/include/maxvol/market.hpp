#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "maxvol/errors.hpp"

namespace maxvol {

/// Piecewise-constant curve on [0, horizon), used for rates and dividend
/// yields. A scalar is a single segment with infinite horizon. Integrals are
/// accumulated segment-exactly so that discount and capitalization factors
/// are bit-stable however they are assembled downstream.
class RateCurve {
 public:
  RateCurve(double value)  // NOLINT: implicit by design, scalars are curves
      : bounds_{std::numeric_limits<double>::infinity()}, values_{value}, cum_{0.0} {}

  /// Segment k has value values[k] on [bounds[k-1], bounds[k]), with
  /// bounds[-1] = 0. The last bound is the curve horizon.
  RateCurve(std::vector<double> bounds, std::vector<double> values)
      : bounds_(std::move(bounds)), values_(std::move(values)) {
    if (bounds_.empty() || bounds_.size() != values_.size())
      throw ConfigError("RateCurve: need one bound per segment");
    double prev = 0.0;
    for (double b : bounds_) {
      if (!(b > prev)) throw ConfigError("RateCurve: bounds must increase from 0");
      prev = b;
    }
    // cum_[k] = integral up to the left edge of segment k
    cum_.assign(bounds_.size(), 0.0);
    for (std::size_t k = 1; k < bounds_.size(); ++k)
      cum_[k] = cum_[k - 1] + values_[k - 1] * (bounds_[k - 1] - (k >= 2 ? bounds_[k - 2] : 0.0));
  }

  double horizon() const { return bounds_.back(); }

  bool is_constant() const { return values_.size() == 1; }

  const std::vector<double>& bounds() const { return bounds_; }
  const std::vector<double>& values() const { return values_; }

  double value(double t) const { return values_[segment(t)]; }

  /// Exact \int_0^t of the curve.
  double integral(double t) const {
    std::size_t k = segment(t);
    double left = k == 0 ? 0.0 : bounds_[k - 1];
    return cum_[k] + values_[k] * (t - left);
  }

 private:
  std::size_t segment(double t) const {
    if (t < 0.0 || t > horizon()) throw DomainError("RateCurve: t outside curve support");
    std::size_t k = 0;
    while (k + 1 < bounds_.size() && t >= bounds_[k]) ++k;
    return k;
  }

  std::vector<double> bounds_;
  std::vector<double> values_;
  std::vector<double> cum_;
};

/// Market conventions: spot, short rate r(t) and dividend yield q(t).
/// Immutable after construction; all member functions are pure.
struct MarketParams {
  MarketParams(double spot, RateCurve rate, RateCurve dividend)
      : spot(spot), rate(std::move(rate)), dividend(std::move(dividend)) {
    if (!(spot > 0.0)) throw ConfigError("MarketParams: spot must be > 0");
  }

  double spot;
  RateCurve rate;
  RateCurve dividend;

  /// D(t) = exp(-\int_0^t r)
  double discount(double t) const { return std::exp(-rate.integral(t)); }
  /// Q(t) = exp(\int_0^t q)
  double capitalization(double t) const { return std::exp(dividend.integral(t)); }
  /// mu(t) = r(t) - q(t)
  double drift(double t) const { return rate.value(t) - dividend.value(t); }
  /// Forward of the spot: spot * exp(\int_0^t mu)
  double forward(double t) const {
    return spot * std::exp(rate.integral(t) - dividend.integral(t));
  }
};

}  // namespace maxvol
