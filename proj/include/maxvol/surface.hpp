#pragma once

#include <memory>

#include "maxvol/errors.hpp"
#include "maxvol/svi.hpp"

namespace maxvol {

/// Volatility as a function of the spot level x, the running-maximum level y
/// and time. Defined on the half-plane 0 < x <= y. Implementations must be
/// positive and bounded there, and immutable after construction.
class VolSurface {
 public:
  virtual ~VolSurface() = default;

  virtual double sigma(double x, double y, double t) const = 0;

  virtual double sigma2(double x, double y, double t) const {
    double s = sigma(x, y, t);
    return s * s;
  }

  /// d(sigma^2)/dy. Default: central finite difference with step bump*y,
  /// one-sided toward larger y when y - h would fall below x.
  virtual double dsigma2_dy(double x, double y, double t) const {
    require_domain(x, y);
    double h = bump_ * y;
    if (y - h <= x) {
      return (-3.0 * sigma2(x, y, t) + 4.0 * sigma2(x, y + h, t) - sigma2(x, y + 2.0 * h, t)) /
             (2.0 * h);
    }
    return (sigma2(x, y + h, t) - sigma2(x, y - h, t)) / (2.0 * h);
  }

  /// False when sigma(x, y, .) is constant; lets solvers reuse coefficients.
  virtual bool time_dependent() const { return false; }

  /// True when sigma^2(x, y, t) = sigma^2(x, y, 0) * time_factor(t); solvers
  /// then cache spatial coefficients and rescale per step.
  virtual bool time_separable() const { return !time_dependent(); }

  /// The separable factor, with time_factor(0) == 1.
  virtual double time_factor(double /*t*/) const { return 1.0; }

  double bump() const { return bump_; }

 protected:
  explicit VolSurface(double bump = 1e-4) : bump_(bump) {
    if (!(bump > 0.0)) throw ConfigError("VolSurface: bump must be > 0");
  }

  static void require_domain(double x, double y) {
    if (!(x > 0.0) || x > y) throw DomainError("VolSurface: need 0 < x <= y");
  }

 private:
  double bump_;
};

class ConstantVol final : public VolSurface {
 public:
  explicit ConstantVol(double vol) : vol_(vol) {
    if (!(vol > 0.0)) throw ConfigError("ConstantVol: vol must be > 0");
  }

  double sigma(double x, double y, double /*t*/) const override {
    require_domain(x, y);
    return vol_;
  }

  double dsigma2_dy(double x, double y, double /*t*/) const override {
    require_domain(x, y);
    return 0.0;
  }

 private:
  double vol_;
};

/// sigma(x, y, t) = (s(x, t) + s(y, t)) / 2 with the one-dimensional smile
///   s(z, t) = sqrt(w(log(z/spot)) / (t + 1)),
/// where w is the raw SVI total variance. The smile is read at horizon t + 1,
/// so at t = 0 the surface coincides with the plain SVI volatility, and
/// sigma^2 scales exactly like 1/(1 + t) afterwards (time-separable).
class SviAverageVol final : public VolSurface {
 public:
  SviAverageVol(SviParams params, double spot, double bump = 1e-4,
                bool closed_form_derivative = false)
      : VolSurface(bump), params_(params), spot_(spot), closed_form_(closed_form_derivative) {
    params_.validate();
    if (!(spot > 0.0)) throw ConfigError("SviAverageVol: spot must be > 0");
  }

  double sigma(double x, double y, double t) const override {
    require_domain(x, y);
    return 0.5 * (smile(x, t) + smile(y, t));
  }

  bool time_dependent() const override { return true; }
  bool time_separable() const override { return true; }
  double time_factor(double t) const override { return 1.0 / (1.0 + t); }

  double dsigma2_dy(double x, double y, double t) const override {
    if (!closed_form_) return VolSurface::dsigma2_dy(x, y, t);
    require_domain(x, y);
    // sigma^2 = ((s(x)+s(y))/2)^2, so d(sigma^2)/dy = (s(x)+s(y))/2 * s'(y).
    double ky = std::log(y / spot_);
    return 0.5 * (smile(x, t) + smile(y, t)) * svi_vol_slope(ky, params_) /
           (y * std::sqrt(t + 1.0));
  }

  /// s(z, t) above; svi_vol carries the raw smile, the horizon scales it.
  double smile(double z, double t) const {
    return svi_vol(std::log(z / spot_), t + 1.0, params_) / std::sqrt(t + 1.0);
  }

  const SviParams& params() const { return params_; }

 private:
  SviParams params_;
  double spot_;
  bool closed_form_;
};

}  // namespace maxvol
