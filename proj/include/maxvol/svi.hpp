#pragma once

#include <cmath>

#include "maxvol/errors.hpp"

namespace maxvol {

/// Raw SVI smile parameters. Total variance at log-moneyness k is
///   w(k) = a + b (rho (k - m) + sqrt((k - m)^2 + sigma^2)).
struct SviParams {
  double a = 0.0;
  double b = 0.0;
  double rho = 0.0;
  double m = 0.0;
  double sigma = 0.0;

  /// Parameter validation happens here, not at evaluation time.
  void validate() const {
    if (!(sigma > 0.0)) throw ConfigError("SviParams: sigma must be > 0");
    if (b < 0.0) throw ConfigError("SviParams: b must be >= 0");
    if (!(std::abs(rho) < 1.0)) throw ConfigError("SviParams: |rho| must be < 1");
    if (a + b * sigma * std::sqrt(1.0 - rho * rho) < 0.0)
      throw ConfigError("SviParams: min total variance is negative");
  }
};

template <typename Scalar>
Scalar svi_total_variance(Scalar k, const SviParams& p) {
  Scalar d = k - p.m;
  return p.a + p.b * (p.rho * d + std::sqrt(d * d + p.sigma * p.sigma));
}

/// SVI volatility at log-moneyness k. The t argument is a pass-through for
/// future time-dependent smiles; the parametrisation itself does not use it.
template <typename Scalar>
Scalar svi_vol(Scalar k, Scalar /*t*/, const SviParams& p) {
  return std::sqrt(svi_total_variance(k, p));
}

/// d(svi_vol)/dk, closed form.
inline double svi_vol_slope(double k, const SviParams& p) {
  double d = k - p.m;
  double root = std::sqrt(d * d + p.sigma * p.sigma);
  double wp = p.b * (p.rho + d / root);
  return 0.5 * wp / std::sqrt(svi_total_variance(k, p));
}

}  // namespace maxvol
