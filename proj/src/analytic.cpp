#include "maxvol/analytic.hpp"

#include <algorithm>
#include <limits>

namespace maxvol {

double inv_norm_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw DomainError("inv_norm_cdf: p must be in (0, 1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double u = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (p > 1.0 - plow) {
    double u = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else {
    double u = p - 0.5, v = u * u;
    x = (((((a[0] * v + a[1]) * v + a[2]) * v + a[3]) * v + a[4]) * v + a[5]) * u /
        (((((b[0] * v + b[1]) * v + b[2]) * v + b[3]) * v + b[4]) * v + 1.0);
  }
  return x;
}

double black_scholes_call(double spot, double strike, double t, double vol, double r, double q) {
  if (t <= 0.0) return std::max(spot - strike, 0.0);
  if (strike <= 0.0) return spot * std::exp(-q * t) - strike * std::exp(-r * t);
  double sq = vol * std::sqrt(t);
  double d1 = (std::log(spot / strike) + (r - q + 0.5 * vol * vol) * t) / sq;
  return spot * std::exp(-q * t) * norm_cdf(d1) - strike * std::exp(-r * t) * norm_cdf(d1 - sq);
}

namespace {

/// P(X_T > k, M^X_T <= b) for X with drift theta and volatility vol, X_0 = 0,
/// b >= 0, k <= b.
double upper_tail_below_max(double k, double b, double theta, double vol, double t) {
  double sq = vol * std::sqrt(t);
  auto h = [&](double x) {
    return norm_cdf((x - theta * t) / sq) -
           std::exp(2.0 * theta * b / (vol * vol)) * norm_cdf((x - 2.0 * b - theta * t) / sq);
  };
  return h(b) - (std::isfinite(k) ? h(k) : 0.0);
}

}  // namespace

double up_and_out_call(double spot, double strike, double barrier, double t, double vol, double r,
                       double q) {
  if (barrier <= spot || strike >= barrier) return 0.0;
  if (t <= 0.0) return std::max(spot - strike, 0.0);
  double nu = r - q - 0.5 * vol * vol;
  double b = std::log(barrier / spot);
  double k = strike > 0.0 ? std::log(strike / spot) : -std::numeric_limits<double>::infinity();
  double df = std::exp(-r * t);
  double stock_leg = spot * std::exp((r - q) * t) * upper_tail_below_max(k, b, nu + vol * vol, vol, t);
  double cash_leg = strike > 0.0 ? strike * upper_tail_below_max(k, b, nu, vol, t) : 0.0;
  return df * (stock_leg - cash_leg);
}

double fnt_value(double spot, double barrier, double t, double vol, double r, double q) {
  return up_and_out_call(spot, 0.0, barrier, t, vol, r, q);
}

double running_max_cdf(double spot, double barrier, double t, double vol, double r, double q) {
  if (barrier <= spot) return 0.0;
  double nu = r - q - 0.5 * vol * vol;
  double b = std::log(barrier / spot);
  return upper_tail_below_max(-std::numeric_limits<double>::infinity(), b, nu, vol, t);
}

double lognormal_pdf(double s, double spot, double t, double vol, double r, double q) {
  if (s <= 0.0) return 0.0;
  double sq = vol * std::sqrt(t);
  double z = (std::log(s / spot) - (r - q - 0.5 * vol * vol) * t) / sq;
  return norm_pdf(z) / (s * sq);
}

double reflection_joint_pdf(double s, double y, double spot, double t, double vol, double r,
                            double q) {
  if (s <= 0.0 || y < spot || s > y) return 0.0;
  double x = std::log(s / spot);
  double m = std::log(y / spot);
  double nu = r - q - 0.5 * vol * vol;
  double v2 = vol * vol;
  double f = 2.0 * (2.0 * m - x) / (v2 * t * vol * std::sqrt(t)) * norm_pdf((2.0 * m - x) / (vol * std::sqrt(t)));
  f *= std::exp(nu * x / v2 - 0.5 * nu * nu * t / v2);
  return f / (s * y);
}

}  // namespace maxvol
