#pragma once

#include <cmath>

#include "maxvol/errors.hpp"

namespace maxvol {

inline double norm_pdf(double z) { return 0.398942280401432678 * std::exp(-0.5 * z * z); }

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

/// Inverse standard normal CDF (Acklam's rational approximation, |err|<1.2e-9).
double inv_norm_cdf(double p);

double black_scholes_call(double spot, double strike, double t, double vol, double r, double q);

/// Up-and-out call under constant volatility with continuous barrier
/// monitoring, assembled from the joint law of the terminal value and the
/// running maximum of a drifted Brownian motion.
double up_and_out_call(double spot, double strike, double barrier, double t, double vol, double r,
                       double q);

/// Foreign no-touch value D(T) E[S_T 1_{M_T < B}] under constant volatility.
double fnt_value(double spot, double barrier, double t, double vol, double r, double q);

/// P(M_T <= barrier) for the constant-volatility model.
double running_max_cdf(double spot, double barrier, double t, double vol, double r, double q);

/// Density of S_T (lognormal).
double lognormal_pdf(double s, double spot, double t, double vol, double r, double q);

/// Joint density of (S_T, M_T) for the constant-volatility model, from the
/// reflection principle. Zero outside {0 < s <= y, y >= spot}.
double reflection_joint_pdf(double s, double y, double spot, double t, double vol, double r,
                            double q);

}  // namespace maxvol
