#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "maxvol/analytic.hpp"
#include "maxvol/mc.hpp"

using namespace maxvol;

namespace {
const SviParams kFig3{0.04, 0.2, 0.0, 0.0, 0.2};

double chi2_survival(double x, double dof) {
  // Wilson-Hilferty normal approximation, plenty for a 1% gate at high dof
  double z = (std::cbrt(x / dof) - (1.0 - 2.0 / (9.0 * dof))) / std::sqrt(2.0 / (9.0 * dof));
  return 1.0 - norm_cdf(z);
}
}  // namespace

TEST_CASE("knocked out at inception: zero with zero variance") {
  MarketParams mkt(100.0, 0.1, 0.05);
  ConstantVol surf(0.25);
  McConfig cfg;
  cfg.paths = 100;
  McEstimate est = simulate_price({50.0, 95.0, 1.0}, surf, mkt, cfg);
  CHECK(est.value == 0.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("seed determinism, bitwise, across thread counts") {
  MarketParams mkt(100.0, 0.1, 0.05);
  SviAverageVol surf(kFig3, 100.0);
  McConfig cfg;
  cfg.paths = 40000;
  cfg.steps_per_year = 64;
  cfg.seed = 99;
  cfg.threads = 1;
  McEstimate a = simulate_price({90.0, 115.0, 1.0}, surf, mkt, cfg);
  cfg.threads = 2;
  McEstimate b = simulate_price({90.0, 115.0, 1.0}, surf, mkt, cfg);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  cfg.seed = 100;
  McEstimate c = simulate_price({90.0, 115.0, 1.0}, surf, mkt, cfg);
  CHECK(c.value != a.value);
  cfg.seed = 99;
  cfg.antithetic = true;
  McEstimate d1 = simulate_price({90.0, 115.0, 1.0}, surf, mkt, cfg);
  McEstimate d2 = simulate_price({90.0, 115.0, 1.0}, surf, mkt, cfg);
  CHECK(d1.value == d2.value);
}

TEST_CASE("joint sample respects the running-maximum definition") {
  MarketParams mkt(100.0, 0.1, 0.05);
  SviAverageVol surf(kFig3, 100.0);
  McConfig cfg;
  cfg.paths = 50000;
  cfg.steps_per_year = 64;
  JointSample js = simulate_joint_sample(surf, mkt, cfg, 1.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < js.spot.size(); ++i) {
    CHECK(js.maxi[i] >= js.spot[i]);
    CHECK(js.maxi[i] >= 100.0);
    mean += js.spot[i];
  }
  mean /= static_cast<double>(js.spot.size());
  // discounted dividend-adjusted spot is a martingale: E[S_T] = forward
  double se = 32.0 / std::sqrt(static_cast<double>(js.spot.size()));
  CHECK(std::abs(mean - mkt.forward(1.0)) < 3.5 * se);
}

TEST_CASE("bridge mode matches the closed form within three standard errors") {
  MarketParams mkt(100.0, 0.1, 0.05);
  ConstantVol surf(0.25);
  McConfig cfg;
  cfg.paths = 300000;
  cfg.steps_per_year = 256;
  cfg.seed = 12345;
  for (double strike : {60.0, 100.0}) {
    McEstimate est = simulate_price({strike, 120.0, 1.0}, surf, mkt, cfg);
    double ana = up_and_out_call(100.0, strike, 120.0, 1.0, 0.25, 0.1, 0.05);
    CHECK(std::abs(est.value - ana) <= 3.0 * est.std_error);
  }
}

TEST_CASE("antithetic variant stays unbiased") {
  MarketParams mkt(100.0, 0.1, 0.05);
  ConstantVol surf(0.25);
  McConfig cfg;
  cfg.paths = 200000;
  cfg.steps_per_year = 128;
  cfg.antithetic = true;
  McEstimate est = simulate_price({90.0, 120.0, 1.0}, surf, mkt, cfg);
  double ana = up_and_out_call(100.0, 90.0, 120.0, 1.0, 0.25, 0.1, 0.05);
  CHECK(std::abs(est.value - ana) <= 3.5 * est.std_error);
}

TEST_CASE("discrete monitoring overprices relative to the bridge") {
  MarketParams mkt(100.0, 0.1, 0.05);
  SviAverageVol surf(kFig3, 100.0);
  McConfig cfg;
  cfg.paths = 100000;
  cfg.steps_per_year = 128;
  McEstimate bridge = simulate_price({80.0, 115.0, 1.0}, surf, mkt, cfg);
  cfg.crossing = BarrierCrossing::discrete_max;
  McEstimate disc = simulate_price({80.0, 115.0, 1.0}, surf, mkt, cfg);
  CHECK(disc.value >= bridge.value - 3.0 * (disc.std_error + bridge.std_error));
  CHECK(disc.value > bridge.value);  // the bias is large at this step count
}

TEST_CASE("terminal joint histogram is consistent with the reflection density") {
  MarketParams mkt(100.0, 0.1, 0.05);
  ConstantVol surf(0.25);
  McConfig cfg;
  cfg.paths = 400000;
  cfg.steps_per_year = 128;
  cfg.seed = 777;
  JointSample js = simulate_joint_sample(surf, mkt, cfg, 1.0);
  // 50 x 50 bins over the bulk of the distribution, small cells pooled
  const int nb = 50;
  double x_lo = 55.0, x_hi = 175.0, y_lo = 100.0, y_hi = 190.0;
  double dxb = (x_hi - x_lo) / nb, dyb = (y_hi - y_lo) / nb;
  std::vector<double> observed(nb * nb, 0.0);
  double outside = 0.0;
  for (std::size_t p = 0; p < js.spot.size(); ++p) {
    int ix = static_cast<int>(std::floor((js.spot[p] - x_lo) / dxb));
    int iy = static_cast<int>(std::floor((js.maxi[p] - y_lo) / dyb));
    if (ix < 0 || ix >= nb || iy < 0 || iy >= nb) {
      outside += 1.0;
      continue;
    }
    observed[iy * nb + ix] += 1.0;
  }
  double n = static_cast<double>(js.spot.size());
  double chi2 = 0.0;
  double pool_expected = n, pool_observed = outside;
  int dof = 0;
  for (int iy = 0; iy < nb; ++iy)
    for (int ix = 0; ix < nb; ++ix) {
      // midpoint expectation per cell; thin cells go into the pooled bucket
      double xm = x_lo + (ix + 0.5) * dxb, ym = y_lo + (iy + 0.5) * dyb;
      double e = n * reflection_joint_pdf(xm, ym, 100.0, 1.0, 0.25, 0.1, 0.05) * dxb * dyb;
      bool near_diagonal = x_lo + (ix + 2) * dxb > y_lo + (iy - 1) * dyb;
      if (near_diagonal || e < 8.0) {
        pool_observed += observed[iy * nb + ix];
        continue;
      }
      pool_expected -= e;
      chi2 += (observed[iy * nb + ix] - e) * (observed[iy * nb + ix] - e) / e;
      ++dof;
    }
  if (pool_expected > 8.0) {
    chi2 += (pool_observed - pool_expected) * (pool_observed - pool_expected) / pool_expected;
    ++dof;
  }
  double p = chi2_survival(chi2, dof - 1);
  INFO("chi2 = " << chi2 << " dof = " << dof << " p = " << p);
  CHECK(p > 0.01);
}
