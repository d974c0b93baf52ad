#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "maxvol/surface.hpp"

using namespace maxvol;

namespace {
const SviParams kFig3{0.04, 0.2, 0.0, 0.0, 0.2};
}

TEST_CASE("svi smile values") {
  CHECK(svi_vol(0.0, 0.0, kFig3) == doctest::Approx(0.2828427125).epsilon(1e-9));
  CHECK(svi_vol(std::log(1.2), 0.0, kFig3) == doctest::Approx(0.306800).epsilon(1e-5));
  // minimum of the smile at k = m when rho = 0
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.01, 0.5);
  for (int it = 0; it < 20; ++it) {
    SviParams p{u(rng), u(rng), 0.0, u(rng) - 0.25, u(rng)};
    CHECK(svi_vol(p.m, 0.0, p) == doctest::Approx(std::sqrt(p.a + p.b * p.sigma)).epsilon(1e-12));
    CHECK(svi_vol(p.m + 0.3, 0.0, p) >= svi_vol(p.m, 0.0, p));
  }
}

TEST_CASE("svi validation happens at construction") {
  SviParams bad{-0.05, 0.1, 0.0, 0.0, 0.2};  // min total variance negative
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS((SviParams{0.04, -0.1, 0.0, 0.0, 0.2}).validate(), ConfigError);
  CHECK_THROWS_AS((SviParams{0.04, 0.2, 1.0, 0.0, 0.2}).validate(), ConfigError);
  CHECK_THROWS_AS((SviParams{0.04, 0.2, 0.0, 0.0, -1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(SviAverageVol(bad, 100.0), ConfigError);
}

TEST_CASE("surface values at t = 0 match the plain smile") {
  SviAverageVol surf(kFig3, 100.0);
  CHECK(surf.sigma(100.0, 100.0, 0.0) == doctest::Approx(0.2828427125).epsilon(1e-9));
  CHECK(surf.sigma(100.0, 120.0, 0.0) == doctest::Approx(0.294821).epsilon(1e-5));
  // diagonal equals the smile for any level
  for (double z : {80.0, 100.0, 117.0})
    CHECK(surf.sigma(z, z, 0.0) ==
          doctest::Approx(svi_vol(std::log(z / 100.0), 0.0, kFig3)).epsilon(1e-12));
}

TEST_CASE("surface is time-separable with factor 1/(1+t)") {
  SviAverageVol surf(kFig3, 100.0);
  CHECK(surf.time_dependent());
  CHECK(surf.time_separable());
  CHECK(surf.time_factor(0.0) == 1.0);
  for (double t : {0.25, 1.0}) {
    double ratio = surf.sigma2(90.0, 110.0, t) / surf.sigma2(90.0, 110.0, 0.0);
    CHECK(ratio == doctest::Approx(1.0 / (1.0 + t)).epsilon(1e-12));
  }
}

TEST_CASE("domain checks") {
  SviAverageVol surf(kFig3, 100.0);
  CHECK_THROWS_AS(surf.sigma(-1.0, 100.0, 0.0), DomainError);
  CHECK_THROWS_AS(surf.sigma(101.0, 100.0, 0.0), DomainError);
  ConstantVol cv(0.25);
  CHECK_THROWS_AS(cv.sigma(0.0, 100.0, 0.0), DomainError);
  CHECK(cv.sigma(40.0, 100.0, 3.0) == 0.25);
}

TEST_CASE("dsigma2_dy: constant surface is exactly zero") {
  ConstantVol cv(0.3);
  CHECK(cv.dsigma2_dy(50.0, 80.0, 0.5) == 0.0);
  CHECK(cv.dsigma2_dy(80.0, 80.0, 0.5) == 0.0);
}

TEST_CASE("dsigma2_dy: flat at the money when rho = m = 0") {
  SviAverageVol surf(kFig3, 100.0);
  CHECK(std::abs(surf.dsigma2_dy(100.0, 100.0, 0.0)) <= 1e-8);
}

TEST_CASE("dsigma2_dy against a wider independent stencil") {
  SviAverageVol surf(kFig3, 100.0);
  double x = 100.0, y = 110.0, h = 1e-3 * y;
  auto s2 = [&](double yy) { return surf.sigma2(x, yy, 0.0); };
  double five_point =
      (-s2(y + 2 * h) + 8.0 * s2(y + h) - 8.0 * s2(y - h) + s2(y - 2 * h)) / (12.0 * h);
  CHECK(surf.dsigma2_dy(x, y, 0.0) == doctest::Approx(five_point).epsilon(0).scale(1).epsilon(1e-6));
  CHECK(std::abs(surf.dsigma2_dy(x, y, 0.0) - five_point) < 1e-6);
}

TEST_CASE("dsigma2_dy finite difference converges at order >= 1.8") {
  SviAverageVol exact(kFig3, 100.0, 1e-4, /*closed_form=*/true);
  double x = 95.0, y = 112.0;
  double truth = exact.dsigma2_dy(x, y, 0.0);
  double prev_err = 0.0;
  double hs[] = {4e-3, 2e-3, 1e-3};
  for (int i = 0; i < 3; ++i) {
    SviAverageVol fd(kFig3, 100.0, hs[i]);
    double err = std::abs(fd.dsigma2_dy(x, y, 0.0) - truth);
    if (i > 0) {
      double order = std::log2(prev_err / err);
      CHECK(order >= 1.8);
    }
    prev_err = err;
  }
}

TEST_CASE("one-sided derivative at the diagonal") {
  SviAverageVol surf(kFig3, 100.0);
  SviAverageVol exact(kFig3, 100.0, 1e-4, true);
  // y == x forces the one-sided stencil; still close to the closed form
  CHECK(surf.dsigma2_dy(110.0, 110.0, 0.0) ==
        doctest::Approx(exact.dsigma2_dy(110.0, 110.0, 0.0)).epsilon(1e-5));
}

TEST_CASE("surface positive and bounded on the half-plane") {
  SviAverageVol surf(kFig3, 100.0);
  double smile_max = svi_vol(std::log(150.0 / 100.0), 0.0, kFig3);
  for (double y : {100.0, 120.0, 150.0})
    for (double x = 1.0; x <= y; x += 7.0) {
      double s = surf.sigma(x, y, 0.0);
      CHECK(s > 0.0);
      CHECK(s <= std::max(smile_max, svi_vol(std::log(1.0 / 100.0), 0.0, kFig3)) + 1e-12);
    }
}
