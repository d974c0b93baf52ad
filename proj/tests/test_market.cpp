#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maxvol/market.hpp"

using namespace maxvol;

TEST_CASE("scalar curves and factors") {
  MarketParams mkt(100.0, 0.1, 0.05);
  CHECK(mkt.discount(0.0) == 1.0);
  CHECK(mkt.capitalization(0.0) == 1.0);
  CHECK(mkt.discount(1.0) == doctest::Approx(0.904837418036).epsilon(1e-10));
  CHECK(mkt.capitalization(1.0) == doctest::Approx(1.051271096376).epsilon(1e-10));
  CHECK(mkt.forward(1.0) == doctest::Approx(105.1271096).epsilon(1e-8));  // barrier = 120, forward = 105.13
  CHECK(mkt.drift(0.3) == doctest::Approx(0.05));
}

TEST_CASE("piecewise curve integrates segment-exactly") {
  RateCurve r({0.5, 1.0, 2.0}, {0.02, 0.04, 0.03});
  CHECK(r.value(0.25) == 0.02);
  CHECK(r.value(0.5) == 0.04);
  CHECK(r.value(1.7) == 0.03);
  CHECK(r.integral(0.5) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(r.integral(1.0) == doctest::Approx(0.01 + 0.02).epsilon(1e-15));
  CHECK(r.integral(1.5) == doctest::Approx(0.03 + 0.015).epsilon(1e-15));
  CHECK_THROWS_AS(r.value(2.5), DomainError);
  CHECK_THROWS_AS(r.integral(-0.1), DomainError);
  CHECK_FALSE(r.is_constant());
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(MarketParams(-1.0, 0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(RateCurve({1.0, 0.5}, {0.1, 0.1}), ConfigError);
  CHECK_THROWS_AS(RateCurve({}, {}), ConfigError);
}

TEST_CASE("discount monotone, capitalization at least one") {
  MarketParams mkt(50.0, RateCurve({1.0, 3.0}, {0.05, 0.01}), RateCurve(0.02));
  double prev = 1.0;
  for (double t = 0.1; t <= 3.0; t += 0.1) {
    double d = mkt.discount(t);
    CHECK(d <= prev + 1e-15);
    CHECK(d > 0.0);
    CHECK(mkt.capitalization(t) >= 1.0);
    prev = d;
  }
}
