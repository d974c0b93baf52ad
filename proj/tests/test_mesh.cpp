#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maxvol/mesh.hpp"

using namespace maxvol;

TEST_CASE("forward grid at the experiment scale") {
  ForwardGrid g = build_forward_grid(100.0, 120.0, 1.0, 0.02, 1e-3);
  CHECK(g.dk == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(g.p == 1000);
  CHECK(g.n == 6000);
  CHECK(g.m == 1000);
  CHECK(g.spot() == 100.0);
  CHECK(g.b_max() == doctest::Approx(120.0).epsilon(1e-14));
  CHECK(g.layer_size(0) == 5001);
  CHECK(g.layer_size(g.p) == 6001);
}

TEST_CASE("every barrier sits bitwise on a strike node") {
  ForwardGrid g = build_forward_grid(100.0, 120.0, 1.0, 0.02, 1e-3);
  for (int j = 0; j <= g.p; ++j) CHECK(g.barrier(j) == g.strike(g.top_index(j)));
}

TEST_CASE("largest divisor-compatible tick") {
  // 0.03 itself does not divide 100, the next admissible tick down is 0.025
  ForwardGrid g = build_forward_grid(100.0, 120.0, 1.0, 0.03, 1e-2);
  CHECK(g.dk == doctest::Approx(0.025).epsilon(1e-14));
  ForwardGrid g2 = build_forward_grid(100.0, 120.0, 1.0, 1.0, 1e-2);
  CHECK(g2.dk == 1.0);
  // smallest grid: a single interior barrier layer
  ForwardGrid g3 = build_forward_grid(100.0, 101.0, 1.0, 1.0, 0.5);
  CHECK(g3.p == 1);
  CHECK(g3.layer_size(0) == 101);
}

TEST_CASE("inadmissible step raises a configuration error") {
  CHECK_THROWS_AS(build_forward_grid(100.0, 100.0 + 0.0003, 1.0, 0.02, 1e-3), ConfigError);
  CHECK_THROWS_AS(build_forward_grid(100.0, 90.0, 1.0, 0.02, 1e-3), ConfigError);
  CHECK_THROWS_AS(build_forward_grid(100.0, 150.0, 1.0, 50.0, 1e-3), GridError);  // < 5 nodes
}

TEST_CASE("backward y grid endpoints are exact") {
  std::vector<double> y = build_backward_ygrid(100.0, 120.0, 0.02);
  int n_y = static_cast<int>(y.size()) - 2;
  CHECK(n_y == 1000);
  CHECK(y.front() == 100.0);
  CHECK(y.back() == 120.0);
  // z = 1/2 mid-level of the grading map (evaluated on a grid containing it)
  std::vector<double> y2 = build_backward_ygrid(100.0, 120.0, 20.0 / 3.0);
  // n_y = 3 -> z_2 = 2/4 = 1/2
  double g = 20.0 / std::expm1(2.0);
  CHECK(y2[2] == doctest::Approx(100.0 - g + g * std::exp(1.0)).epsilon(1e-12));
  CHECK(y2[2] == doctest::Approx(105.378).epsilon(2e-5));
}

TEST_CASE("backward y spacings increase monotonically") {
  std::vector<double> y = build_backward_ygrid(100.0, 120.0, 0.1);
  int n_y = static_cast<int>(y.size()) - 2;
  for (int i = 1; i < n_y; ++i)
    CHECK(y[i + 1] - y[i] >= y[i] - y[i - 1]);  // convexity of the grading, interior levels
}

TEST_CASE("layer spot grid pins the top three nodes") {
  std::vector<double> y = build_backward_ygrid(100.0, 120.0, 0.02);
  int i = 500;
  std::vector<double> x = build_layer_xgrid(y[i], y[i - 1], y[i - 2], 0.02);
  int n = static_cast<int>(x.size()) - 1;
  CHECK(x[n] == y[i]);
  CHECK(x[n - 1] == y[i - 1]);
  CHECK(x[n - 2] == y[i - 2]);
  CHECK(x[0] == 0.0);
  // uniform section spacing dx = y_{i-2}/(n_x - 2), recomputed independently
  double dx = y[i - 2] / (n - 2);
  for (int k = 1; k <= n - 2; ++k) CHECK(x[k] - x[k - 1] == doctest::Approx(dx).epsilon(1e-12));
  for (int k = 1; k <= n; ++k) CHECK(x[k] > x[k - 1]);
}

TEST_CASE("layer node count") {
  std::vector<double> x = build_layer_xgrid(120.0, 119.95, 119.9, 0.02);
  CHECK(static_cast<int>(x.size()) - 1 == 6000);  // ceil(y_i / dy)
  CHECK_THROWS_AS(build_layer_xgrid(1.0, 0.9, 0.8, 0.5), GridError);
  CHECK_THROWS_AS(build_layer_xgrid(1.0, 1.2, 1.1, 0.01), GridError);
}

TEST_CASE("grids are deterministic") {
  auto a = build_backward_ygrid(100.0, 117.5, 0.07);
  auto b = build_backward_ygrid(100.0, 117.5, 0.07);
  CHECK(a == b);
}
