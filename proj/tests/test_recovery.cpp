#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maxvol/forward_pide.hpp"
#include "maxvol/recovery.hpp"

using namespace maxvol;

namespace {

const SviParams kFig3{0.04, 0.2, 0.0, 0.0, 0.2};

PriceCube analytic_cube(double dk, double dt_slice, int slices,
                        double (*f)(double, double, double)) {
  ForwardGrid g = build_forward_grid(100.0, 120.0, dt_slice * slices, dk, dt_slice);
  std::vector<int> steps;
  for (int s = 0; s <= slices; ++s) steps.push_back(s);
  PriceCube cube(g, MarketParams(100.0, 0.1, 0.05), steps);
  for (int s = 0; s <= slices; ++s)
    for (int j = 0; j <= g.p; ++j) {
      Eigen::ArrayXd layer(g.layer_size(j));
      for (int i = 0; i < g.layer_size(j); ++i)
        layer[i] = f ? f(g.strike(i), g.barrier(j), g.time(s)) : 0.0;
      cube.layer(s, j) = layer;
    }
  return cube;
}

}  // namespace

TEST_CASE("cube derivatives: linear in K has no cross gamma") {
  PriceCube cube = analytic_cube(0.5, 0.05, 6, [](double k, double, double) { return 3.0 * k; });
  const ForwardGrid& g = cube.grid();
  CubeDerivs d = cube_derivatives(cube, 3, g.p / 2, g.layer_size(g.p / 2) / 2);
  REQUIRE(d.complete);
  CHECK(std::abs(d.ckb) < 1e-10);
  CHECK(std::abs(d.ckkb) < 1e-10);
}

TEST_CASE("cube derivatives: K^2 B is differentiated exactly") {
  PriceCube cube =
      analytic_cube(0.5, 0.05, 6, [](double k, double b, double) { return k * k * b; });
  const ForwardGrid& g = cube.grid();
  for (int j : {2, g.p / 2}) {
    CubeDerivs d = cube_derivatives(cube, 3, j, 40);
    REQUIRE(d.complete);
    CHECK(d.ckkb == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(d.ckb == doctest::Approx(2.0 * g.strike(40)).epsilon(1e-9));
    CHECK(std::abs(d.cbt) < 1e-9);
  }
}

TEST_CASE("cube derivatives: smooth function, empirical order >= 1.8") {
  auto f = [](double k, double b, double t) {
    return std::exp(-k / 60.0) * std::sin(b / 17.0) * (1.0 + 0.5 * std::cos(t));
  };
  auto exact_ckkb = [&](double k, double b, double t) {
    return (1.0 / 3600.0) * std::exp(-k / 60.0) * std::cos(b / 17.0) / 17.0 *
           (1.0 + 0.5 * std::cos(t));
  };
  double errs[2];
  double dks[2] = {0.5, 0.25};
  for (int r = 0; r < 2; ++r) {
    PriceCube cube = analytic_cube(dks[r], 0.05 * (r == 0 ? 1.0 : 0.5), r == 0 ? 6 : 12,
                                   nullptr);
    // refill with f (analytic_cube needs a function pointer; do it manually)
    const ForwardGrid& g = cube.grid();
    for (int s = 0; s < cube.slices(); ++s)
      for (int j = 0; j <= g.p; ++j)
        for (int i = 0; i < g.layer_size(j); ++i)
          cube.layer(s, j)[i] = f(g.strike(i), g.barrier(j), cube.slice_time(s));
    int j = g.p / 2, i = g.layer_size(j) / 2, s = cube.slices() / 2;
    CubeDerivs d = cube_derivatives(cube, s, j, i);
    REQUIRE(d.complete);
    errs[r] = std::abs(d.ckkb - exact_ckkb(g.strike(i), g.barrier(j), cube.slice_time(s)));
  }
  CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
}

TEST_CASE("recovery: constant vol round trip within one percent") {
  MarketParams mkt(100.0, 0.1, 0.05);
  ConstantVol surf(0.25);
  ForwardGrid g = build_forward_grid(100.0, 120.0, 1.0, 0.25, 1.0 / 400);
  ForwardSolverConfig cfg;
  cfg.store_every = 10;
  PriceCube cube = solve_all(g, surf, mkt, cfg);
  RecoveredSurface rec = recover_sigma(cube, 1.0);
  long tested = 0;
  for (int s = 2; s < cube.slices(); ++s) {
    if (cube.slice_time(s) < 0.25) continue;
    for (int j = 1; j < g.p; ++j)
      for (int i = 1; i < g.layer_size(j) - 1; ++i) {
        if (!rec.valid(s, j, i)) continue;
        ++tested;
        CHECK(rec.sigma(s, j, i) == doctest::Approx(0.25).epsilon(0.01));
      }
  }
  CHECK(tested > 10000);
}

TEST_CASE("recovery: masks the zero-strike column and reports stats") {
  MarketParams mkt(100.0, 0.1, 0.05);
  ConstantVol surf(0.25);
  ForwardGrid g = build_forward_grid(100.0, 110.0, 0.5, 0.5, 1.0 / 100);
  ForwardSolverConfig cfg;
  cfg.store_every = 10;
  PriceCube cube = solve_all(g, surf, mkt, cfg);
  RecoveredSurface rec = recover_sigma(cube);
  for (int s = 0; s < cube.slices(); ++s)
    for (int j = 0; j <= g.p; ++j) {
      CHECK_FALSE(rec.valid(s, j, 0));                      // K = 0: zero denominator
      CHECK_FALSE(rec.valid(s, j, g.top_index(j)));         // K = B row
    }
  for (int j = 0; j <= g.p; ++j)
    for (int i = 0; i < g.layer_size(j); ++i) {
      CHECK_FALSE(rec.valid(0, j, i));  // first two slices excluded
      CHECK_FALSE(rec.valid(1, j, i));
    }
  CHECK(rec.valid_count > 0);
}

TEST_CASE("recovery is scale equivariant") {
  MarketParams mkt(100.0, 0.1, 0.05);
  SviAverageVol surf(kFig3, 100.0);
  ForwardGrid g = build_forward_grid(100.0, 110.0, 0.5, 0.5, 1.0 / 100);
  ForwardSolverConfig fc;
  fc.store_every = 10;
  PriceCube cube = solve_all(g, surf, mkt, fc);
  PriceCube scaled = cube;
  for (int s = 0; s < scaled.slices(); ++s)
    for (int j = 0; j <= g.p; ++j) scaled.layer(s, j) *= 3.7;
  RecoveredSurface a = recover_sigma(cube, 1e-4);
  RecoveredSurface b = recover_sigma(scaled, 3.7e-4);  // threshold scales with the cube
  long compared = 0;
  for (int s = 2; s < cube.slices(); ++s)
    for (int j = 1; j < g.p; ++j)
      for (int i = 1; i < g.layer_size(j) - 1; ++i) {
        if (!a.valid(s, j, i) || !b.valid(s, j, i)) continue;
        ++compared;
        CHECK(b.sigma(s, j, i) == doctest::Approx(a.sigma(s, j, i)).epsilon(1e-6));
      }
  CHECK(compared > 1000);
}

TEST_CASE("negative variance nodes are masked and counted") {
  // positive K-curvature but a falling term structure: the numerator goes
  // negative while the denominator stays valid; never surfaces as sigma
  PriceCube cube = analytic_cube(
      0.5, 0.05, 6, [](double k, double b, double t) { return k * k * b * (1.0 - 0.4 * t) * 1e-4; });
  RecoveredSurface rec = recover_sigma(cube, 1e-9);
  CHECK(rec.negative_variance_count > 0);
  const ForwardGrid& g = cube.grid();
  for (int s = 2; s < cube.slices(); ++s)
    for (int j = 1; j < g.p; ++j)
      for (int i = 1; i < g.layer_size(j) - 1; ++i)
        if (rec.valid(s, j, i)) CHECK(rec.sigma(s, j, i) > 0.0);
}
