#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "maxvol/forward_pide.hpp"
#include "maxvol/operators.hpp"

using namespace maxvol;

TEST_CASE("first difference of a constant vanishes") {
  double dk = 0.3;
  DifferenceOperators ops = assemble_operators(7, dk);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(7, 3.7);
  CHECK((ops.d1 * c).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("second difference is exact on quadratics") {
  double dk = 0.25;
  int n = 9;
  DifferenceOperators ops = assemble_operators(n, dk);
  Eigen::VectorXd q(n);
  for (int i = 0; i < n; ++i) q[i] = (i * dk) * (i * dk);
  Eigen::VectorXd d2 = ops.d2 * q;
  for (int i = 0; i < n; ++i) CHECK(d2[i] == doctest::Approx(2.0).epsilon(1e-10));
  // first difference interior rows are exact on linears
  Eigen::VectorXd lin(n);
  for (int i = 0; i < n; ++i) lin[i] = 2.0 + 5.0 * i * dk;
  Eigen::VectorXd d1 = ops.d1 * lin;
  for (int i = 0; i < n; ++i) CHECK(d1[i] == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("third-difference rows are exact on cubics") {
  double dk = 0.5;
  int n = 11;
  DifferenceOperators ops = assemble_operators(n, dk);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c[i] = std::pow(i * dk, 3);
  Eigen::VectorXd d3 = ops.phi * c;
  for (int i = 0; i < n; ++i) CHECK(d3[i] == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("too-coarse grids are rejected") {
  CHECK_THROWS_AS(assemble_operators(4, 0.1), GridError);
  CHECK_THROWS_AS(assemble_operators(8, 0.0), GridError);
}

TEST_CASE("banded layer assembly equals the dense reference") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto stencil : {BoundaryStencil::four_point, BoundaryStencil::boundary_cubic}) {
    for (int n : {6, 9, 30}) {
      LayerSystem sys;
      sys.n = n;
      sys.dk = 0.2;
      sys.stencil = stencil;
      sys.conv.resize(n);
      sys.diff.resize(n);
      sys.bnd.resize(n);
      for (int i = 0; i < n; ++i) {
        sys.conv[i] = u(rng);
        sys.diff[i] = u(rng);
        sys.bnd[i] = u(rng);
      }
      sys.diff[0] = 0.0;  // the K = 0 row has no diffusion by construction
      Eigen::MatrixXd banded = sys.matrix().dense();
      Eigen::MatrixXd dense = sys.dense();
      CHECK((banded - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("layer system from the grid has the documented structure") {
  MarketParams mkt(100.0, 0.1, 0.05);
  ConstantVol surf(0.25);
  ForwardGrid g = build_forward_grid(100.0, 110.0, 1.0, 2.5, 0.01);
  LayerSystem sys = build_layer_system(g, g.p, 0.3, surf, mkt);
  CHECK(sys.conv[0] == 0.0);
  CHECK(sys.diff[0] == 0.0);
  CHECK(sys.bnd[sys.n - 1] == 0.0);  // (B - K)^+ vanishes at the top node
  for (int i = 1; i < sys.n; ++i) CHECK(sys.diff[i] <= 0.0);
  for (int i = 0; i + 1 < sys.n; ++i) CHECK(sys.bnd[i] < 0.0);
  // Taylor-shifted correction also keeps the diffusion nonpositive
  LayerSystem tay = build_layer_system(g, g.p, 0.3, surf, mkt, DiffusionCorrection::taylor_shift);
  for (int i = 0; i < tay.n; ++i) CHECK(tay.diff[i] <= 0.0);
}
