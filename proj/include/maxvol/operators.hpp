#pragma once

#include <Eigen/Dense>

#include "maxvol/errors.hpp"

namespace maxvol {

/// Dense difference operators on a uniform strike grid of n nodes:
///   d1  — first derivative, central with one-sided first-order edge rows;
///   d2  — second derivative, edge rows repeating the adjacent stencil;
///   phi — one-sided third derivative at the right boundary, the 4-point
///         stencil (-1, 3, -3, 1)/dk^3 in the last four columns of every row.
/// Used as the reference assembly; solvers build the same rows in banded form.
struct DifferenceOperators {
  Eigen::MatrixXd d1;
  Eigen::MatrixXd d2;
  Eigen::MatrixXd phi;
};

inline DifferenceOperators assemble_operators(int n, double dk) {
  if (n < 5) throw GridError("assemble_operators: need at least 5 nodes");
  if (!(dk > 0.0)) throw GridError("assemble_operators: dk must be > 0");
  DifferenceOperators ops;
  ops.d1 = Eigen::MatrixXd::Zero(n, n);
  ops.d2 = Eigen::MatrixXd::Zero(n, n);
  ops.phi = Eigen::MatrixXd::Zero(n, n);

  ops.d1(0, 0) = -1.0 / dk;
  ops.d1(0, 1) = 1.0 / dk;
  for (int i = 1; i < n - 1; ++i) {
    ops.d1(i, i - 1) = -0.5 / dk;
    ops.d1(i, i + 1) = 0.5 / dk;
  }
  ops.d1(n - 1, n - 2) = -1.0 / dk;
  ops.d1(n - 1, n - 1) = 1.0 / dk;

  double w2 = 1.0 / (dk * dk);
  for (int i = 0; i < n; ++i) {
    int c = std::min(std::max(i, 1), n - 2);  // edge rows repeat the adjacent stencil
    ops.d2(i, c - 1) += w2;
    ops.d2(i, c) += -2.0 * w2;
    ops.d2(i, c + 1) += w2;
  }

  double w3 = 1.0 / (dk * dk * dk);
  for (int i = 0; i < n; ++i) {
    ops.phi(i, n - 4) = -w3;
    ops.phi(i, n - 3) = 3.0 * w3;
    ops.phi(i, n - 2) = -3.0 * w3;
    ops.phi(i, n - 1) = w3;
  }
  return ops;
}

}  // namespace maxvol
