#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "maxvol/errors.hpp"

namespace maxvol {

/// Square matrix that is tridiagonal except for dense entries confined to the
/// last `tail_width()` (at most 4) columns. This is exactly the sparsity of
/// the layer operator L = A D + B D2 + C Phi: the one-sided third-difference
/// stencil fills the last four columns of every row, and the repeated edge
/// stencil of D2 stays inside them.
class TailBandMatrix {
 public:
  explicit TailBandMatrix(int n)
      : n_(n), tw_(std::min(4, n)), lo_(n, 0.0), di_(n, 0.0), up_(n, 0.0),
        tail_(static_cast<std::size_t>(n) * tw_, 0.0) {
    if (n < 1) throw GridError("TailBandMatrix: size must be >= 1");
  }

  int size() const { return n_; }
  int tail_width() const { return tw_; }
  int first_tail_col() const { return n_ - tw_; }

  /// Accumulates an entry. Columns >= first_tail_col() go to the tail block;
  /// other columns must lie on the tridiagonal band.
  void add(int i, int j, double v) {
    int nb = first_tail_col();
    if (j >= nb) {
      tail_[static_cast<std::size_t>(i) * tw_ + (j - nb)] += v;
      return;
    }
    if (j == i - 1)
      lo_[i] += v;
    else if (j == i)
      di_[i] += v;
    else if (j == i + 1)
      up_[i] += v;
    else
      throw GridError("TailBandMatrix: entry outside band and tail columns");
  }

  void set_zero() {
    std::fill(lo_.begin(), lo_.end(), 0.0);
    std::fill(di_.begin(), di_.end(), 0.0);
    std::fill(up_.begin(), up_.end(), 0.0);
    std::fill(tail_.begin(), tail_.end(), 0.0);
  }

  /// Replaces row i by the identity row (Dirichlet enforcement in a step
  /// system without touching the operator it was built from).
  void set_identity_row(int i) {
    lo_[i] = di_[i] = up_[i] = 0.0;
    for (int k = 0; k < tw_; ++k) tail_[static_cast<std::size_t>(i) * tw_ + k] = 0.0;
    add(i, i, 1.0);
  }

  double coeff(int i, int j) const {
    int nb = first_tail_col();
    if (j >= nb) return tail_[static_cast<std::size_t>(i) * tw_ + (j - nb)];
    if (j == i - 1) return lo_[i];
    if (j == i) return di_[i];
    if (j == i + 1) return up_[i];
    return 0.0;
  }

  /// y = A x
  void multiply(const double* x, double* y) const {
    int nb = first_tail_col();
    const double* xt = x + nb;
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      if (i >= 1 && i - 1 < nb) s += lo_[i] * x[i - 1];
      if (i < nb) s += di_[i] * x[i];
      if (i + 1 < nb) s += up_[i] * x[i + 1];
      const double* t = &tail_[static_cast<std::size_t>(i) * tw_];
      for (int k = 0; k < tw_; ++k) s += t[k] * xt[k];
      y[i] = s;
    }
  }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(n_);
    multiply(x.data(), y.data());
    return y;
  }

  /// I + c * A, same sparsity.
  TailBandMatrix identity_plus(double c) const {
    TailBandMatrix b(n_);
    for (int i = 0; i < n_; ++i) {
      b.lo_[i] = c * lo_[i];
      b.di_[i] = c * di_[i];
      b.up_[i] = c * up_[i];
      for (int k = 0; k < tw_; ++k)
        b.tail_[static_cast<std::size_t>(i) * tw_ + k] =
            c * tail_[static_cast<std::size_t>(i) * tw_ + k];
      b.add(i, i, 1.0);
    }
    return b;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a(i, j) = coeff(i, j);
    return a;
  }

 private:
  friend class TailBandLU;
  int n_, tw_;
  std::vector<double> lo_, di_, up_;
  std::vector<double> tail_;  // row-major n x tw block of the last columns
};

/// O(n) elimination for TailBandMatrix systems. The band sweep kills the
/// subdiagonal while the tail columns absorb all fill-in; the trailing
/// tail x tail block is solved densely with partial pivoting. Reusable
/// across right-hand sides.
class TailBandLU {
 public:
  TailBandLU() = default;
  explicit TailBandLU(const TailBandMatrix& a) { factor(a); }

  /// Refactors in place, reusing storage.
  void factor(const TailBandMatrix& a);

  void solve_in_place(double* rhs) const;

  Eigen::VectorXd solve(Eigen::VectorXd rhs) const {
    solve_in_place(rhs.data());
    return rhs;
  }

 private:
  int n_ = 0, tw_ = 0, nb_ = 0;
  std::vector<double> mult_;    // forward multipliers, index = eliminated row
  std::vector<double> di_, up_;
  std::vector<double> tail_;
  std::array<double, 16> blk_{};  // LU of the trailing block
  std::array<int, 4> piv_{};
};

/// One-shot convenience: solve A x = rhs for a tridiagonal-plus-tail system.
inline Eigen::VectorXd solve_banded_plus_dense(const TailBandMatrix& a, Eigen::VectorXd rhs) {
  return TailBandLU(a).solve(std::move(rhs));
}

/// Factored tridiagonal system with contiguous multi-RHS solves (no pivoting;
/// throws on vanishing pivot). Rows marked Dirichlet are identity rows.
class TriDiagLU {
 public:
  TriDiagLU() = default;
  /// lo[0] and up[n-1] are ignored.
  TriDiagLU(const std::vector<double>& lo, const std::vector<double>& di,
            const std::vector<double>& up) {
    factor(lo, di, up);
  }

  /// Refactors in place, reusing storage.
  void factor(const std::vector<double>& lo, const std::vector<double>& di,
              const std::vector<double>& up);

  int size() const { return n_; }

  /// Solves in place for `lanes` interleaved right-hand sides:
  /// rhs[i*stride + l], l < lanes, stride >= lanes.
  void solve_lanes(double* rhs, int lanes, int stride) const;

  void solve_in_place(double* rhs) const { solve_lanes(rhs, 1, 1); }

 private:
  int n_ = 0;
  std::vector<double> mult_, inv_di_, up_;
};

}  // namespace maxvol
