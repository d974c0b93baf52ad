#include "maxvol/banded.hpp"

#include <cmath>

namespace maxvol {

namespace {
constexpr double kPivotFloor = 1e-300;
}

void TailBandLU::factor(const TailBandMatrix& a) {
  n_ = a.n_;
  tw_ = a.tw_;
  nb_ = a.n_ - a.tw_;
  mult_.assign(a.n_, 0.0);
  di_ = a.di_;
  up_ = a.up_;
  tail_ = a.tail_;
  const std::vector<double>& lo = a.lo_;

  // Band sweep over pivot columns 0..nb-1; fill-in lands in the tail block.
  for (int c = 0; c + 1 <= n_ - 1 && c < nb_; ++c) {
    double pivot = di_[c];
    if (std::abs(pivot) < kPivotFloor) throw NumericalError("TailBandLU: zero pivot", -1, c);
    double m = lo[c + 1] / pivot;
    mult_[c + 1] = m;
    if (c + 1 < nb_) di_[c + 1] -= m * up_[c];
    double* tc = &tail_[static_cast<std::size_t>(c) * tw_];
    double* tn = &tail_[static_cast<std::size_t>(c + 1) * tw_];
    for (int k = 0; k < tw_; ++k) tn[k] -= m * tc[k];
  }

  // Dense LU with partial pivoting of the trailing tw x tw block.
  double blk[16];
  for (int r = 0; r < tw_; ++r)
    for (int k = 0; k < tw_; ++k) blk[r * tw_ + k] = tail_[static_cast<std::size_t>(nb_ + r) * tw_ + k];
  for (int c = 0; c < tw_; ++c) {
    int best = c;
    for (int r = c + 1; r < tw_; ++r)
      if (std::abs(blk[r * tw_ + c]) > std::abs(blk[best * tw_ + c])) best = r;
    piv_[c] = best;
    if (best != c)
      for (int k = 0; k < tw_; ++k) std::swap(blk[c * tw_ + k], blk[best * tw_ + k]);
    double pivot = blk[c * tw_ + c];
    if (std::abs(pivot) < kPivotFloor) throw NumericalError("TailBandLU: singular tail block");
    for (int r = c + 1; r < tw_; ++r) {
      double m = blk[r * tw_ + c] / pivot;
      blk[r * tw_ + c] = m;
      for (int k = c + 1; k < tw_; ++k) blk[r * tw_ + k] -= m * blk[c * tw_ + k];
    }
  }
  for (int k = 0; k < tw_ * tw_; ++k) blk_[k] = blk[k];
}

void TailBandLU::solve_in_place(double* rhs) const {
  for (int c = 0; c + 1 <= n_ - 1 && c < nb_; ++c) rhs[c + 1] -= mult_[c + 1] * rhs[c];

  // Trailing dense block.
  double* xt = rhs + nb_;
  for (int c = 0; c < tw_; ++c)
    if (piv_[c] != c) std::swap(xt[c], xt[piv_[c]]);
  for (int c = 0; c < tw_; ++c)
    for (int r = c + 1; r < tw_; ++r) xt[r] -= blk_[r * tw_ + c] * xt[c];
  for (int c = tw_ - 1; c >= 0; --c) {
    double s = xt[c];
    for (int k = c + 1; k < tw_; ++k) s -= blk_[c * tw_ + k] * xt[k];
    xt[c] = s / blk_[c * tw_ + c];
  }

  // Band back-substitution against the already-known tail values.
  for (int c = nb_ - 1; c >= 0; --c) {
    double s = rhs[c];
    if (c + 1 < nb_) s -= up_[c] * rhs[c + 1];
    const double* t = &tail_[static_cast<std::size_t>(c) * tw_];
    for (int k = 0; k < tw_; ++k) s -= t[k] * xt[k];
    rhs[c] = s / di_[c];
  }
}

void TriDiagLU::factor(const std::vector<double>& lo, const std::vector<double>& di,
                       const std::vector<double>& up) {
  if (lo.size() != di.size() || up.size() != di.size())
    throw GridError("TriDiagLU: inconsistent diagonal sizes");
  n_ = static_cast<int>(di.size());
  mult_.assign(n_, 0.0);
  inv_di_.resize(n_);
  up_ = up;
  double prev = 0.0;
  for (int i = 0; i < n_; ++i) {
    double d = di[i];
    if (i > 0) {
      double m = lo[i] * prev;  // prev = 1/d[i-1]
      mult_[i] = m;
      d -= m * up_[i - 1];
    }
    if (std::abs(d) < kPivotFloor) throw NumericalError("TriDiagLU: zero pivot", -1, i);
    prev = 1.0 / d;
    inv_di_[i] = prev;
  }
}

void TriDiagLU::solve_lanes(double* rhs, int lanes, int stride) const {
  for (int i = 1; i < n_; ++i) {
    double m = mult_[i];
    double* cur = rhs + static_cast<std::size_t>(i) * stride;
    const double* prev = cur - stride;
    for (int l = 0; l < lanes; ++l) cur[l] -= m * prev[l];
  }
  {
    double inv = inv_di_[n_ - 1];
    double* last = rhs + static_cast<std::size_t>(n_ - 1) * stride;
    for (int l = 0; l < lanes; ++l) last[l] *= inv;
  }
  for (int i = n_ - 2; i >= 0; --i) {
    double u = up_[i], inv = inv_di_[i];
    double* cur = rhs + static_cast<std::size_t>(i) * stride;
    const double* next = cur + stride;
    for (int l = 0; l < lanes; ++l) cur[l] = (cur[l] - u * next[l]) * inv;
  }
}

}  // namespace maxvol
