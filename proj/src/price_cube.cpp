#include "maxvol/price_cube.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>

#include "maxvol/csv.hpp"
#include "maxvol/errors.hpp"

namespace maxvol {

namespace {

constexpr char kMagic[4] = {'M', 'X', 'V', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ConfigError("cube snapshot: truncated file");
  return v;
}

void put_curve(std::ostream& out, const RateCurve& c) {
  // serialized as sampled segments; reconstruct via bounds/values
  put(out, static_cast<std::uint32_t>(c.bounds().size()));
  for (double b : c.bounds()) put(out, b);
  for (double v : c.values()) put(out, v);
}

RateCurve get_curve(std::istream& in) {
  auto n = get<std::uint32_t>(in);
  std::vector<double> bounds(n), values(n);
  for (auto& b : bounds) b = get<double>(in);
  for (auto& v : values) v = get<double>(in);
  if (n == 1 && std::isinf(bounds[0])) return RateCurve(values[0]);
  return RateCurve(std::move(bounds), std::move(values));
}

}  // namespace

PriceCube::PriceCube(ForwardGrid grid, MarketParams market, std::vector<int> stored_steps)
    : grid_(grid), market_(std::move(market)), steps_(std::move(stored_steps)) {
  if (steps_.empty()) throw ConfigError("PriceCube: need at least one stored step");
  for (std::size_t s = 1; s < steps_.size(); ++s)
    if (steps_[s] <= steps_[s - 1]) throw ConfigError("PriceCube: stored steps must increase");
  if (steps_.front() < 0 || steps_.back() > grid_.m)
    throw ConfigError("PriceCube: stored step outside time grid");
  data_.assign(steps_.size(), std::vector<Eigen::ArrayXd>(grid_.p + 1));
}

int PriceCube::slice_of_step(int m) const {
  auto it = std::lower_bound(steps_.begin(), steps_.end(), m);
  if (it == steps_.end() || *it != m) return -1;
  return static_cast<int>(it - steps_.begin());
}

double PriceCube::lookup(double strike, double barrier, double t) const {
  const double dk = grid_.dk;
  if (strike < -1e-12 || strike > grid_.b_max() + 1e-12 || barrier < grid_.spot() - 1e-12 ||
      barrier > grid_.b_max() + 1e-12 || t < -1e-12 || t > grid_.t_max + 1e-12)
    throw DomainError("PriceCube::lookup: query outside grid hull");

  // Slice bracket in T.
  double tpos = t / grid_.dt;
  int s1 = 0;
  while (s1 + 1 < slices() && steps_[s1 + 1] <= tpos + 1e-9) ++s1;
  int s2 = s1;
  double wt = 0.0;
  if (std::abs(steps_[s1] - tpos) > 1e-9 && s1 + 1 < slices()) {
    s2 = s1 + 1;
    wt = (tpos - steps_[s1]) / (steps_[s2] - steps_[s1]);
  }

  double bpos = (barrier - grid_.spot()) / dk;
  int j1 = std::clamp(static_cast<int>(std::floor(bpos)), 0, grid_.p);
  double wb = bpos - j1;
  int j2 = j1;
  if (wb > 1e-12 && j1 < grid_.p) j2 = j1 + 1;
  else wb = 0.0;

  double kpos = strike / dk;
  int i1 = std::clamp(static_cast<int>(std::floor(kpos)), 0, grid_.n);
  double wk = kpos - i1;
  int i2 = std::min(i1 + 1, grid_.n);
  if (wk <= 1e-12) { i2 = i1; wk = 0.0; }

  auto plane = [&](int s) {
    double v11 = value(s, j1, i1), v12 = value(s, j1, i2);
    double v21 = value(s, j2, i1), v22 = value(s, j2, i2);
    double lo = (1.0 - wk) * v11 + wk * v12;
    double hi = (1.0 - wk) * v21 + wk * v22;
    return (1.0 - wb) * lo + wb * hi;
  };
  double cap = (1.0 - wt) * plane(s1) + (s2 != s1 ? wt * plane(s2) : 0.0);
  return cap / market_.capitalization(t);
}

void PriceCube::write_csv(std::ostream& out) const {
  csv::header(out, "cube", "K,B,T,capitalized,price");
  for (int s = 0; s < slices(); ++s) {
    double t = slice_time(s);
    double q = market_.capitalization(t);
    for (int j = 0; j <= grid_.p; ++j) {
      for (int i = 0; i < grid_.layer_size(j); ++i) {
        double cap = value(s, j, i);
        out << csv::num(grid_.strike(i)) << ',' << csv::num(grid_.barrier(j)) << ','
            << csv::num(t) << ',' << csv::num(cap) << ',' << csv::num(cap / q) << '\n';
      }
    }
  }
}

void PriceCube::write_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cube snapshot: cannot open " + path);
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, grid_.dk);
  put(out, grid_.dt);
  put(out, static_cast<std::int32_t>(grid_.n));
  put(out, static_cast<std::int32_t>(grid_.p));
  put(out, static_cast<std::int32_t>(grid_.m));
  put(out, static_cast<std::int32_t>(grid_.spot_index));
  put(out, grid_.t_max);
  put(out, market_.spot);
  put_curve(out, market_.rate);
  put_curve(out, market_.dividend);
  put(out, static_cast<std::uint32_t>(steps_.size()));
  for (int m : steps_) put(out, static_cast<std::int32_t>(m));
  for (const auto& slice : data_) {
    for (const auto& layer : slice) {
      put(out, static_cast<std::uint32_t>(layer.size()));
      out.write(reinterpret_cast<const char*>(layer.data()),
                static_cast<std::streamsize>(layer.size() * sizeof(double)));
    }
  }
  if (!out) throw ConfigError("cube snapshot: write failed for " + path);
}

PriceCube PriceCube::read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cube snapshot: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("cube snapshot: bad magic bytes");
  if (get<std::uint32_t>(in) != kVersion) throw ConfigError("cube snapshot: unknown version");
  ForwardGrid g;
  g.dk = get<double>(in);
  g.dt = get<double>(in);
  g.n = get<std::int32_t>(in);
  g.p = get<std::int32_t>(in);
  g.m = get<std::int32_t>(in);
  g.spot_index = get<std::int32_t>(in);
  g.t_max = get<double>(in);
  double spot = get<double>(in);
  RateCurve rate = get_curve(in);
  RateCurve dividend = get_curve(in);
  auto n_slices = get<std::uint32_t>(in);
  std::vector<int> steps(n_slices);
  for (auto& m : steps) m = get<std::int32_t>(in);
  PriceCube cube(g, MarketParams(spot, std::move(rate), std::move(dividend)), std::move(steps));
  for (auto& slice : cube.data_) {
    for (auto& layer : slice) {
      auto len = get<std::uint32_t>(in);
      layer.resize(len);
      in.read(reinterpret_cast<char*>(layer.data()),
              static_cast<std::streamsize>(len * sizeof(double)));
      if (!in) throw ConfigError("cube snapshot: truncated values");
    }
  }
  return cube;
}

}  // namespace maxvol
