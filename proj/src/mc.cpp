#include "maxvol/mc.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <thread>

#include "maxvol/analytic.hpp"

namespace maxvol {

namespace {

/// SplitMix64 per-path substream. The (seed, path) pair is run through the
/// SplitMix finalizer first so distinct paths start at pseudo-random orbit
/// positions instead of adjacent ones (adjacent starts would make paths
/// share almost all of their draws, shifted by one).
struct PathRng {
  std::uint64_t state;

  PathRng(std::uint64_t seed, std::uint64_t path) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (path + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    state = z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1), never returning the endpoints.
  double next_uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double next_normal() { return inv_norm_cdf(next_uniform()); }
};

struct PathResult {
  double spot;
  double maxi;
};

struct PathSpec {
  double log_spot0;
  double t_end;
  int n_steps;
  double dt;
  bool bridge;
  bool antithetic_branch;  // negate the normal draws
};

/// One path of the mimicking SDE in log space. rng is shared between the two
/// antithetic branches by the caller re-seeding it identically.
PathResult run_path(const PathSpec& ps, const VolSurface& surface, const MarketParams& market,
                    PathRng& rng) {
  double lx = ps.log_spot0;
  double lm = ps.log_spot0;
  const double spot0 = std::exp(ps.log_spot0);
  double t = 0.0;
  double s_lvl = spot0, m_lvl = spot0;
  for (int k = 0; k < ps.n_steps; ++k) {
    double vol = surface.sigma(std::min(s_lvl, m_lvl), m_lvl, t);
    double mu = market.drift(t);
    double z = rng.next_normal();
    if (ps.antithetic_branch) z = -z;
    double sdt = vol * std::sqrt(ps.dt);
    double lx1 = lx + (mu - 0.5 * vol * vol) * ps.dt + sdt * z;
    if (ps.bridge) {
      double u = rng.next_uniform();
      if (ps.antithetic_branch) u = 1.0 - u;
      // maximum of the in-step bridge given both endpoints
      double disc = (lx1 - lx) * (lx1 - lx) - 2.0 * sdt * sdt * std::log(u);
      double lmax = 0.5 * (lx + lx1 + std::sqrt(std::max(disc, 0.0)));
      lm = std::max(lm, lmax);
    } else {
      lm = std::max(lm, lx1);
    }
    lx = lx1;
    t += ps.dt;
    s_lvl = std::exp(lx);
    m_lvl = std::exp(lm);
  }
  return {s_lvl, m_lvl};
}

constexpr std::int64_t kBlock = 8192;

template <typename PerPath>
void run_blocks(std::int64_t n_units, int threads, PerPath per_unit) {
  const std::int64_t n_blocks = (n_units + kBlock - 1) / kBlock;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n_blocks)));
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::int64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      std::int64_t lo = b * kBlock, hi = std::min(n_units, lo + kBlock);
      for (std::int64_t p = lo; p < hi; ++p) per_unit(p);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
}

}  // namespace

McEstimate simulate_price(const BackwardDeal& deal, const VolSurface& surface,
                          const MarketParams& market, const McConfig& cfg) {
  cfg.validate();
  deal.validate();
  McEstimate est;
  est.paths = cfg.paths;
  if (deal.barrier <= market.spot) return est;  // knocked out at inception, zero variance

  PathSpec ps;
  ps.log_spot0 = std::log(market.spot);
  ps.t_end = deal.maturity;
  ps.n_steps = std::max(1, static_cast<int>(std::lround(cfg.steps_per_year * deal.maturity)));
  ps.dt = deal.maturity / ps.n_steps;
  ps.bridge = cfg.crossing == BarrierCrossing::brownian_bridge;

  const double df = market.discount(deal.maturity);
  const std::int64_t n_units = cfg.antithetic ? (cfg.paths + 1) / 2 : cfg.paths;
  std::vector<double> unit_value(n_units);

  run_blocks(n_units, cfg.threads, [&](std::int64_t p) {
    auto payoff = [&](const PathResult& r) {
      return r.maxi < deal.barrier ? df * std::max(r.spot - deal.strike, 0.0) : 0.0;
    };
    PathSpec spec = ps;
    spec.antithetic_branch = false;
    PathRng rng(cfg.seed, static_cast<std::uint64_t>(p));
    double v = payoff(run_path(spec, surface, market, rng));
    if (cfg.antithetic) {
      PathRng rng2(cfg.seed, static_cast<std::uint64_t>(p));
      spec.antithetic_branch = true;
      v = 0.5 * (v + payoff(run_path(spec, surface, market, rng2)));
    }
    unit_value[p] = v;
  });

  // fixed-order reduction
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t p = 0; p < n_units; ++p) {
    sum += unit_value[p];
    sum2 += unit_value[p] * unit_value[p];
  }
  double mean = sum / n_units;
  est.value = mean;
  if (n_units > 1) {
    double var = std::max(0.0, (sum2 - n_units * mean * mean) / (n_units - 1));
    est.std_error = std::sqrt(var / n_units);
  }
  return est;
}

JointSample simulate_joint_sample(const VolSurface& surface, const MarketParams& market,
                                  const McConfig& cfg, double t_end) {
  cfg.validate();
  if (!(t_end > 0.0)) throw ConfigError("simulate_joint_sample: t_end must be > 0");
  PathSpec ps;
  ps.log_spot0 = std::log(market.spot);
  ps.t_end = t_end;
  ps.n_steps = std::max(1, static_cast<int>(std::lround(cfg.steps_per_year * t_end)));
  ps.dt = t_end / ps.n_steps;
  ps.bridge = cfg.crossing == BarrierCrossing::brownian_bridge;
  ps.antithetic_branch = false;

  JointSample out;
  out.spot.resize(cfg.paths);
  out.maxi.resize(cfg.paths);
  run_blocks(cfg.paths, cfg.threads, [&](std::int64_t p) {
    PathRng rng(cfg.seed, static_cast<std::uint64_t>(p));
    PathResult r = run_path(ps, surface, market, rng);
    out.spot[p] = r.spot;
    out.maxi[p] = r.maxi;
  });
  return out;
}

}  // namespace maxvol
