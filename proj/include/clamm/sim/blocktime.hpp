#pragma once

#include "clamm/fixmath/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace clamm::sim {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSecondsPerYear = 365.0 * kSecondsPerDay;

/// Per-sqrt-second volatility from an annualised one.
inline double sigma_from_annual(double annual) { return annual / std::sqrt(kSecondsPerYear); }

struct SimConfig {
  double sigma{sigma_from_annual(0.8)};  // per sqrt(second)
  double gamma{0.0005};
  double tau{12.0};                      // block time, seconds
  double horizon_seconds{3600.0};
  std::uint64_t paths{1000};
  std::uint64_t seed{1};
  double pool_value_usd{1e6};
  double price0{2000.0};
  double fixed_cost_usd{0.0};            // arbitrageur cost per trade
  unsigned threads{0};                   // 0: hardware concurrency

  void validate() const {
    if (!(sigma >= 0) || !std::isfinite(sigma)) throw DomainError("sigma must be finite and non-negative");
    if (!(gamma >= 0 && gamma < 1)) throw DomainError("gamma must lie in [0, 1)");
    if (!(tau > 0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
    if (!(horizon_seconds >= tau) || !std::isfinite(horizon_seconds)) throw DomainError("horizon must cover one block");
    if (paths < 1) throw DomainError("paths must be at least 1");
    if (!(pool_value_usd > 0) || !(price0 > 0)) throw DomainError("pool value and price must be positive");
    if (!(fixed_cost_usd >= 0)) throw DomainError("fixed cost must be non-negative");
  }
};

struct Estimate {
  double mean{0};
  double std_error{0};
};

struct SimResult {
  Estimate fees_per_day_usd;
  Estimate arb_profit_per_day_usd;  // net of fees and fixed costs
  double trades_per_day{0};
  std::uint64_t paths{0};
};

/// Totals for one price path.
struct PathTotals {
  double fees_usd{0};
  double arb_profit_usd{0};
  std::uint64_t trades{0};
  std::uint64_t blocks{0};
};

/// What happened at one block; passed to an optional observer.
struct BlockRecord {
  double time{0};
  double external_log{0};
  double pool_log_before{0};
  double pool_log_after{0};
  bool traded{false};
  double profit_usd{0};
  double fee_usd{0};
};

using BlockObserver = std::function<void(const BlockRecord&)>;

/// Full-range constant-product pool with fees paid outside the reserves, arbitraged
/// myopically against an external price.
class CpmmArb {
 public:
  CpmmArb(const SimConfig& c)
      : log_band_(-std::log1p(-c.gamma)),
        log_keep_(std::log1p(-c.gamma)),
        one_minus_gamma_(1.0 - c.gamma),
        gamma_(c.gamma),
        cost_(c.fixed_cost_usd),
        pool_log_(std::log(c.price0)),
        y_(c.pool_value_usd / 2) {}

  double pool_log() const { return pool_log_; }
  double numeraire_reserve() const { return y_; }

  /// Arbitrage against external log price s. Returns true when a trade happens.
  bool step(double s, PathTotals& t, BlockRecord* rec) {
    const double gap = s - pool_log_;
    double profit = 0;
    double fee = 0;
    double new_log = pool_log_;
    double growth = 0;  // log of the numeraire reserve multiplier
    if (gap > log_band_) {
      // Buy the risky asset until pool price = S(1-gamma).
      const double h = 0.5 * (gap + log_keep_);
      const double rm1 = std::expm1(h);
      profit = y_ * rm1 * rm1 / one_minus_gamma_;
      fee = gamma_ * y_ * rm1 / one_minus_gamma_;
      new_log = s + log_keep_;
      growth = h;
    } else if (-gap > log_band_) {
      // Sell the risky asset until pool price = S/(1-gamma).
      const double h = 0.5 * (-gap + log_keep_);
      const double rm1 = std::expm1(h);
      const double r2 = std::exp(2 * h);
      profit = y_ * rm1 * rm1 / r2;
      fee = gamma_ * y_ * rm1 / r2;
      new_log = s - log_keep_;
      growth = -h;
    }
    const bool trade = new_log != pool_log_ && profit >= cost_ && profit > 0;
    if (rec) {
      rec->external_log = s;
      rec->pool_log_before = pool_log_;
      rec->traded = trade;
      rec->profit_usd = trade ? profit - cost_ : 0;
      rec->fee_usd = trade ? fee : 0;
    }
    if (trade) {
      t.arb_profit_usd += profit - cost_;
      t.fees_usd += fee;
      ++t.trades;
      pool_log_ = new_log;
      y_ *= std::exp(growth);
    }
    if (rec) rec->pool_log_after = pool_log_;
    ++t.blocks;
    return trade;
  }

 private:
  double log_band_;
  double log_keep_;
  double one_minus_gamma_;
  double gamma_;
  double cost_;
  double pool_log_;
  double y_;
};

inline std::uint64_t block_count(double horizon, double tau) {
  return static_cast<std::uint64_t>(std::floor(horizon / tau + 1e-9));
}

/// Independent generator for one path, derived from (seed, path index).
inline std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(seq);
}

inline PathTotals simulate_path(const SimConfig& c, std::uint64_t path, const BlockObserver& observe = {}) {
  std::mt19937_64 rng = path_rng(c.seed, path);
  std::normal_distribution<double> z(0.0, 1.0);
  CpmmArb pool(c);
  PathTotals t;
  const double step_sd = c.sigma * std::sqrt(c.tau);
  double s = std::log(c.price0);
  const std::uint64_t n = block_count(c.horizon_seconds, c.tau);
  BlockRecord rec;
  for (std::uint64_t k = 1; k <= n; ++k) {
    s += step_sd * z(rng);
    if (observe) {
      rec.time = static_cast<double>(k) * c.tau;
      pool.step(s, t, &rec);
      observe(rec);
    } else {
      pool.step(s, t, nullptr);
    }
  }
  return t;
}

namespace detail {

template <typename Fn>
void for_paths(std::uint64_t paths, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, paths));
  if (threads <= 1) {
    for (std::uint64_t p = 0; p < paths; ++p) fn(p);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint64_t p = w; p < paths; p += threads) fn(p);
    });
  }
  for (auto& th : pool) th.join();
}

inline Estimate estimate(const std::vector<double>& v) {
  Estimate e;
  const auto n = static_cast<double>(v.size());
  double sum = 0;
  for (double x : v) sum += x;
  e.mean = sum / n;
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / (n - 1) / n);
  }
  return e;
}

}  // namespace detail

/// Monte Carlo over independent paths. Results depend only on the config, not on threading.
inline SimResult simulate(const SimConfig& c) {
  c.validate();
  std::vector<PathTotals> totals(c.paths);
  detail::for_paths(c.paths, c.threads, [&](std::uint64_t p) { totals[p] = simulate_path(c, p); });
  const double days = static_cast<double>(block_count(c.horizon_seconds, c.tau)) * c.tau / kSecondsPerDay;
  std::vector<double> fees(c.paths);
  std::vector<double> profit(c.paths);
  double trades = 0;
  for (std::uint64_t p = 0; p < c.paths; ++p) {
    fees[p] = totals[p].fees_usd / days;
    profit[p] = totals[p].arb_profit_usd / days;
    trades += static_cast<double>(totals[p].trades);
  }
  SimResult r;
  r.fees_per_day_usd = detail::estimate(fees);
  r.arb_profit_per_day_usd = detail::estimate(profit);
  r.trades_per_day = trades / static_cast<double>(c.paths) / days;
  r.paths = c.paths;
  return r;
}

struct ScalingFit {
  double slope{0};
  double intercept{0};
  std::size_t points_used{0};
  std::vector<std::string> warnings;
};

/// OLS slope of log(profit) on log(tau). Non-positive profits are dropped with a warning.
inline ScalingFit scaling_exponent(const std::vector<double>& taus, const std::vector<double>& profits) {
  if (taus.size() != profits.size()) throw DomainError("tau and profit grids differ in length");
  if (taus.size() < 4) throw DomainError("scaling fit needs at least 4 tau values");
  const auto [lo, hi] = std::minmax_element(taus.begin(), taus.end());
  if (!(*lo > 0) || *hi / *lo < 100.0 * (1 - 1e-12)) throw DomainError("tau grid must span at least two decades");
  ScalingFit f;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(profits[i] > 0)) {
      f.warnings.push_back("tau " + std::to_string(taus[i]) + ": non-positive profit excluded");
      continue;
    }
    xs.push_back(std::log(taus[i]));
    ys.push_back(std::log(profits[i]));
  }
  f.points_used = xs.size();
  if (xs.size() < 2) throw DomainError("fewer than two positive profits to fit");
  const double n = static_cast<double>(xs.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0;
  double sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0) throw DomainError("tau values are identical");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

struct TauRow {
  double tau{0};
  SimResult result;
};

/// Runs `base` at every tau with the same seed policy.
inline std::vector<TauRow> simulate_grid(SimConfig base, const std::vector<double>& taus) {
  std::vector<TauRow> rows;
  for (double t : taus) {
    base.tau = t;
    rows.push_back({t, simulate(base)});
  }
  return rows;
}

inline ScalingFit scaling_exponent(const std::vector<TauRow>& rows) {
  std::vector<double> taus;
  std::vector<double> profits;
  for (const auto& r : rows) {
    taus.push_back(r.tau);
    profits.push_back(r.result.arb_profit_per_day_usd.mean);
  }
  return scaling_exponent(taus, profits);
}

struct FcfsComparison {
  double fee_uplift_fraction{0};        // fees(fast) / fees(slow) - 1
  double profit_reduction_fraction{0};  // 1 - profit(fast) / profit(slow)
  double fees_fast_per_day{0};
  double fees_slow_per_day{0};
  double profit_fast_per_day{0};
  double profit_slow_per_day{0};
};

/// Both block times observe the same Brownian path: increments are drawn on the merged grid
/// of the two block schedules, so each chain sees the path at its own block times.
inline std::pair<PathTotals, PathTotals> simulate_paired_path(const SimConfig& c, double tau_fast, double tau_slow,
                                                              std::uint64_t path) {
  std::mt19937_64 rng = path_rng(c.seed, path);
  std::normal_distribution<double> z(0.0, 1.0);
  CpmmArb fast(c);
  CpmmArb slow(c);
  PathTotals tf;
  PathTotals ts;
  const std::uint64_t nf = block_count(c.horizon_seconds, tau_fast);
  const std::uint64_t ns = block_count(c.horizon_seconds, tau_slow);
  std::uint64_t kf = 1;
  std::uint64_t ks = 1;
  double s = std::log(c.price0);
  double now = 0;
  while (kf <= nf || ks <= ns) {
    const double next_f = kf <= nf ? static_cast<double>(kf) * tau_fast : INFINITY;
    const double next_s = ks <= ns ? static_cast<double>(ks) * tau_slow : INFINITY;
    const double t = std::min(next_f, next_s);
    s += c.sigma * std::sqrt(t - now) * z(rng);
    now = t;
    if (next_f == t) {
      fast.step(s, tf, nullptr);
      ++kf;
    }
    if (next_s == t) {
      slow.step(s, ts, nullptr);
      ++ks;
    }
  }
  return {tf, ts};
}

inline FcfsComparison compare_fcfs(SimConfig c, double tau_fast, double tau_slow) {
  c.tau = tau_fast;
  c.validate();
  if (!(tau_slow >= tau_fast)) throw DomainError("tau_fast must not exceed tau_slow");
  c.tau = tau_slow;
  c.validate();
  std::vector<std::pair<PathTotals, PathTotals>> totals(c.paths);
  detail::for_paths(c.paths, c.threads,
                    [&](std::uint64_t p) { totals[p] = simulate_paired_path(c, tau_fast, tau_slow, p); });
  const double days_f = static_cast<double>(block_count(c.horizon_seconds, tau_fast)) * tau_fast / kSecondsPerDay;
  const double days_s = static_cast<double>(block_count(c.horizon_seconds, tau_slow)) * tau_slow / kSecondsPerDay;
  double ff = 0, fs = 0, pf = 0, ps = 0;
  for (const auto& [a, b] : totals) {
    ff += a.fees_usd;
    fs += b.fees_usd;
    pf += a.arb_profit_usd;
    ps += b.arb_profit_usd;
  }
  const double n = static_cast<double>(c.paths);
  FcfsComparison r;
  r.fees_fast_per_day = ff / n / days_f;
  r.fees_slow_per_day = fs / n / days_s;
  r.profit_fast_per_day = pf / n / days_f;
  r.profit_slow_per_day = ps / n / days_s;
  r.fee_uplift_fraction = r.fees_slow_per_day > 0 ? r.fees_fast_per_day / r.fees_slow_per_day - 1 : 0;
  r.profit_reduction_fraction = r.profit_slow_per_day > 0 ? 1 - r.profit_fast_per_day / r.profit_slow_per_day : 0;
  return r;
}

}  // namespace clamm::sim
