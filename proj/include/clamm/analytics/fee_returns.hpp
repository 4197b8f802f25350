#pragma once

#include "clamm/common/median.hpp"
#include "clamm/ingest/flow.hpp"
#include "clamm/ingest/replay.hpp"
#include "clamm/ingest/stats.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clamm::analytics {

enum class FlowFilter { All, ArbitrageOnly };

inline std::string_view to_string(FlowFilter f) { return f == FlowFilter::All ? "all" : "arbitrage_only"; }

inline constexpr std::int64_t kSecondsPerDay = 86400;

inline std::int64_t utc_day(std::int64_t ts) {
  return ts >= 0 ? ts / kSecondsPerDay : -((-ts + kSecondsPerDay - 1) / kSecondsPerDay);
}

/// YYYY-MM-DD for a day count since 1970-01-01 (proleptic Gregorian).
inline std::string format_day(std::int64_t day) {
  const std::int64_t z = day + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
  const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t y = yoe + era * 400 + (m <= 2 ? 1 : 0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04lld-%02lld-%02lld", static_cast<long long>(y), static_cast<long long>(m),
                static_cast<long long>(d));
  return buf;
}

struct FeeReturnDay {
  std::int64_t day{0};
  u256 growth0_x128{0};  // fee growth per unit of liquidity accrued during the day, Q128
  u256 growth1_x128{0};
  double return_token0_per_L{0};
  double return_token1_per_L{0};
  double return_bps{0};  // of full-range position value at the day's closing price
  std::size_t swaps{0};
  SqrtPriceX96 close_price;

  std::string date() const { return format_day(day); }
};

struct FeeReturnSeries {
  std::string pool;
  FlowFilter flow{FlowFilter::All};
  std::vector<FeeReturnDay> days;
  std::vector<ingest::AuditRecord> audit;
};

namespace detail {

inline double q128_to_double(const u256& v) { return std::ldexp(v.convert_to<double>(), -128); }

/// Fees per unit liquidity as basis points of a full-range position's value.
/// Per unit L the position holds 1/sqrtP of token0 and sqrtP of token1, worth 2*sqrtP in token1.
inline double full_range_bps(double f0, double f1, const SqrtPriceX96& price) {
  const double sp = std::ldexp(price.raw().convert_to<double>(), -96);
  if (!(sp > 0)) return 0;
  return (f0 * sp * sp + f1) / (2 * sp) * 1e4;
}

class DayAccumulator {
 public:
  void observe(std::int64_t ts, const PoolState& s, std::vector<FeeReturnDay>& out) {
    const std::int64_t d = utc_day(ts);
    if (!open_) {
      open_ = true;
      day_ = d;
      start0_ = s.fee_growth_global_0();
      start1_ = s.fee_growth_global_1();
      return;
    }
    while (day_ < d) close(s, out);
  }
  void count_swap() { ++swaps_; }
  void finish(const PoolState& s, std::vector<FeeReturnDay>& out) {
    if (open_) close(s, out);
  }

 private:
  void close(const PoolState& s, std::vector<FeeReturnDay>& out) {
    FeeReturnDay r;
    r.day = day_;
    r.growth0_x128 = (s.fee_growth_global_0() - start0_).raw();
    r.growth1_x128 = (s.fee_growth_global_1() - start1_).raw();
    r.return_token0_per_L = q128_to_double(r.growth0_x128);
    r.return_token1_per_L = q128_to_double(r.growth1_x128);
    r.close_price = s.sqrt_price();
    r.return_bps = full_range_bps(r.return_token0_per_L, r.return_token1_per_L, r.close_price);
    r.swaps = swaps_;
    out.push_back(r);
    start0_ = s.fee_growth_global_0();
    start1_ = s.fee_growth_global_1();
    swaps_ = 0;
    ++day_;
  }

  bool open_{false};
  std::int64_t day_{0};
  FeeGrowthX128 start0_;
  FeeGrowthX128 start1_;
  std::size_t swaps_{0};
};

inline void skip(FeeReturnSeries& out, const ingest::PoolEvent& e, const char* why) {
  out.audit.push_back({e.coord(), e.tx_hash, e.kind, "skipped", why, ""});
}

}  // namespace detail

/// Daily fee growth of a pool on UTC days from its first event to its last.
///
/// `All` is a straight replay. `ArbitrageOnly` drops swaps routed through the registry and,
/// from the first dropped swap on, re-executes the rest as exact-input swaps of their recorded
/// input; mints and burns are applied unchanged. Re-executed swaps that meet zero liquidity or would run out of liquidity
/// are skipped and listed in `audit`.
inline FeeReturnSeries full_range_fee_returns(const ingest::ChainDataset& ds, const std::string& pool,
                                              PoolConfig config, FlowFilter flow,
                                              const ingest::RouterRegistry* registry = nullptr) {
  using ingest::EventKind;
  if (flow == FlowFilter::ArbitrageOnly) {
    if (!registry) throw DomainError("arbitrage-only fee returns need a router registry");
    if (!ds.chain.empty() && registry->chain != ds.chain) {
      throw DomainError("registry chain '" + registry->chain + "' does not match dataset chain '" + ds.chain + "'");
    }
  }
  FeeReturnSeries out;
  out.pool = ingest::lower(pool);
  out.flow = flow;
  ingest::Replayer replayer(config, pool);
  detail::DayAccumulator days;
  bool diverged = false;

  for (const auto& e : ds.events) {
    if (!replayer.accepts(e)) continue;
    days.observe(e.timestamp, replayer.state(), out.days);
    if (flow == FlowFilter::All || e.kind != EventKind::Swap) {
      // Under re-simulation recorded Mint/Burn amounts no longer match the state, so their audits are dropped below.
      replayer.apply(e);
      if (e.kind == EventKind::Swap) days.count_swap();
      continue;
    }
    if (ingest::classify(e, *registry) == ingest::Flow::Retail) {
      diverged = true;
      continue;
    }
    if (!diverged) {
      // Nothing removed yet: the recorded swap applies to the recorded state as is.
      replayer.apply(e);
      days.count_swap();
      continue;
    }
    const auto [token, amount] = ingest::swap_input(e);
    if (amount <= 0) {
      detail::skip(out, e, "no input amount");
      continue;
    }
    const PoolState& s = replayer.state();
    if (s.liquidity() == 0) {
      detail::skip(out, e, "zero liquidity");
      continue;
    }
    const bool zfo = token == 0;
    const SqrtPriceX96 limit = no_price_limit(zfo);
    if (zfo ? s.sqrt_price() <= limit : s.sqrt_price() >= limit) {
      detail::skip(out, e, "price at bound");
      continue;
    }
    if (s.simulate_swap(zfo, amount, limit).partial_fill) {
      detail::skip(out, e, "insufficient liquidity");
      continue;
    }
    replayer.apply_swap_as(e, ingest::SwapReading{zfo, amount, limit});
    days.count_swap();
  }
  days.finish(replayer.state(), out.days);
  if (flow == FlowFilter::All) out.audit = replayer.audit();
  return out;
}

struct FeeComparison {
  std::size_t paired_days{0};
  std::size_t ratio_days{0};  // paired days where series a is positive
  double mean_daily_ratio{0};  // headline: mean over days of b/a
  double ratio_of_means{0};    // mean(b) / mean(a) over paired days
  struct Quantiles {
    double p10{0}, p25{0}, p50{0}, p75{0}, p90{0}, mean{0};
  } a, b;
};

/// Pairs two daily series by date and compares their full-range returns (bps).
inline FeeComparison compare_fee_returns(const FeeReturnSeries& sa, const FeeReturnSeries& sb) {
  std::map<std::int64_t, double> b_by_day;
  for (const auto& d : sb.days) b_by_day[d.day] = d.return_bps;
  std::vector<double> va;
  std::vector<double> vb;
  std::vector<double> ratios;
  for (const auto& d : sa.days) {
    auto it = b_by_day.find(d.day);
    if (it == b_by_day.end()) continue;
    va.push_back(d.return_bps);
    vb.push_back(it->second);
    if (d.return_bps > 0) ratios.push_back(it->second / d.return_bps);
  }
  if (va.empty()) throw DomainError("fee return series share no days");

  auto summarize = [](const std::vector<double>& v) {
    FeeComparison::Quantiles q;
    q.p10 = *quantile(v, 0.10);
    q.p25 = *quantile(v, 0.25);
    q.p50 = *quantile(v, 0.50);
    q.p75 = *quantile(v, 0.75);
    q.p90 = *quantile(v, 0.90);
    double sum = 0;
    for (double x : v) sum += x;
    q.mean = sum / static_cast<double>(v.size());
    return q;
  };
  FeeComparison c;
  c.paired_days = va.size();
  c.ratio_days = ratios.size();
  c.a = summarize(va);
  c.b = summarize(vb);
  if (!ratios.empty()) {
    double sum = 0;
    for (double r : ratios) sum += r;
    c.mean_daily_ratio = sum / static_cast<double>(ratios.size());
  } else {
    c.mean_daily_ratio = std::nan("");
  }
  c.ratio_of_means = c.a.mean > 0 ? c.b.mean / c.a.mean : std::nan("");
  return c;
}

}  // namespace clamm::analytics
