#pragma once

#include "clamm/common/median.hpp"
#include "clamm/ingest/event.hpp"
#include "clamm/ingest/pricing.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace clamm::ingest {

/// Input side of a swap: token index and raw amount. Zero-amount swaps report token 0, amount 0.
inline std::pair<int, i256> swap_input(const PoolEvent& e) {
  if (*e.amount0 > 0) return {0, *e.amount0};
  if (*e.amount1 > 0) return {1, *e.amount1};
  return {0, i256(0)};
}

/// USD value of the swap's input leg at the swap's timestamp.
inline double swap_size_usd(const PoolEvent& e, const UsdPricer& pricer) {
  const auto [token, amount] = swap_input(e);
  return pricer.usd_value(token, amount.convert_to<double>(), e.timestamp);
}

/// Gas for a swap: the per-swap column, else the series value in force at its timestamp.
inline std::optional<double> swap_gas_usd(const PoolEvent& e, const std::vector<GasPoint>& series) {
  if (e.gas_fee_usd) return e.gas_fee_usd;
  if (series.empty() || e.timestamp < series.front().timestamp || e.timestamp > series.back().timestamp) {
    return std::nullopt;
  }
  auto it = std::upper_bound(series.begin(), series.end(), e.timestamp,
                             [](std::int64_t t, const GasPoint& g) { return t < g.timestamp; });
  return std::prev(it)->gas_fee_usd;
}

struct AggregateStats {
  std::size_t swap_count{0};
  double volume_usd{0};
  std::optional<double> median_swap_usd;
  std::optional<double> median_gas_usd;
  std::size_t gas_observations{0};
};

/// Swap count, USD volume and lower-median swap size and gas. Every swap timestamp must be priced.
inline AggregateStats aggregate_stats(const ChainDataset& ds, const UsdPricer& pricer) {
  std::vector<double> sizes;
  std::vector<double> gas;
  std::int64_t uncovered_lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t uncovered_hi = std::numeric_limits<std::int64_t>::min();
  std::size_t uncovered = 0;
  for (const auto& e : ds.events) {
    if (e.kind != EventKind::Swap) continue;
    if (!pricer.covers(e.timestamp)) {
      ++uncovered;
      uncovered_lo = std::min(uncovered_lo, e.timestamp);
      uncovered_hi = std::max(uncovered_hi, e.timestamp);
      continue;
    }
    sizes.push_back(swap_size_usd(e, pricer));
    if (auto g = swap_gas_usd(e, ds.gas_series)) gas.push_back(*g);
  }
  if (uncovered) {
    throw DomainError("USD prices do not cover " + std::to_string(uncovered) + " swaps in [" +
                      std::to_string(uncovered_lo) + ", " + std::to_string(uncovered_hi) + "]");
  }
  AggregateStats s;
  s.swap_count = sizes.size();
  s.gas_observations = gas.size();
  std::sort(sizes.begin(), sizes.end());
  for (double v : sizes) s.volume_usd += v;
  s.median_swap_usd = lower_median(sizes);
  s.median_gas_usd = lower_median(gas);
  return s;
}

/// One mint-to-exit lifetime of an (owner, range) position.
struct LifecycleRecord {
  std::string owner;
  Tick tick_lower{0};
  Tick tick_upper{0};
  std::int64_t first_mint{0};
  std::optional<std::int64_t> first_burn;
  Liquidity liquidity{0};
  bool closed{false};

  std::optional<std::int64_t> holding_seconds() const {
    if (!first_burn) return std::nullopt;
    return *first_burn - first_mint;
  }
};

/// Splits the Mint/Burn stream into lifecycle records. A mint into a range whose previous
/// record was fully burned opens a new record; burns of unseen positions are ignored.
inline std::vector<LifecycleRecord> position_lifecycles(const ChainDataset& ds) {
  std::vector<LifecycleRecord> records;
  std::map<std::tuple<std::string, Tick, Tick>, std::size_t> open;
  for (const auto& e : ds.events) {
    if (e.kind != EventKind::Mint && e.kind != EventKind::Burn) continue;
    if (*e.liquidity_delta == 0) continue;
    const auto key = std::make_tuple(e.owner, *e.tick_lower, *e.tick_upper);
    auto it = open.find(key);
    if (e.kind == EventKind::Mint) {
      if (it == open.end()) {
        it = open.emplace(key, records.size()).first;
        records.push_back({e.owner, *e.tick_lower, *e.tick_upper, e.timestamp, std::nullopt, 0, false});
      }
      records[it->second].liquidity += *e.liquidity_delta;
      continue;
    }
    if (it == open.end()) continue;
    LifecycleRecord& r = records[it->second];
    if (!r.first_burn) r.first_burn = e.timestamp;
    r.liquidity = *e.liquidity_delta >= r.liquidity ? Liquidity(0) : Liquidity(r.liquidity - *e.liquidity_delta);
    if (r.liquidity == 0) {
      r.closed = true;
      open.erase(it);
    }
  }
  return records;
}

struct LifecycleOptions {
  Tick tick_spacing{60};
  // Drop single-spacing ranges (JIT liquidity and range orders) from counts and the median.
  bool exclude_single_spacing{false};
};

struct LifecycleStats {
  std::size_t positions_created{0};
  std::size_t unique_lp_wallets{0};
  std::optional<std::int64_t> median_holding_seconds;
  double share_single_tick_spacing{0};  // over all records, independent of the exclusion flag
};

inline LifecycleStats position_lifecycle_stats(const ChainDataset& ds, const LifecycleOptions& opts = {}) {
  if (opts.tick_spacing <= 0) throw DomainError("tick spacing must be positive");
  const auto records = position_lifecycles(ds);
  LifecycleStats s;
  std::set<std::string> wallets;
  std::vector<std::int64_t> holding;
  std::size_t single = 0;
  for (const auto& r : records) {
    const bool is_single = r.tick_upper - r.tick_lower == opts.tick_spacing;
    if (is_single) ++single;
    if (is_single && opts.exclude_single_spacing) continue;
    ++s.positions_created;
    wallets.insert(r.owner);
    if (auto h = r.holding_seconds()) holding.push_back(*h);
  }
  s.unique_lp_wallets = wallets.size();
  s.median_holding_seconds = lower_median(holding);
  s.share_single_tick_spacing = records.empty() ? 0.0 : static_cast<double>(single) / static_cast<double>(records.size());
  return s;
}

}  // namespace clamm::ingest
