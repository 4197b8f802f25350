#pragma once

// Sampling pipelines and the CSV/JSON tables the command-line tool emits.
// Kept in the library so any front end produces byte-identical tables.

#include "clamm/analytics/breakeven.hpp"
#include "clamm/analytics/concentration.hpp"
#include "clamm/analytics/fee_returns.hpp"
#include "clamm/analytics/quote.hpp"
#include "clamm/analytics/trade_size.hpp"
#include "clamm/ingest/event_csv.hpp"
#include "clamm/ingest/replay.hpp"
#include "clamm/ingest/stats.hpp"
#include "clamm/pool/snapshot.hpp"
#include "clamm/sim/blocktime.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace clamm::report {

using ingest::detail::format_double;

inline std::string format_opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// ---------------------------------------------------------------- sampling

struct StateSample {
  std::int64_t timestamp{0};
  PoolState state;
};

/// Pool states on the snapshot grid. With `every` == 0, a single sample: the final state
/// stamped with the last applied event's timestamp.
inline std::vector<StateSample> sample_states(const ingest::ChainDataset& ds, const std::string& pool,
                                              PoolConfig config, std::int64_t every,
                                              std::optional<ingest::EventCoord> until = std::nullopt) {
  if (every < 0) throw DomainError("sampling interval must be non-negative");
  std::vector<StateSample> out;
  ingest::ReplayOptions opts;
  opts.snapshot_every = every;
  opts.until = until;
  auto r = ingest::replay(ds, pool, config, opts, [&](std::int64_t t, const PoolState& s) {
    out.push_back({t, s});
  });
  if (every == 0 && r.state.initialized()) {
    std::int64_t last = 0;
    for (const auto& e : ds.events) {
      if (until && e.coord() > *until) break;
      if (ingest::lower(e.pool) == ingest::lower(pool)) last = e.timestamp;
    }
    out.push_back({last, std::move(r.state)});
  }
  return out;
}

// ---------------------------------------------------------------- replay

inline std::string snapshots_header() {
  return "timestamp,sqrt_price_x96,tick,liquidity,fee_growth_global_0,fee_growth_global_1,state_hash\n";
}

inline std::string snapshot_row(std::int64_t t, const PoolState& s) {
  std::ostringstream o;
  o << t << ',' << s.sqrt_price().str() << ',' << s.tick() << ',' << to_dec(s.liquidity()) << ','
    << s.fee_growth_global_0().str() << ',' << s.fee_growth_global_1().str() << ',' << state_hash(s) << '\n';
  return o.str();
}

inline std::string audit_csv(const std::vector<ingest::AuditRecord>& audit) {
  std::ostringstream o;
  o << "block_number,log_index,tx_hash,kind,field,recorded,replayed\n";
  for (const auto& a : audit) {
    o << a.coord.block_number << ',' << a.coord.log_index << ',' << a.tx_hash << ',' << ingest::to_string(a.kind)
      << ',' << a.field << ',' << a.recorded << ',' << a.replayed << '\n';
  }
  return o.str();
}

// ---------------------------------------------------------------- concentration

inline std::vector<analytics::ConcentrationProfile> concentration_series(const std::vector<StateSample>& samples,
                                                                         int window_bps, int bucket_bps) {
  std::vector<analytics::ConcentrationProfile> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(analytics::concentration_profile(s.state, window_bps, bucket_bps, s.timestamp));
  return out;
}

inline std::string concentration_csv(const std::vector<analytics::ConcentrationProfile>& series) {
  std::ostringstream o;
  o << "timestamp,window_bps,bucket_bps,total_mass,mid_share,mid_share_exact,empty\n";
  for (const auto& p : series) {
    o << p.timestamp << ',' << p.window_half_width_bps << ',' << p.bucket_width_bps << ',' << p.total_mass.str()
      << ',' << format_double(p.mid_share) << ',' << p.mid_share_exact.str() << ',' << (p.empty ? 1 : 0) << '\n';
  }
  return o.str();
}

inline std::string profile_csv(const analytics::ConcentrationProfile& p) {
  std::ostringstream o;
  o << "offset_bps,mass,share\n";
  for (const auto& b : p.shares) o << b.offset_bps << ',' << b.mass.str() << ',' << format_double(b.share) << '\n';
  return o.str();
}

inline nlohmann::json concentration_summary(const std::vector<analytics::ConcentrationProfile>& series) {
  nlohmann::json j{{"samples", series.size()}};
  std::size_t empty = 0;
  for (const auto& p : series) empty += p.empty ? 1U : 0U;
  j["empty_samples"] = empty;
  if (empty < series.size()) {
    const auto s = analytics::median_concentration(series);
    j["median_mid_share"] = s.median_mid_share;
    j["median_mid_share_exact"] = s.median_mid_share_exact.str();
  } else {
    j["median_mid_share"] = nullptr;
    j["median_mid_share_exact"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------- breakeven

/// Gas per swap in USD: a constant, or the series value in force at the sample time.
struct GasSource {
  std::optional<double> constant;
  std::vector<ingest::GasPoint> series;

  std::optional<double> at(std::int64_t t) const {
    if (constant) return constant;
    ingest::PoolEvent probe;
    probe.timestamp = t;
    return ingest::swap_gas_usd(probe, series);
  }
};

struct BreakevenSeries {
  std::vector<analytics::BreakevenPoint> points;
  std::size_t skipped_no_gas{0};
  std::size_t skipped_no_price{0};
};

/// Breakeven at every sample time present on both venues.
inline BreakevenSeries breakeven_series(const std::vector<StateSample>& a, const std::string& chain_a,
                                        const GasSource& gas_a, const std::vector<StateSample>& b,
                                        const std::string& chain_b, const GasSource& gas_b, bool zero_for_one,
                                        const ingest::UsdPricer& pricer, const analytics::BreakevenOptions& opts = {}) {
  BreakevenSeries out;
  std::size_t j = 0;
  for (const auto& sa : a) {
    while (j < b.size() && b[j].timestamp < sa.timestamp) ++j;
    if (j == b.size()) break;
    if (b[j].timestamp != sa.timestamp) continue;
    const auto ga = gas_a.at(sa.timestamp);
    const auto gb = gas_b.at(sa.timestamp);
    if (!ga || !gb) {
      ++out.skipped_no_gas;
      continue;
    }
    if (!pricer.covers(sa.timestamp)) {
      ++out.skipped_no_price;
      continue;
    }
    auto p = analytics::breakeven_size(sa.state, *ga, b[j].state, *gb, zero_for_one, pricer, sa.timestamp, opts);
    p.chain_a = chain_a;
    p.chain_b = chain_b;
    out.points.push_back(std::move(p));
  }
  return out;
}

/// Pairs the two single final-state samples regardless of their timestamps.
inline std::vector<StateSample> restamp(std::vector<StateSample> s, std::int64_t t) {
  for (auto& x : s) x.timestamp = t;
  return s;
}

inline std::string breakeven_csv(const std::vector<analytics::BreakevenPoint>& points) {
  std::ostringstream o;
  o << "timestamp,chain_a,chain_b,input_token,output_token,status,breakeven_input_usd,gas_a_usd,gas_b_usd,regime,"
       "evaluations\n";
  for (const auto& p : points) {
    o << p.timestamp << ',' << p.chain_a << ',' << p.chain_b << ',' << p.input_token << ',' << p.output_token << ','
      << analytics::to_string(p.status) << ',' << format_opt(p.breakeven_input_usd) << ','
      << format_double(p.gas_a_usd) << ',' << format_double(p.gas_b_usd) << ',' << analytics::to_string(p.regime)
      << ',' << p.evaluations << '\n';
  }
  return o.str();
}

inline nlohmann::json breakeven_summary(const BreakevenSeries& s) {
  std::vector<double> roots;
  std::size_t degenerate = 0;
  for (const auto& p : s.points) {
    if (p.breakeven_input_usd) roots.push_back(*p.breakeven_input_usd);
    if (p.status == analytics::BreakevenStatus::Degenerate) ++degenerate;
  }
  nlohmann::json j{{"samples", s.points.size()},
                   {"rooted", roots.size()},
                   {"degenerate", degenerate},
                   {"skipped_no_gas", s.skipped_no_gas},
                   {"skipped_no_price", s.skipped_no_price}};
  const auto m = lower_median(roots);
  j["median_breakeven_usd"] = m ? nlohmann::json(*m) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------- fee returns

inline std::string fee_returns_csv(const analytics::FeeReturnSeries& s) {
  std::ostringstream o;
  o << "date,day,swaps,growth0_x128,growth1_x128,return_token0_per_L,return_token1_per_L,return_bps,"
       "close_sqrt_price_x96\n";
  for (const auto& d : s.days) {
    o << d.date() << ',' << d.day << ',' << d.swaps << ',' << d.growth0_x128.str() << ',' << d.growth1_x128.str()
      << ',' << format_double(d.return_token0_per_L) << ',' << format_double(d.return_token1_per_L) << ','
      << format_double(d.return_bps) << ',' << d.close_price.str() << '\n';
  }
  return o.str();
}

inline nlohmann::json fee_returns_summary(const analytics::FeeReturnSeries& s) {
  std::vector<double> bps;
  double sum = 0;
  for (const auto& d : s.days) {
    bps.push_back(d.return_bps);
    sum += d.return_bps;
  }
  nlohmann::json j{{"pool", s.pool}, {"flow", analytics::to_string(s.flow)}, {"days", s.days.size()},
                   {"audit_records", s.audit.size()}};
  if (bps.empty()) {
    j["mean_return_bps"] = nullptr;
    j["median_return_bps"] = nullptr;
  } else {
    j["mean_return_bps"] = sum / static_cast<double>(bps.size());
    j["median_return_bps"] = *quantile(bps, 0.5);
  }
  return j;
}

// ---------------------------------------------------------------- stats

struct StatsReport {
  ingest::AggregateStats aggregate;
  ingest::LifecycleStats lifecycle;
  std::optional<ingest::FlowSegmentation> flow;
  std::vector<std::pair<double, double>> retail_share_above;  // (threshold, share)
};

inline StatsReport stats_report(const ingest::ChainDataset& ds, const ingest::UsdPricer& pricer,
                                const ingest::LifecycleOptions& lifecycle,
                                const ingest::RouterRegistry* registry, const std::vector<double>& thresholds) {
  StatsReport r;
  r.aggregate = ingest::aggregate_stats(ds, pricer);
  r.lifecycle = ingest::position_lifecycle_stats(ds, lifecycle);
  if (registry) {
    r.flow = ingest::segment_flow(ds, *registry);
    if (!thresholds.empty()) {
      const auto sizes = analytics::swap_sizes_usd(ds, *registry, pricer, ingest::Flow::Retail);
      for (double t : thresholds) r.retail_share_above.emplace_back(t, analytics::share_above_threshold(sizes, t));
    }
  } else if (!thresholds.empty()) {
    throw DomainError("trade-size thresholds need a router registry");
  }
  return r;
}

inline std::vector<std::pair<std::string, std::string>> stats_rows(const StatsReport& r) {
  std::vector<std::pair<std::string, std::string>> rows;
  const auto& a = r.aggregate;
  rows.emplace_back("swap_count", std::to_string(a.swap_count));
  rows.emplace_back("volume_usd", format_double(a.volume_usd));
  rows.emplace_back("median_swap_usd", format_opt(a.median_swap_usd));
  rows.emplace_back("median_gas_usd", format_opt(a.median_gas_usd));
  rows.emplace_back("gas_observations", std::to_string(a.gas_observations));
  const auto& l = r.lifecycle;
  rows.emplace_back("positions_created", std::to_string(l.positions_created));
  rows.emplace_back("unique_lp_wallets", std::to_string(l.unique_lp_wallets));
  rows.emplace_back("median_holding_seconds",
                    l.median_holding_seconds ? std::to_string(*l.median_holding_seconds) : std::string());
  rows.emplace_back("share_single_tick_spacing", format_double(l.share_single_tick_spacing));
  if (r.flow) {
    rows.emplace_back("retail_swaps", std::to_string(r.flow->retail));
    rows.emplace_back("arbitrage_swaps", std::to_string(r.flow->arbitrage));
  }
  for (const auto& [t, share] : r.retail_share_above) {
    rows.emplace_back("retail_share_above_" + format_double(t), format_double(share));
  }
  return rows;
}

inline std::string stats_csv(const StatsReport& r) {
  std::ostringstream o;
  o << "metric,value\n";
  for (const auto& [k, v] : stats_rows(r)) o << k << ',' << v << '\n';
  return o.str();
}

// ---------------------------------------------------------------- quote

inline std::string quote_csv(const analytics::Quote& q) {
  std::ostringstream o;
  o << "amount_in,amount_out,fee_paid,end_sqrt_price_x96,partial_fill\n"
    << q.amount_in.str() << ',' << q.amount_out.str() << ',' << q.fee_paid.str() << ',' << q.end_price.str() << ','
    << (q.partial_fill ? 1 : 0) << '\n';
  return o.str();
}

// ---------------------------------------------------------------- simulation

struct SimulationTable {
  std::vector<sim::TauRow> rows;
  std::optional<sim::ScalingFit> fit;
  std::string fit_error;  // why no fit was produced
};

inline SimulationTable simulation_table(const sim::SimConfig& base, const std::vector<double>& taus) {
  SimulationTable t;
  t.rows = sim::simulate_grid(base, taus);
  try {
    t.fit = sim::scaling_exponent(t.rows);
  } catch (const DomainError& e) {
    t.fit_error = e.what();
  }
  return t;
}

inline std::string simulation_csv(const SimulationTable& t) {
  std::ostringstream o;
  o << "tau,paths,fees_per_day_usd,fees_std_error,arb_profit_per_day_usd,arb_profit_std_error,trades_per_day,slope\n";
  const std::string slope = t.fit ? format_double(t.fit->slope) : std::string();
  for (const auto& r : t.rows) {
    const auto& s = r.result;
    o << format_double(r.tau) << ',' << s.paths << ',' << format_double(s.fees_per_day_usd.mean) << ','
      << format_double(s.fees_per_day_usd.std_error) << ',' << format_double(s.arb_profit_per_day_usd.mean) << ','
      << format_double(s.arb_profit_per_day_usd.std_error) << ',' << format_double(s.trades_per_day) << ','
      << slope << '\n';
  }
  return o.str();
}

inline nlohmann::json simulation_summary(const SimulationTable& t) {
  nlohmann::json j{{"taus", t.rows.size()}};
  if (t.fit) {
    j["slope"] = t.fit->slope;
    j["intercept"] = t.fit->intercept;
    j["points_used"] = t.fit->points_used;
    j["warnings"] = t.fit->warnings;
  } else {
    j["slope"] = nullptr;
    j["error"] = t.fit_error;
  }
  return j;
}

}  // namespace clamm::report
