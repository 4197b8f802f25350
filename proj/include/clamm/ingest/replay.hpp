#pragma once

#include "clamm/ingest/event.hpp"
#include "clamm/pool/pool_state.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace clamm::ingest {

/// An event the engine could not apply.
class ReplayError : public std::runtime_error {
 public:
  ReplayError(EventCoord coord, const std::string& msg)
      : std::runtime_error("event " + coord.str() + ": " + msg), coord_(coord) {}
  const EventCoord& coord() const { return coord_; }

 private:
  EventCoord coord_;
};

/// A recorded field that disagrees with the replayed engine.
struct AuditRecord {
  EventCoord coord;
  std::string tx_hash;
  EventKind kind{EventKind::Swap};
  std::string field;
  std::string recorded;
  std::string replayed;
};

struct ReplayOptions {
  std::optional<EventCoord> until;  // inclusive
  std::int64_t snapshot_every{0};   // seconds; 0 disables snapshots
  bool strict{false};               // throw on the first audit mismatch
};

/// Called for each grid time with the last state at or before it.
using SnapshotFn = std::function<void(std::int64_t grid_time, const PoolState&)>;

/// How a recorded swap was reproduced.
struct SwapReading {
  bool zero_for_one{false};
  i256 amount_specified{0};
  SqrtPriceX96 price_limit;
};

namespace detail {

inline bool swap_matches(const SwapResult& r, const PoolEvent& e) {
  return r.amount0 == *e.amount0 && r.amount1 == *e.amount1 && r.end_price == *e.sqrt_price_x96 &&
         r.end_tick == *e.tick_after && r.end_liquidity == *e.liquidity_after;
}

// The parameters a recorded swap could have been submitted with, most likely first.
inline std::vector<SwapReading> swap_candidates(const PoolState& s, const PoolEvent& e) {
  const i256& a0 = *e.amount0;
  const i256& a1 = *e.amount1;
  const SqrtPriceX96& recorded = *e.sqrt_price_x96;
  bool zfo;
  if (a0 > 0) zfo = true;
  else if (a1 > 0) zfo = false;
  else zfo = recorded < s.sqrt_price();

  const i256 in = zfo ? a0 : a1;
  const i256 out = zfo ? -a1 : -a0;
  const SqrtPriceX96 none = no_price_limit(zfo);
  const bool limit_usable = zfo ? (recorded < s.sqrt_price() && recorded > kMinSqrtRatio)
                                : (recorded > s.sqrt_price() && recorded < kMaxSqrtRatio);

  std::vector<SwapReading> c;
  if (in > 0) c.push_back({zfo, in, none});
  if (out > 0) c.push_back({zfo, -out, none});
  if (limit_usable) {
    if (in > 0) c.push_back({zfo, in, recorded});
    if (out > 0) c.push_back({zfo, -out, recorded});
  }
  return c;
}

}  // namespace detail

/// Applies one pool's events in order to a PoolState, auditing every recorded field.
class Replayer {
 public:
  Replayer(PoolConfig config, std::string pool, bool strict = false)
      : state_(config), pool_(lower(pool)), strict_(strict) {}

  const PoolState& state() const { return state_; }
  const std::vector<AuditRecord>& audit() const { return audit_; }
  const std::string& pool() const { return pool_; }
  std::size_t applied() const { return applied_; }

  bool accepts(const PoolEvent& e) const { return e.pool == pool_; }

  void apply(const PoolEvent& e) {
    if (!accepts(e)) return;
    const EventCoord c = e.coord();
    if (!state_.initialized() && e.kind != EventKind::Initialize) {
      throw ReplayError(c, std::string(to_string(e.kind)) + " before pool Initialize");
    }
    try {
      switch (e.kind) {
        case EventKind::Initialize: {
          const Tick t = state_.initialize(*e.sqrt_price_x96);
          if (e.tick_after) check(e, "tick_after", std::to_string(*e.tick_after), std::to_string(t));
          break;
        }
        case EventKind::Mint: {
          const auto amounts = state_.mint(e.owner, *e.tick_lower, *e.tick_upper, *e.liquidity_delta);
          check_amounts(e, amounts);
          break;
        }
        case EventKind::Burn: {
          const auto amounts = state_.burn(e.owner, *e.tick_lower, *e.tick_upper, *e.liquidity_delta);
          check_amounts(e, amounts);
          break;
        }
        case EventKind::Swap:
          apply_swap(e);
          break;
      }
    } catch (const ReplayError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ReplayError(c, ex.what());
    }
    ++applied_;
  }

  /// Applies an exact swap, bypassing the recorded-field reconstruction.
  SwapResult apply_swap_as(const PoolEvent& e, const SwapReading& r) {
    try {
      return state_.swap(r.zero_for_one, r.amount_specified, r.price_limit);
    } catch (const std::exception& ex) {
      throw ReplayError(e.coord(), ex.what());
    }
  }

  /// Direct access for callers that drive the engine themselves (e.g. re-simulation).
  PoolState& mutable_state() { return state_; }

 private:
  void check(const PoolEvent& e, const char* field, const std::string& recorded, const std::string& replayed) {
    if (recorded == replayed) return;
    audit_.push_back({e.coord(), e.tx_hash, e.kind, field, recorded, replayed});
    if (strict_) {
      throw ReplayError(e.coord(), std::string(field) + " recorded " + recorded + " but replayed " + replayed);
    }
  }

  void check_amounts(const PoolEvent& e, const TokenAmounts& a) {
    check(e, "amount0", e.amount0->str(), a.amount0.str());
    check(e, "amount1", e.amount1->str(), a.amount1.str());
  }

  void apply_swap(const PoolEvent& e) {
    const auto candidates = detail::swap_candidates(state_, e);
    if (candidates.empty()) {
      // Nothing moved; the recorded state must equal the current one.
      check_swap_fields(e, state_.sqrt_price(), state_.tick(), state_.liquidity(), 0, 0);
      return;
    }
    for (const auto& c : candidates) {
      const SwapResult r = state_.simulate_swap(c.zero_for_one, c.amount_specified, c.price_limit);
      if (detail::swap_matches(r, e)) {
        state_.swap(c.zero_for_one, c.amount_specified, c.price_limit);
        return;
      }
    }
    const SwapReading& c = candidates.front();
    const SwapResult r = state_.swap(c.zero_for_one, c.amount_specified, c.price_limit);
    check_swap_fields(e, r.end_price, r.end_tick, r.end_liquidity, r.amount0, r.amount1);
  }

  void check_swap_fields(const PoolEvent& e, const SqrtPriceX96& p, Tick t, const Liquidity& l, const i256& a0,
                         const i256& a1) {
    check(e, "amount0", e.amount0->str(), a0.str());
    check(e, "amount1", e.amount1->str(), a1.str());
    check(e, "sqrt_price_x96", e.sqrt_price_x96->str(), p.str());
    check(e, "tick_after", std::to_string(*e.tick_after), std::to_string(t));
    check(e, "liquidity_after", e.liquidity_after->str(), l.str());
  }

  PoolState state_;
  std::string pool_;
  bool strict_;
  std::vector<AuditRecord> audit_;
  std::size_t applied_{0};
};

struct ReplayResult {
  PoolState state;
  std::vector<AuditRecord> audit;
  std::size_t events_applied{0};
  std::optional<EventCoord> last_event;
};

/// Emits grid times on a fixed chain-time grid aligned to multiples of `every`.
class SnapshotGrid {
 public:
  explicit SnapshotGrid(std::int64_t every) : every_(every) {}

  // Before applying an event at `ts`: every pending grid time strictly earlier sees the current state.
  void before(std::int64_t ts, const PoolState& s, const SnapshotFn& fn) {
    if (every_ <= 0 || !s.initialized()) return;
    while (next_ < ts) emit(s, fn);
  }
  // After applying an event at `ts`.
  void after(std::int64_t ts) {
    if (every_ <= 0 || started_) return;
    started_ = true;
    next_ = ceil_to_grid(ts);
  }
  // Flush grid times up to and including the last event time.
  void finish(std::int64_t last_ts, const PoolState& s, const SnapshotFn& fn) {
    if (every_ <= 0 || !started_) return;
    while (next_ <= last_ts) emit(s, fn);
  }

 private:
  std::int64_t ceil_to_grid(std::int64_t t) const {
    std::int64_t q = t / every_;
    if (q * every_ < t) ++q;
    return q * every_;
  }
  void emit(const PoolState& s, const SnapshotFn& fn) {
    if (fn) fn(next_, s);
    next_ += every_;
  }

  std::int64_t every_;
  std::int64_t next_{0};
  bool started_{false};
};

/// Replays every event of `pool` through the engine, stopping after `until` when given.
inline ReplayResult replay(const ChainDataset& ds, const std::string& pool, PoolConfig config,
                           const ReplayOptions& opts = {}, const SnapshotFn& on_snapshot = {}) {
  Replayer r(config, pool, opts.strict);
  SnapshotGrid grid(opts.snapshot_every);
  ReplayResult out{PoolState(config), {}, 0, std::nullopt};
  std::int64_t last_ts = 0;
  for (const auto& e : ds.events) {
    if (opts.until && e.coord() > *opts.until) break;
    if (!r.accepts(e)) continue;
    grid.before(e.timestamp, r.state(), on_snapshot);
    r.apply(e);
    grid.after(e.timestamp);
    last_ts = e.timestamp;
    out.last_event = e.coord();
  }
  if (r.applied() == 0 && !ds.events.empty()) {
    throw ReplayError(EventCoord{}, "no events for pool " + lower(pool));
  }
  grid.finish(last_ts, r.state(), on_snapshot);
  out.state = r.state();
  out.audit = r.audit();
  out.events_applied = r.applied();
  return out;
}

}  // namespace clamm::ingest
