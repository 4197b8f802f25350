#pragma once

#include "clamm/fixmath/full_math.hpp"
#include "clamm/fixmath/tick_math.hpp"
#include "clamm/fixmath/types.hpp"

#include <map>
#include <utility>

namespace clamm {

struct TickInfo {
  Liquidity liquidity_gross{0};
  i128 liquidity_net{0};
  FeeGrowthX128 fee_growth_outside_0;
  FeeGrowthX128 fee_growth_outside_1;
  bool initialized{false};
};

/// floor(tick / spacing), matching the on-chain compression of negative ticks.
inline Tick compress_tick(Tick tick, Tick spacing) {
  Tick c = tick / spacing;
  if (tick < 0 && tick % spacing != 0) --c;
  return c;
}

/// Largest liquidity any single tick may reference.
inline Liquidity max_liquidity_per_tick(Tick spacing) {
  const Tick min_tick = (kMinTick / spacing) * spacing;
  const Tick max_tick = (kMaxTick / spacing) * spacing;
  const auto num_ticks = static_cast<unsigned>((max_tick - min_tick) / spacing) + 1U;
  return kMaxU128 / num_ticks;
}

/// Initialized ticks in an ordered map. Successor/predecessor search stands in
/// for the on-chain bitmap, but searches are still bounded to one 256-tick word
/// so that swap steps split exactly where they do on chain.
class TickTable {
 public:
  using Map = std::map<Tick, TickInfo>;

  const Map& entries() const { return ticks_; }
  const TickInfo* find(Tick t) const {
    auto it = ticks_.find(t);
    return it == ticks_.end() ? nullptr : &it->second;
  }

  /// Next initialized tick in direction of travel, or the word boundary if none is in the word.
  std::pair<Tick, bool> next_initialized_within_word(Tick tick, Tick spacing, bool lte) const {
    Tick compressed = compress_tick(tick, spacing);
    if (lte) {
      const Tick bit_pos = ((compressed % 256) + 256) % 256;
      const Tick word_floor = (compressed - bit_pos) * spacing;
      auto it = ticks_.upper_bound(tick);
      if (it != ticks_.begin()) {
        --it;
        if (it->first >= word_floor) return {it->first, true};
      }
      return {word_floor, false};
    }
    ++compressed;
    const Tick bit_pos = ((compressed % 256) + 256) % 256;
    const Tick word_ceil = (compressed + (255 - bit_pos)) * spacing;
    auto it = ticks_.upper_bound(tick);
    if (it != ticks_.end() && it->first <= word_ceil) return {it->first, true};
    return {word_ceil, false};
  }

  /// Applies a liquidity delta at `tick`. Returns true when the tick flips between initialized and not.
  bool update(Tick tick, Tick current, const i128& delta, const FeeGrowthX128& global0,
              const FeeGrowthX128& global1, bool upper, const Liquidity& max_liquidity) {
    TickInfo& info = ticks_[tick];
    const Liquidity before = info.liquidity_gross;
    const Liquidity after = add_delta(before, delta);
    if (after > max_liquidity) throw StateError("liquidity per tick exceeds maximum at tick " + std::to_string(tick));

    const bool flipped = (after == 0) != (before == 0);
    if (before == 0) {
      // Growth below the current tick is attributed to "outside" by convention.
      if (tick <= current) {
        info.fee_growth_outside_0 = global0;
        info.fee_growth_outside_1 = global1;
      }
      info.initialized = true;
    }
    info.liquidity_gross = after;
    info.liquidity_net = upper ? info.liquidity_net - delta : info.liquidity_net + delta;
    return flipped;
  }

  void clear(Tick tick) { ticks_.erase(tick); }

  /// Flips outside growth when the price crosses `tick`; returns liquidity_net.
  i128 cross(Tick tick, const FeeGrowthX128& global0, const FeeGrowthX128& global1) {
    TickInfo& info = ticks_.at(tick);
    info.fee_growth_outside_0 = global0 - info.fee_growth_outside_0;
    info.fee_growth_outside_1 = global1 - info.fee_growth_outside_1;
    return info.liquidity_net;
  }

  std::pair<FeeGrowthX128, FeeGrowthX128> fee_growth_inside(Tick lower, Tick upper, Tick current,
                                                            const FeeGrowthX128& global0,
                                                            const FeeGrowthX128& global1) const {
    static const TickInfo empty{};
    const TickInfo* lo = find(lower);
    const TickInfo* hi = find(upper);
    if (!lo) lo = &empty;
    if (!hi) hi = &empty;

    const FeeGrowthX128 below0 = current >= lower ? lo->fee_growth_outside_0 : global0 - lo->fee_growth_outside_0;
    const FeeGrowthX128 below1 = current >= lower ? lo->fee_growth_outside_1 : global1 - lo->fee_growth_outside_1;
    const FeeGrowthX128 above0 = current < upper ? hi->fee_growth_outside_0 : global0 - hi->fee_growth_outside_0;
    const FeeGrowthX128 above1 = current < upper ? hi->fee_growth_outside_1 : global1 - hi->fee_growth_outside_1;
    return {global0 - below0 - above0, global1 - below1 - above1};
  }

 private:
  Map ticks_;
};

}  // namespace clamm
