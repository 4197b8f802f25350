#pragma once

#include "clamm/fixmath/full_math.hpp"
#include "clamm/fixmath/sqrt_price_math.hpp"
#include "clamm/fixmath/swap_math.hpp"
#include "clamm/fixmath/tick_math.hpp"
#include "clamm/fixmath/types.hpp"
#include "clamm/pool/position.hpp"
#include "clamm/pool/tick_table.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <type_traits>
#include <utility>

namespace clamm {

struct PoolConfig {
  std::uint32_t fee_pips{3000};
  Tick tick_spacing{60};
};

struct SwapResult {
  i256 amount0{0};
  i256 amount1{0};
  u256 fee_paid{0};
  SqrtPriceX96 end_price;
  Tick end_tick{0};
  Liquidity end_liquidity{0};
  std::uint32_t ticks_crossed{0};
  std::uint32_t steps{0};
  // Amount left unfilled because liquidity ran out before the price limit.
  bool partial_fill{false};
};

/// Price limits one unit inside the valid range, the usual "no limit" values.
inline SqrtPriceX96 no_price_limit(bool zero_for_one) {
  return zero_for_one ? SqrtPriceX96(kMinSqrtRatio.raw() + 1) : SqrtPriceX96(kMaxSqrtRatio.raw() - 1);
}

/// Concentrated-liquidity pool state. Value type: copying yields an independent snapshot.
///
/// The protocol fee switch is always off; TWAP observations are not tracked.
class PoolState {
 public:
  explicit PoolState(PoolConfig config) : config_(config) {
    if (config.fee_pips >= kFeeDenominator) throw DomainError("fee must be below 1e6 pips");
    if (config.tick_spacing <= 0 || config.tick_spacing > 16384) throw DomainError("invalid tick spacing");
    max_liquidity_per_tick_ = max_liquidity_per_tick(config.tick_spacing);
  }

  const PoolConfig& config() const { return config_; }
  std::uint32_t fee_pips() const { return config_.fee_pips; }
  Tick tick_spacing() const { return config_.tick_spacing; }
  bool initialized() const { return initialized_; }
  const SqrtPriceX96& sqrt_price() const { return sqrt_price_; }
  Tick tick() const { return tick_; }
  const Liquidity& liquidity() const { return liquidity_; }
  const FeeGrowthX128& fee_growth_global_0() const { return fee_growth_global_0_; }
  const FeeGrowthX128& fee_growth_global_1() const { return fee_growth_global_1_; }
  const TickTable& ticks() const { return ticks_; }
  const std::map<PositionKey, Position>& positions() const { return positions_; }

  const Position* position(const std::string& owner, Tick lower, Tick upper) const {
    auto it = positions_.find(PositionKey{owner, lower, upper});
    return it == positions_.end() ? nullptr : &it->second;
  }

  Tick initialize(const SqrtPriceX96& price) {
    if (initialized_) throw StateError("pool already initialized");
    const Tick t = sqrt_price_to_tick(price);
    sqrt_price_ = price;
    tick_ = t;
    initialized_ = true;
    return t;
  }

  /// Adds liquidity; returns the token amounts owed to the pool (rounded up).
  TokenAmounts mint(const std::string& owner, Tick lower, Tick upper, const Liquidity& amount) {
    if (amount == 0) throw DomainError("mint amount must be positive");
    const auto [a0, a1] = modify_position(owner, lower, upper, i128(amount));
    return {static_cast<u256>(a0), static_cast<u256>(a1)};
  }

  /// Removes liquidity (amount 0 only collects fees into tokens_owed). Returns the principal released.
  TokenAmounts burn(const std::string& owner, Tick lower, Tick upper, const Liquidity& amount) {
    const Position* p = position(owner, lower, upper);
    if (!p) throw StateError("burn of unknown position " + owner + " [" + std::to_string(lower) + "," +
                             std::to_string(upper) + ")");
    if (amount > p->liquidity) {
      throw StateError("burn of " + amount.str() + " exceeds position liquidity " + p->liquidity.str());
    }
    const auto [a0, a1] = modify_position(owner, lower, upper, -i128(amount));
    const u256 out0 = static_cast<u256>(-a0);
    const u256 out1 = static_cast<u256>(-a1);
    Position& pos = positions_.at(PositionKey{owner, lower, upper});
    pos.tokens_owed_0 += static_cast<u128>(out0);
    pos.tokens_owed_1 += static_cast<u128>(out1);
    return {out0, out1};
  }

  std::pair<FeeGrowthX128, FeeGrowthX128> fee_growth_inside(Tick lower, Tick upper) const {
    return ticks_.fee_growth_inside(lower, upper, tick_, fee_growth_global_0_, fee_growth_global_1_);
  }

  /// Swaps against the pool. `amount_specified` > 0 is exact input, < 0 exact output.
  SwapResult swap(bool zero_for_one, const i256& amount_specified, const SqrtPriceX96& price_limit) {
    return run_swap(*this, zero_for_one, amount_specified, price_limit);
  }

  /// The result `swap` would produce, without touching state.
  SwapResult simulate_swap(bool zero_for_one, const i256& amount_specified, const SqrtPriceX96& price_limit) const {
    return run_swap(*this, zero_for_one, amount_specified, price_limit);
  }

 private:
  // A const Self only reads; crossing then just looks up liquidity_net.
  template <typename Self>
  static SwapResult run_swap(Self& self, bool zero_for_one, const i256& amount_specified,
                             const SqrtPriceX96& price_limit) {
    constexpr bool Commit = !std::is_const_v<Self>;
    if (!self.initialized_) throw StateError("swap on uninitialized pool");
    if (amount_specified == 0) throw DomainError("swap amount must be nonzero");
    const bool limit_ok = zero_for_one ? (price_limit < self.sqrt_price_ && price_limit > kMinSqrtRatio)
                                       : (price_limit > self.sqrt_price_ && price_limit < kMaxSqrtRatio);
    if (!limit_ok) throw DomainError("price limit " + price_limit.str() + " on wrong side of current price");

    const bool exact_in = amount_specified > 0;
    i256 remaining = amount_specified;
    i256 calculated = 0;
    SqrtPriceX96 price = self.sqrt_price_;
    Tick tick = self.tick_;
    Liquidity liquidity = self.liquidity_;
    FeeGrowthX128 growth = zero_for_one ? self.fee_growth_global_0_ : self.fee_growth_global_1_;

    SwapResult result;
    while (remaining != 0 && price != price_limit) {
      const SqrtPriceX96 start = price;
      auto [next_tick, next_initialized] =
          self.ticks_.next_initialized_within_word(tick, self.config_.tick_spacing, zero_for_one);
      if (next_tick < kMinTick) next_tick = kMinTick;
      else if (next_tick > kMaxTick) next_tick = kMaxTick;
      const SqrtPriceX96 next_price = tick_to_sqrt_price(next_tick);

      const bool clamp = zero_for_one ? next_price < price_limit : next_price > price_limit;
      const SwapStep step =
          compute_swap_step(price, clamp ? price_limit : next_price, liquidity, remaining, self.config_.fee_pips);
      price = step.next_price;
      ++result.steps;

      if (exact_in) {
        remaining -= i256(step.amount_in + step.fee_amount);
        calculated -= i256(step.amount_out);
      } else {
        remaining += i256(step.amount_out);
        calculated += i256(step.amount_in + step.fee_amount);
      }
      result.fee_paid += step.fee_amount;
      if (liquidity > 0) growth += FeeGrowthX128(mul_div(step.fee_amount, kQ128, u256(liquidity)));

      if (price == next_price) {
        if (next_initialized) {
          i128 net;
          if constexpr (Commit) {
            net = zero_for_one ? self.ticks_.cross(next_tick, growth, self.fee_growth_global_1_)
                               : self.ticks_.cross(next_tick, self.fee_growth_global_0_, growth);
          } else {
            net = self.ticks_.find(next_tick)->liquidity_net;
          }
          if (zero_for_one) net = -net;
          liquidity = add_delta(liquidity, net);
          ++result.ticks_crossed;
        }
        tick = zero_for_one ? next_tick - 1 : next_tick;
      } else if (price != start) {
        tick = sqrt_price_to_tick(price);
      }
    }

    if constexpr (Commit) {
      self.sqrt_price_ = price;
      self.tick_ = tick;
      self.liquidity_ = liquidity;
      (zero_for_one ? self.fee_growth_global_0_ : self.fee_growth_global_1_) = growth;
    }

    if (zero_for_one == exact_in) {
      result.amount0 = amount_specified - remaining;
      result.amount1 = calculated;
    } else {
      result.amount0 = calculated;
      result.amount1 = amount_specified - remaining;
    }
    result.end_price = price;
    result.end_tick = tick;
    result.end_liquidity = liquidity;
    result.partial_fill = remaining != 0;
    return result;
  }

  void check_ticks(Tick lower, Tick upper) const {
    if (lower >= upper) throw DomainError("tick_lower must be below tick_upper");
    if (lower < kMinTick || upper > kMaxTick) throw DomainError("position ticks out of range");
    if (lower % config_.tick_spacing != 0 || upper % config_.tick_spacing != 0) {
      throw DomainError("position ticks [" + std::to_string(lower) + "," + std::to_string(upper) +
                        ") not aligned to spacing " + std::to_string(config_.tick_spacing));
    }
  }

  std::pair<i256, i256> modify_position(const std::string& owner, Tick lower, Tick upper, const i128& delta) {
    if (!initialized_) throw StateError("position change on uninitialized pool");
    check_ticks(lower, upper);

    // Every check that can fail runs before any mutation, so a rejected change leaves state untouched.
    const PositionKey key{owner, lower, upper};
    auto existing = positions_.find(key);
    const Liquidity current = existing == positions_.end() ? Liquidity(0) : existing->second.liquidity;
    if (delta == 0 && current == 0) throw StateError("poke of a position with no liquidity");
    add_delta(current, delta);
    const bool in_range = lower <= tick_ && tick_ < upper;
    if (delta != 0) {
      for (Tick t : {lower, upper}) {
        const TickInfo* info = ticks_.find(t);
        const Liquidity after = add_delta(info ? info->liquidity_gross : Liquidity(0), delta);
        if (after > max_liquidity_per_tick_) {
          throw StateError("liquidity per tick exceeds maximum at tick " + std::to_string(t));
        }
      }
      if (in_range) add_delta(liquidity_, delta);
    }

    bool flipped_lower = false;
    bool flipped_upper = false;
    if (delta != 0) {
      flipped_lower = ticks_.update(lower, tick_, delta, fee_growth_global_0_, fee_growth_global_1_, false,
                                    max_liquidity_per_tick_);
      flipped_upper = ticks_.update(upper, tick_, delta, fee_growth_global_0_, fee_growth_global_1_, true,
                                    max_liquidity_per_tick_);
    }
    const auto [inside0, inside1] = fee_growth_inside(lower, upper);

    Position& pos = positions_[key];
    if (existing == positions_.end()) {
      pos.owner = owner;
      pos.tick_lower = lower;
      pos.tick_upper = upper;
    }
    pos.update(delta, inside0, inside1);

    i256 amount0 = 0;
    i256 amount1 = 0;
    if (delta != 0) {
      const u256 p_lower = tick_to_sqrt_price(lower).raw();
      const u256 p_upper = tick_to_sqrt_price(upper).raw();
      if (tick_ < lower) {
        amount0 = amount0_delta_signed(p_lower, p_upper, delta);
      } else if (tick_ < upper) {
        amount0 = amount0_delta_signed(sqrt_price_.raw(), p_upper, delta);
        amount1 = amount1_delta_signed(p_lower, sqrt_price_.raw(), delta);
        liquidity_ = add_delta(liquidity_, delta);
      } else {
        amount1 = amount1_delta_signed(p_lower, p_upper, delta);
      }
      if (delta < 0) {
        if (flipped_lower) ticks_.clear(lower);
        if (flipped_upper) ticks_.clear(upper);
      }
    }
    return {amount0, amount1};
  }

  PoolConfig config_;
  Liquidity max_liquidity_per_tick_{0};
  bool initialized_{false};
  SqrtPriceX96 sqrt_price_;
  Tick tick_{0};
  Liquidity liquidity_{0};
  FeeGrowthX128 fee_growth_global_0_;
  FeeGrowthX128 fee_growth_global_1_;
  TickTable ticks_;
  std::map<PositionKey, Position> positions_;
};

}  // namespace clamm
