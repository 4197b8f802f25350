#pragma once

#include "clamm/fixmath/full_math.hpp"
#include "clamm/fixmath/types.hpp"

#include <string>
#include <tuple>

namespace clamm {

/// (owner, tick_lower, tick_upper). NFT token ids are mapped to owners upstream.
struct PositionKey {
  std::string owner;
  Tick tick_lower{0};
  Tick tick_upper{0};

  friend bool operator<(const PositionKey& a, const PositionKey& b) {
    return std::tie(a.owner, a.tick_lower, a.tick_upper) < std::tie(b.owner, b.tick_lower, b.tick_upper);
  }
  friend bool operator==(const PositionKey& a, const PositionKey& b) = default;
};

struct Position {
  std::string owner;
  Tick tick_lower{0};
  Tick tick_upper{0};
  Liquidity liquidity{0};
  FeeGrowthX128 fee_growth_inside_last_0;
  FeeGrowthX128 fee_growth_inside_last_1;
  // Principal returned by burns plus accrued fees, as on chain.
  u128 tokens_owed_0{0};
  u128 tokens_owed_1{0};
  // Fees alone, cumulative over the position's life.
  u256 fees_accrued_0{0};
  u256 fees_accrued_1{0};

  /// Credits fees accrued since the last touch and applies the liquidity delta.
  void update(const i128& delta, const FeeGrowthX128& inside0, const FeeGrowthX128& inside1) {
    Liquidity next = liquidity;
    if (delta == 0) {
      if (liquidity == 0) throw StateError("poke of a position with no liquidity");
    } else {
      next = add_delta(liquidity, delta);
    }

    // The on-chain uint128 cast truncates; kept for parity.
    const u256 mask = u256(kMaxU128);
    const u256 owed0 = mul_div((inside0 - fee_growth_inside_last_0).raw(), u256(liquidity), kQ128) & mask;
    const u256 owed1 = mul_div((inside1 - fee_growth_inside_last_1).raw(), u256(liquidity), kQ128) & mask;

    liquidity = next;
    fee_growth_inside_last_0 = inside0;
    fee_growth_inside_last_1 = inside1;
    tokens_owed_0 += static_cast<u128>(owed0);
    tokens_owed_1 += static_cast<u128>(owed1);
    fees_accrued_0 += owed0;
    fees_accrued_1 += owed1;
  }
};

}  // namespace clamm
