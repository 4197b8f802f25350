#pragma once

#include "clamm/fixmath/full_math.hpp"
#include "clamm/fixmath/sqrt_price_math.hpp"
#include "clamm/fixmath/types.hpp"

#include <cstdint>

namespace clamm {

inline constexpr std::uint32_t kFeeDenominator = 1'000'000;

struct SwapStep {
  SqrtPriceX96 next_price;
  u256 amount_in;
  u256 amount_out;
  u256 fee_amount;
};

/// One swap step towards `target` within a single liquidity range.
///
/// `amount_remaining` > 0 is exact input (fee included), < 0 is exact output.
/// `fee_pips` is the pool fee in hundredths of a bip. The input is rounded up,
/// the output rounded down, and the price never moves past `target`.
inline SwapStep compute_swap_step(const SqrtPriceX96& current, const SqrtPriceX96& target, const Liquidity& liquidity,
                                  const i256& amount_remaining, std::uint32_t fee_pips) {
  if (fee_pips >= kFeeDenominator) throw DomainError("fee must be below 1e6 pips");

  const u256& cur = current.raw();
  const u256& tgt = target.raw();
  const bool zero_for_one = cur >= tgt;
  const bool exact_in = amount_remaining >= 0;
  const u256 remaining_abs = static_cast<u256>(exact_in ? amount_remaining : i256(-amount_remaining));

  u256 next;
  u256 amount_in = 0;
  u256 amount_out = 0;

  if (exact_in) {
    const u256 remaining_less_fee = mul_div(remaining_abs, kFeeDenominator - fee_pips, kFeeDenominator);
    amount_in = zero_for_one ? amount0_delta(tgt, cur, liquidity, true) : amount1_delta(cur, tgt, liquidity, true);
    next = remaining_less_fee >= amount_in ? tgt
                                           : next_sqrt_price_from_input(cur, liquidity, remaining_less_fee, zero_for_one);
  } else {
    amount_out = zero_for_one ? amount1_delta(tgt, cur, liquidity, false) : amount0_delta(cur, tgt, liquidity, false);
    next = remaining_abs >= amount_out ? tgt : next_sqrt_price_from_output(cur, liquidity, remaining_abs, zero_for_one);
  }

  const bool reached = tgt == next;
  if (zero_for_one) {
    if (!(reached && exact_in)) amount_in = amount0_delta(next, cur, liquidity, true);
    if (!(reached && !exact_in)) amount_out = amount1_delta(next, cur, liquidity, false);
  } else {
    if (!(reached && exact_in)) amount_in = amount1_delta(cur, next, liquidity, true);
    if (!(reached && !exact_in)) amount_out = amount0_delta(cur, next, liquidity, false);
  }

  if (!exact_in && amount_out > remaining_abs) amount_out = remaining_abs;

  const u256 fee_amount = (exact_in && next != tgt)
                              ? remaining_abs - amount_in
                              : mul_div_rounding_up(amount_in, fee_pips, kFeeDenominator - fee_pips);

  return {SqrtPriceX96(next), amount_in, amount_out, fee_amount};
}

}  // namespace clamm
