#pragma once

#include "clamm/fixmath/full_math.hpp"
#include "clamm/fixmath/types.hpp"

#include <utility>

namespace clamm {

// Price movement from token amounts. Rounding always favours the pool:
// token0 input moves the price down but never past the exact value (round up),
// token1 input moves it up but never past the exact value (round down).

inline u256 next_sqrt_price_from_amount0_rounding_up(const u256& sqrt_p, const Liquidity& liquidity,
                                                     const u256& amount, bool add) {
  if (amount == 0) return sqrt_p;
  const u256 numerator1 = u256(liquidity) << 96;

  if (add) {
    const u256 product = amount * sqrt_p;  // wraps; overflow detected below
    if (product / amount == sqrt_p) {
      const u256 denominator = numerator1 + product;
      if (denominator >= numerator1) return mul_div_rounding_up(numerator1, sqrt_p, denominator);
    }
    return div_rounding_up(numerator1, numerator1 / sqrt_p + amount);
  }
  const u256 product = amount * sqrt_p;
  if (product / amount != sqrt_p || numerator1 <= product) {
    throw MathOverflow("insufficient token0 reserves for requested output");
  }
  return mul_div_rounding_up(numerator1, sqrt_p, numerator1 - product);
}

inline u256 next_sqrt_price_from_amount1_rounding_down(const u256& sqrt_p, const Liquidity& liquidity,
                                                       const u256& amount, bool add) {
  const u256 l = u256(liquidity);
  if (add) {
    const u256 quotient = amount <= kMaxU160 ? (amount << 96) / l : mul_div(amount, kQ96, l);
    const u256 next = sqrt_p + quotient;
    if (next > kMaxU160) throw MathOverflow("sqrt price exceeds 160 bits");
    return next;
  }
  const u256 quotient = amount <= kMaxU160 ? div_rounding_up(amount << 96, l) : mul_div_rounding_up(amount, kQ96, l);
  if (sqrt_p <= quotient) throw MathOverflow("insufficient token1 reserves for requested output");
  return sqrt_p - quotient;
}

inline u256 next_sqrt_price_from_input(const u256& sqrt_p, const Liquidity& liquidity, const u256& amount_in,
                                       bool zero_for_one) {
  if (sqrt_p == 0 || liquidity == 0) throw DomainError("next_sqrt_price_from_input: zero price or liquidity");
  return zero_for_one ? next_sqrt_price_from_amount0_rounding_up(sqrt_p, liquidity, amount_in, true)
                      : next_sqrt_price_from_amount1_rounding_down(sqrt_p, liquidity, amount_in, true);
}

inline u256 next_sqrt_price_from_output(const u256& sqrt_p, const Liquidity& liquidity, const u256& amount_out,
                                        bool zero_for_one) {
  if (sqrt_p == 0 || liquidity == 0) throw DomainError("next_sqrt_price_from_output: zero price or liquidity");
  return zero_for_one ? next_sqrt_price_from_amount1_rounding_down(sqrt_p, liquidity, amount_out, false)
                      : next_sqrt_price_from_amount0_rounding_up(sqrt_p, liquidity, amount_out, false);
}

/// Token0 between two prices: L * (b - a) / (a * b) * 2^96.
inline u256 amount0_delta(u256 a, u256 b, const Liquidity& liquidity, bool round_up) {
  if (a > b) std::swap(a, b);
  if (a == 0) throw DomainError("amount0_delta: zero price");
  const u256 numerator1 = u256(liquidity) << 96;
  const u256 numerator2 = b - a;
  return round_up ? div_rounding_up(mul_div_rounding_up(numerator1, numerator2, b), a)
                  : mul_div(numerator1, numerator2, b) / a;
}

/// Token1 between two prices: L * (b - a) / 2^96.
inline u256 amount1_delta(u256 a, u256 b, const Liquidity& liquidity, bool round_up) {
  if (a > b) std::swap(a, b);
  return round_up ? mul_div_rounding_up(u256(liquidity), b - a, kQ96) : mul_div(u256(liquidity), b - a, kQ96);
}

/// Signed variants: positive liquidity is owed to the pool (round up), negative is paid out (round down).
inline i256 amount0_delta_signed(const u256& a, const u256& b, const i128& liquidity) {
  return liquidity < 0 ? -i256(amount0_delta(a, b, static_cast<u128>(-liquidity), false))
                       : i256(amount0_delta(a, b, static_cast<u128>(liquidity), true));
}

inline i256 amount1_delta_signed(const u256& a, const u256& b, const i128& liquidity) {
  return liquidity < 0 ? -i256(amount1_delta(a, b, static_cast<u128>(-liquidity), false))
                       : i256(amount1_delta(a, b, static_cast<u128>(liquidity), true));
}

struct TokenAmounts {
  u256 amount0;
  u256 amount1;
};

/// Token amounts represented by `liquidity` between two prices (argument order irrelevant).
inline TokenAmounts amount_deltas(const SqrtPriceX96& a, const SqrtPriceX96& b, const Liquidity& liquidity,
                                  bool round_up) {
  return {amount0_delta(a.raw(), b.raw(), liquidity, round_up), amount1_delta(a.raw(), b.raw(), liquidity, round_up)};
}

}  // namespace clamm
