#pragma once

#include "clamm/fixmath/types.hpp"

namespace clamm {

/// floor(a * b / d) with a full 512-bit intermediate. Throws if d == 0 or the result exceeds 256 bits.
inline u256 mul_div(const u256& a, const u256& b, const u256& d) {
  if (d == 0) throw MathOverflow("mul_div: division by zero");
  const u512 q = (u512(a) * u512(b)) / u512(d);
  if (q > u512(kMaxU256)) throw MathOverflow("mul_div: result exceeds 256 bits");
  return static_cast<u256>(q);
}

/// ceil(a * b / d) with a full 512-bit intermediate.
inline u256 mul_div_rounding_up(const u256& a, const u256& b, const u256& d) {
  if (d == 0) throw MathOverflow("mul_div_rounding_up: division by zero");
  const u512 p = u512(a) * u512(b);
  u512 q = p / u512(d);
  if (p % u512(d) != 0) ++q;
  if (q > u512(kMaxU256)) throw MathOverflow("mul_div_rounding_up: result exceeds 256 bits");
  return static_cast<u256>(q);
}

inline u256 div_rounding_up(const u256& a, const u256& b) {
  if (b == 0) throw MathOverflow("div_rounding_up: division by zero");
  u256 q = a / b;
  if (a % b != 0) ++q;
  return q;
}

/// Applies a signed delta to liquidity, rejecting underflow and 128-bit overflow.
inline Liquidity add_delta(const Liquidity& x, const i128& delta) {
  if (delta < 0) {
    const u128 mag = static_cast<u128>(-delta);
    if (mag > x) throw StateError("liquidity underflow");
    return x - mag;
  }
  const u128 mag = static_cast<u128>(delta);
  if (mag > kMaxU128 - x) throw StateError("liquidity overflow");
  return x + mag;
}

}  // namespace clamm
