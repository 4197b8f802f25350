#pragma once

#include "clamm/fixmath/types.hpp"

#include <array>
#include <cstdlib>
#include <string>

namespace clamm {

inline const SqrtPriceX96 kMinSqrtRatio{u256(4295128739ULL)};
inline const SqrtPriceX96 kMaxSqrtRatio{u256("1461446703485210103287273052203988822378723970342")};

namespace detail {

// round(2^128 / sqrt(1.0001)^(2^i)) for i = 0..19.
inline const std::array<u256, 20>& tick_ratio_table() {
  static const std::array<u256, 20> table = {
      u256("0xfffcb933bd6fad37aa2d162d1a594001"), u256("0xfff97272373d413259a46990580e213a"),
      u256("0xfff2e50f5f656932ef12357cf3c7fdcc"), u256("0xffe5caca7e10e4e61c3624eaa0941cd0"),
      u256("0xffcb9843d60f6159c9db58835c926644"), u256("0xff973b41fa98c081472e6896dfb254c0"),
      u256("0xff2ea16466c96a3843ec78b326b52861"), u256("0xfe5dee046a99a2a811c461f1969c3053"),
      u256("0xfcbe86c7900a88aedcffc83b479aa3a4"), u256("0xf987a7253ac413176f2b074cf7815e54"),
      u256("0xf3392b0822b70005940c7a398e4b70f3"), u256("0xe7159475a2c29b7443b29c7fa6e889d9"),
      u256("0xd097f3bdfd2022b8845ad8f792aa5825"), u256("0xa9f746462d870fdf8a65dc1f90e061e5"),
      u256("0x70d869a156d2a1b890bb3df62baf32f7"), u256("0x31be135f97d08fd981231505542fcfa6"),
      u256("0x9aa508b5b7a84e1c677de54f3e99bc9"),  u256("0x5d6af8dedb81196699c329225ee604"),
      u256("0x2216e584f5fa1ea926041bedfe98"),     u256("0x48a170391f7dc42444e8fa2"),
  };
  return table;
}

// Arithmetic (flooring) right shift of a sign-magnitude value.
inline i256 floor_shr(const i256& x, unsigned bits) {
  if (x >= 0) return x >> bits;
  const i256 mag = -x;
  const i256 mask = (i256(1) << bits) - 1;
  return -((mag + mask) >> bits);
}

}  // namespace detail

/// sqrt(1.0001^tick) * 2^96, rounded exactly as the on-chain lookup does.
inline SqrtPriceX96 tick_to_sqrt_price(Tick tick) {
  if (tick < kMinTick || tick > kMaxTick) {
    throw DomainError("tick out of range: " + std::to_string(tick));
  }
  const auto& table = detail::tick_ratio_table();
  const unsigned abs_tick = static_cast<unsigned>(std::abs(tick));

  u256 ratio = (abs_tick & 1U) ? table[0] : (u256(1) << 128);
  for (unsigned i = 1; i < 20; ++i) {
    if (abs_tick & (1U << i)) ratio = (ratio * table[i]) >> 128;
  }
  if (tick > 0) ratio = kMaxU256 / ratio;

  // Q128.128 -> Q64.96, rounding up so the result round-trips through sqrt_price_to_tick.
  const u256 low_mask = (u256(1) << 32) - 1;
  u256 out = (ratio >> 32) + (((ratio & low_mask) == 0) ? 0U : 1U);
  return SqrtPriceX96(out);
}

/// Greatest tick t with tick_to_sqrt_price(t) <= price.
inline Tick sqrt_price_to_tick(const SqrtPriceX96& price) {
  if (price < kMinSqrtRatio || price >= kMaxSqrtRatio) {
    throw DomainError("sqrt price out of range: " + price.str());
  }
  const u256 ratio = price.raw() << 32;
  const unsigned msb = mp::msb(ratio);

  u256 r = msb >= 128 ? (ratio >> (msb - 127)) : (ratio << (127 - msb));
  i256 log_2 = (i256(static_cast<int>(msb)) - 128) << 64;

  // 14 bits of fractional log2 by repeated squaring.
  for (int i = 0; i < 14; ++i) {
    r = (r * r) >> 127;
    const unsigned f = static_cast<unsigned>(r >> 128);
    if (f) log_2 += i256(1) << (63 - i);
    r >>= f;
  }

  const i256 log_sqrt10001 = log_2 * i256("255738958999603826347141");
  const Tick tick_low = static_cast<Tick>(
      detail::floor_shr(log_sqrt10001 - i256("3402992956809132418596140100660247210"), 128));
  const Tick tick_high = static_cast<Tick>(
      detail::floor_shr(log_sqrt10001 + i256("291339464771989622907027621153398088495"), 128));

  if (tick_low == tick_high) return tick_low;
  return tick_to_sqrt_price(tick_high) <= price ? tick_high : tick_low;
}

}  // namespace clamm
