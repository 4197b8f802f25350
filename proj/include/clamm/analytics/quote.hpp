#pragma once

#include "clamm/pool/pool_state.hpp"

namespace clamm::analytics {

struct Quote {
  u256 amount_in{0};   // input consumed, fee included
  u256 amount_out{0};
  u256 fee_paid{0};
  SqrtPriceX96 end_price;
  bool partial_fill{false};
};

/// Exact-input swap evaluated on the state without committing it.
inline Quote quote(const PoolState& s, const u256& amount_in, bool zero_for_one) {
  if (!s.initialized()) throw StateError("quote on uninitialized pool");
  Quote q;
  q.end_price = s.sqrt_price();
  if (amount_in == 0) return q;
  const SqrtPriceX96 limit = no_price_limit(zero_for_one);
  if (zero_for_one ? s.sqrt_price() <= limit : s.sqrt_price() >= limit) {
    q.partial_fill = true;
    return q;
  }
  const SwapResult r = s.simulate_swap(zero_for_one, i256(amount_in), limit);
  const i256 in = zero_for_one ? r.amount0 : r.amount1;
  const i256 out = zero_for_one ? r.amount1 : r.amount0;
  q.amount_in = static_cast<u256>(in);
  q.amount_out = static_cast<u256>(-out);
  q.fee_paid = r.fee_paid;
  q.end_price = r.end_price;
  q.partial_fill = r.partial_fill;
  return q;
}

}  // namespace clamm::analytics
