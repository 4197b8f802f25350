#pragma once

// Hand-built events for small deterministic scenarios.

#include "clamm/fixmath/tick_math.hpp"
#include "clamm/ingest/event.hpp"

#include <string>

namespace ev {

using namespace clamm;
using namespace clamm::ingest;

inline const std::string kPool = "0x00000000000000000000000000000000000000aa";

inline PoolEvent base(EventKind kind, std::uint64_t block, std::uint32_t log, std::int64_t ts) {
  PoolEvent e;
  e.chain = "ethereum";
  e.pool = kPool;
  e.block_number = block;
  e.log_index = log;
  e.timestamp = ts;
  e.kind = kind;
  e.tx_hash = "0x" + std::string(60, '0') + std::to_string(1000 + block % 9000).substr(0, 4);
  return e;
}

inline PoolEvent initialize(std::uint64_t block, std::int64_t ts, Tick tick) {
  PoolEvent e = base(EventKind::Initialize, block, 0, ts);
  e.sqrt_price_x96 = tick_to_sqrt_price(tick);
  e.tick_after = tick;
  return e;
}

inline PoolEvent position(EventKind kind, std::uint64_t block, std::uint32_t log, std::int64_t ts,
                          const std::string& owner, Tick lo, Tick hi, const Liquidity& liq, const u256& a0 = 0,
                          const u256& a1 = 0) {
  PoolEvent e = base(kind, block, log, ts);
  e.owner = owner;
  e.tick_lower = lo;
  e.tick_upper = hi;
  e.liquidity_delta = liq;
  e.amount0 = i256(a0);
  e.amount1 = i256(a1);
  return e;
}

inline PoolEvent swap(std::uint64_t block, std::uint32_t log, std::int64_t ts, const i256& a0, const i256& a1,
                      const std::string& tx_to = {}, std::optional<double> gas = std::nullopt) {
  PoolEvent e = base(EventKind::Swap, block, log, ts);
  e.amount0 = a0;
  e.amount1 = a1;
  e.sqrt_price_x96 = tick_to_sqrt_price(0);
  e.liquidity_after = 0;
  e.tick_after = 0;
  e.tx_to = tx_to;
  e.gas_fee_usd = gas;
  return e;
}

}  // namespace ev
