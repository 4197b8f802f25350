#pragma once

#include "clamm/pool/pool_state.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clamm {

/// Canonical snapshot: every state field and the full tick and position tables,
/// integers as decimal strings, keys sorted, no whitespace.
inline nlohmann::json snapshot_json(const PoolState& s) {
  using nlohmann::json;
  json ticks = json::array();
  for (const auto& [t, info] : s.ticks().entries()) {
    ticks.push_back({{"tick", t},
                     {"liquidity_gross", to_dec(info.liquidity_gross)},
                     {"liquidity_net", to_dec(info.liquidity_net)},
                     {"fee_growth_outside_0", info.fee_growth_outside_0.str()},
                     {"fee_growth_outside_1", info.fee_growth_outside_1.str()},
                     {"initialized", info.initialized}});
  }
  json positions = json::array();
  for (const auto& [key, p] : s.positions()) {
    positions.push_back({{"owner", p.owner},
                         {"tick_lower", p.tick_lower},
                         {"tick_upper", p.tick_upper},
                         {"liquidity", to_dec(p.liquidity)},
                         {"fee_growth_inside_last_0", p.fee_growth_inside_last_0.str()},
                         {"fee_growth_inside_last_1", p.fee_growth_inside_last_1.str()},
                         {"tokens_owed_0", to_dec(p.tokens_owed_0)},
                         {"tokens_owed_1", to_dec(p.tokens_owed_1)}});
  }
  return {{"initialized", s.initialized()},
          {"sqrt_price_x96", s.sqrt_price().str()},
          {"tick", s.tick()},
          {"liquidity", to_dec(s.liquidity())},
          {"fee_growth_global_0", s.fee_growth_global_0().str()},
          {"fee_growth_global_1", s.fee_growth_global_1().str()},
          {"fee_tier", s.fee_pips()},
          {"tick_spacing", s.tick_spacing()},
          {"ticks", std::move(ticks)},
          {"positions", std::move(positions)}};
}

inline std::string canonical_snapshot(const PoolState& s) { return snapshot_json(s).dump(); }

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

inline std::string state_hash(const PoolState& s) { return sha256_hex(canonical_snapshot(s)); }

}  // namespace clamm
