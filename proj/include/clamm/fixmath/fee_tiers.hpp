#pragma once

#include "clamm/fixmath/types.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace clamm {

/// Fee tier (hundredths of a bip) to tick spacing. Deployments differ, so this is data.
class FeeTierTable {
 public:
  static FeeTierTable defaults() {
    FeeTierTable t;
    t.set(100, 1);
    t.set(500, 10);
    t.set(3000, 60);
    t.set(10000, 200);
    return t;
  }

  void set(std::uint32_t fee_pips, Tick spacing) {
    if (spacing <= 0 || spacing > 16384) throw DomainError("invalid tick spacing " + std::to_string(spacing));
    spacing_[fee_pips] = spacing;
  }

  Tick spacing_for(std::uint32_t fee_pips) const {
    auto it = spacing_.find(fee_pips);
    if (it == spacing_.end()) throw DomainError("unknown fee tier " + std::to_string(fee_pips));
    return it->second;
  }

  bool contains(std::uint32_t fee_pips) const { return spacing_.count(fee_pips) != 0; }
  const std::map<std::uint32_t, Tick>& entries() const { return spacing_; }

 private:
  std::map<std::uint32_t, Tick> spacing_;
};

}  // namespace clamm
