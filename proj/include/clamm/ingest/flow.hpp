#pragma once

#include "clamm/ingest/event.hpp"
#include "clamm/ingest/registry.hpp"

#include <string>
#include <vector>

namespace clamm::ingest {

enum class Flow { Retail, Arbitrage };

inline std::string_view to_string(Flow f) { return f == Flow::Retail ? "retail" : "arbitrage"; }

struct FlowLabel {
  std::string tx_hash;
  std::uint32_t log_index{0};
  std::uint64_t block_number{0};
  Flow label{Flow::Arbitrage};
};

struct FlowSegmentation {
  std::vector<FlowLabel> labels;  // one per Swap, in event order
  std::size_t retail{0};
  std::size_t arbitrage{0};
};

/// A swap is retail exactly when its outermost call target is a registered router,
/// whatever the registry label; anything else (including unregistered aggregators) is arbitrage.
inline Flow classify(const PoolEvent& e, const RouterRegistry& registry) {
  return registry.contains(e.tx_to) ? Flow::Retail : Flow::Arbitrage;
}

inline FlowSegmentation segment_flow(const ChainDataset& ds, const RouterRegistry& registry) {
  if (!ds.chain.empty() && ds.chain != registry.chain) {
    throw DomainError("registry chain '" + registry.chain + "' does not match dataset chain '" + ds.chain + "'");
  }
  FlowSegmentation out;
  for (const auto& e : ds.events) {
    if (e.kind != EventKind::Swap) continue;
    const Flow f = classify(e, registry);
    out.labels.push_back({e.tx_hash, e.log_index, e.block_number, f});
    (f == Flow::Retail ? out.retail : out.arbitrage)++;
  }
  return out;
}

}  // namespace clamm::ingest
