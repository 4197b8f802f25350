#pragma once

#include "clamm/ingest/flow.hpp"
#include "clamm/ingest/stats.hpp"

#include <vector>

namespace clamm::analytics {

/// Fraction of swaps (by count) strictly larger than `threshold_usd`.
inline double share_above_threshold(const std::vector<double>& sizes_usd, double threshold_usd) {
  if (sizes_usd.empty()) throw DomainError("share of an empty swap set");
  std::size_t above = 0;
  for (double s : sizes_usd) above += s > threshold_usd ? 1U : 0U;
  return static_cast<double>(above) / static_cast<double>(sizes_usd.size());
}

/// USD input sizes of the swaps labelled `flow`.
inline std::vector<double> swap_sizes_usd(const ingest::ChainDataset& ds, const ingest::RouterRegistry& registry,
                                          const ingest::UsdPricer& pricer, ingest::Flow flow = ingest::Flow::Retail) {
  std::vector<double> out;
  for (const auto& e : ds.events) {
    if (e.kind != ingest::EventKind::Swap || ingest::classify(e, registry) != flow) continue;
    out.push_back(ingest::swap_size_usd(e, pricer));
  }
  return out;
}

}  // namespace clamm::analytics
