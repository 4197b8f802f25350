#pragma once

#include "clamm/fixmath/types.hpp"
#include "clamm/ingest/event.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clamm::ingest {

/// Step-function USD price: the value at t is the last point at or before t.
/// Coverage is [first timestamp, last timestamp].
class PriceSeries {
 public:
  PriceSeries() = default;
  explicit PriceSeries(std::vector<std::pair<std::int64_t, double>> points) : points_(std::move(points)) {
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (points_[i].first < points_[i - 1].first) throw DomainError("price series timestamps must be non-decreasing");
    }
    for (const auto& [t, p] : points_) {
      if (!(p >= 0) || !std::isfinite(p)) throw DomainError("price series values must be finite and non-negative");
    }
  }

  static PriceSeries native_from_gas(const std::vector<GasPoint>& gas) {
    std::vector<std::pair<std::int64_t, double>> pts;
    pts.reserve(gas.size());
    for (const auto& g : gas) pts.emplace_back(g.timestamp, g.native_usd);
    return PriceSeries(std::move(pts));
  }

  bool empty() const { return points_.empty(); }
  std::int64_t first() const { return points_.front().first; }
  std::int64_t last() const { return points_.back().first; }
  bool covers(std::int64_t t) const { return !empty() && t >= first() && t <= last(); }

  std::optional<double> at(std::int64_t t) const {
    if (!covers(t)) return std::nullopt;
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](std::int64_t v, const auto& p) { return v < p.first; });
    return std::prev(it)->second;
  }

  const std::vector<std::pair<std::int64_t, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<std::int64_t, double>> points_;
};

/// USD pricing of one pool token: a fixed price or a time series.
struct TokenPricing {
  int decimals{18};
  std::optional<double> constant_usd;
  PriceSeries series;

  static TokenPricing fixed(int decimals, double usd) { return {decimals, usd, {}}; }
  static TokenPricing over_time(int decimals, PriceSeries s) { return {decimals, std::nullopt, std::move(s)}; }

  bool covers(std::int64_t t) const { return constant_usd.has_value() || series.covers(t); }
  std::optional<double> usd_per_token(std::int64_t t) const {
    if (constant_usd) return constant_usd;
    return series.at(t);
  }
};

/// Converts raw token amounts of a pool's two tokens into USD.
class UsdPricer {
 public:
  UsdPricer(TokenPricing token0, TokenPricing token1) : tokens_{std::move(token0), std::move(token1)} {}

  const TokenPricing& token(int i) const { return tokens_.at(static_cast<std::size_t>(i)); }
  bool covers(std::int64_t t) const { return tokens_[0].covers(t) && tokens_[1].covers(t); }

  /// USD per raw unit of token i (one unit = 10^-decimals tokens).
  double usd_per_raw(int i, std::int64_t t) const {
    const auto& tok = token(i);
    const auto p = tok.usd_per_token(t);
    if (!p) throw DomainError("no USD price for token" + std::to_string(i) + " at " + std::to_string(t));
    return *p / std::pow(10.0, tok.decimals);
  }

  double usd_value(int i, double raw_amount, std::int64_t t) const { return raw_amount * usd_per_raw(i, t); }
  double usd_value(int i, const u256& raw_amount, std::int64_t t) const {
    return usd_value(i, raw_amount.convert_to<double>(), t);
  }

 private:
  std::array<TokenPricing, 2> tokens_;
};

}  // namespace clamm::ingest
