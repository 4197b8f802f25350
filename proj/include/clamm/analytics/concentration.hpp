#pragma once

#include "clamm/common/median.hpp"
#include "clamm/pool/pool_state.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace clamm::analytics {

using Rational = boost::multiprecision::cpp_rational;

struct ConcentrationBucket {
  int offset_bps{0};  // bucket start relative to the current tick
  u256 mass{0};       // sum of active liquidity over the bucket's ticks
  double share{0};
};

/// Active liquidity summed tick by tick over [tick - window, tick + window), grouped into
/// buckets of `bucket` ticks (one tick is roughly one basis point). The mid bucket is
/// [tick, tick + bucket).
struct ConcentrationProfile {
  std::int64_t timestamp{0};
  int window_half_width_bps{0};
  int bucket_width_bps{0};
  std::vector<ConcentrationBucket> shares;
  u256 total_mass{0};
  Rational mid_share_exact{0};
  double mid_share{0};
  bool empty{true};
};

inline constexpr int kDefaultWindowBps = 200;
inline constexpr int kDefaultBucketBps = 10;

inline ConcentrationProfile concentration_profile(const PoolState& s, int window_bps = kDefaultWindowBps,
                                                  int bucket_bps = kDefaultBucketBps, std::int64_t timestamp = 0) {
  if (!s.initialized()) throw StateError("concentration of an uninitialized pool");
  if (window_bps <= 0 || bucket_bps <= 0) throw DomainError("window and bucket widths must be positive");
  if (window_bps % bucket_bps != 0) throw DomainError("bucket width must divide the window half-width");

  ConcentrationProfile p;
  p.timestamp = timestamp;
  p.window_half_width_bps = window_bps;
  p.bucket_width_bps = bucket_bps;

  const std::int64_t start = static_cast<std::int64_t>(s.tick()) - window_bps;
  const std::int64_t end = static_cast<std::int64_t>(s.tick()) + window_bps;
  const auto& ticks = s.ticks().entries();

  // Active liquidity on [t, t+1) is the running sum of liquidity_net at or below t.
  i256 active = 0;
  auto it = ticks.begin();
  for (; it != ticks.end() && it->first <= start; ++it) active += i256(it->second.liquidity_net);

  const int buckets = 2 * window_bps / bucket_bps;
  p.shares.resize(static_cast<std::size_t>(buckets));
  for (int b = 0; b < buckets; ++b) p.shares[static_cast<std::size_t>(b)].offset_bps = -window_bps + b * bucket_bps;

  for (std::int64_t t = start; t < end; ++t) {
    if (t > start) {
      for (; it != ticks.end() && it->first <= t; ++it) active += i256(it->second.liquidity_net);
    }
    if (t < kMinTick || t >= kMaxTick || active <= 0) continue;
    const auto b = static_cast<std::size_t>((t - start) / bucket_bps);
    p.shares[b].mass += static_cast<u256>(active);
    p.total_mass += static_cast<u256>(active);
  }

  p.empty = p.total_mass == 0;
  if (!p.empty) {
    for (auto& b : p.shares) b.share = (Rational(b.mass.str()) / Rational(p.total_mass.str())).convert_to<double>();
    const auto& mid = p.shares[static_cast<std::size_t>(buckets / 2)];
    p.mid_share_exact = Rational(mid.mass.str()) / Rational(p.total_mass.str());
    p.mid_share = p.mid_share_exact.convert_to<double>();
  }
  return p;
}

/// The exact decimal a double prints as in shortest round-trip form, e.g. 0.7 -> 7/10.
inline Rational decimal_rational(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific);
  const std::string text(buf.data(), ptr);
  const auto e = text.find('e');
  std::string mantissa = text.substr(0, e);
  int exponent = std::stoi(text.substr(e + 1));
  const auto dot = mantissa.find('.');
  if (dot != std::string::npos) {
    exponent -= static_cast<int>(mantissa.size() - dot - 1);
    mantissa.erase(dot, 1);
  }
  Rational r{boost::multiprecision::cpp_int(mantissa)};
  const boost::multiprecision::cpp_int scale = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), std::abs(exponent));
  if (exponent >= 0) return r * scale;
  return r / scale;
}

/// median_a / median_b - 1.
inline Rational relative_uplift_exact(const Rational& a, const Rational& b) {
  if (b == 0) throw DomainError("uplift relative to zero");
  return a / b - 1;
}

/// Uplift of decimal shares, evaluated exactly so that (0.70, 0.40) gives 0.75.
inline double relative_uplift(double a, double b) {
  return relative_uplift_exact(decimal_rational(a), decimal_rational(b)).convert_to<double>();
}

struct ConcentrationSummary {
  std::size_t samples{0};
  std::size_t empty_samples{0};
  Rational median_mid_share_exact{0};
  double median_mid_share{0};
};

/// Lower median of mid_share over non-empty samples.
inline ConcentrationSummary median_concentration(const std::vector<ConcentrationProfile>& series) {
  if (series.empty()) throw DomainError("median of an empty concentration series");
  std::vector<Rational> mids;
  for (const auto& p : series) {
    if (!p.empty) mids.push_back(p.mid_share_exact);
  }
  if (mids.empty()) throw DomainError("no sample has liquidity in the window");
  ConcentrationSummary s;
  s.samples = series.size();
  s.empty_samples = series.size() - mids.size();
  s.median_mid_share_exact = *lower_median(std::move(mids));
  s.median_mid_share = s.median_mid_share_exact.convert_to<double>();
  return s;
}

inline double relative_uplift(const ConcentrationSummary& a, const ConcentrationSummary& b) {
  return relative_uplift_exact(a.median_mid_share_exact, b.median_mid_share_exact).convert_to<double>();
}

}  // namespace clamm::analytics
