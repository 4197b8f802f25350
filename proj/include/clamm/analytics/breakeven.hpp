#pragma once

#include "clamm/analytics/quote.hpp"
#include "clamm/ingest/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace clamm::analytics {

enum class BreakevenStatus { Root, NoCrossing, Degenerate };
enum class Venue { A, B, Tie };

inline std::string_view to_string(BreakevenStatus s) {
  switch (s) {
    case BreakevenStatus::Root: return "root";
    case BreakevenStatus::NoCrossing: return "no_crossing";
    case BreakevenStatus::Degenerate: return "degenerate";
  }
  return "?";
}
inline std::string_view to_string(Venue v) { return v == Venue::A ? "a" : v == Venue::B ? "b" : "tie"; }

struct BreakevenOptions {
  double tol_usd{1.0};
  double min_usd{10.0};
  double max_usd{1e9};
  int points_per_decade{24};
  double degenerate_rel{1e-12};
};

struct BreakevenPoint {
  std::int64_t timestamp{0};
  std::string chain_a;
  std::string chain_b;
  int input_token{0};
  int output_token{1};
  std::optional<double> breakeven_input_usd;
  double gas_a_usd{0};
  double gas_b_usd{0};
  BreakevenStatus status{BreakevenStatus::NoCrossing};
  Venue regime{Venue::Tie};  // venue with more net output below the breakeven (or over the whole range)
  int evaluations{0};
};

/// Net output (output-token raw units) of an exact-input trade worth `usd`, after gas.
class NetOutput {
 public:
  NetOutput(const PoolState& s, double gas_usd, bool zero_for_one, const ingest::UsdPricer& pricer,
            std::int64_t timestamp)
      : state_(s), zero_for_one_(zero_for_one) {
    const int in = zero_for_one ? 0 : 1;
    in_per_usd_ = 1.0 / pricer.usd_per_raw(in, timestamp);
    gas_out_ = gas_usd / pricer.usd_per_raw(1 - in, timestamp);
  }

  u256 raw_input(double usd) const { return u256(std::floor(usd * in_per_usd_)); }
  double operator()(double usd) const {
    return quote(state_, raw_input(usd), zero_for_one_).amount_out.convert_to<double>() - gas_out_;
  }

 private:
  const PoolState& state_;
  bool zero_for_one_;
  double in_per_usd_{0};
  double gas_out_{0};
};

/// Input size (USD) at which both venues deliver the same net output.
///
/// f(x) = net_a(x) - net_b(x) is scanned on a geometric grid; the first sign change from
/// the small end is bisected to `tol_usd`. Identical venues give f == 0 everywhere and are
/// reported as degenerate.
inline BreakevenPoint breakeven_size(const PoolState& a, double gas_a_usd, const PoolState& b, double gas_b_usd,
                                     bool zero_for_one, const ingest::UsdPricer& pricer, std::int64_t timestamp,
                                     const BreakevenOptions& opts = {}) {
  if (gas_a_usd < 0 || gas_b_usd < 0) throw DomainError("gas must be non-negative");
  if (!(opts.tol_usd > 0) || !(opts.min_usd > 0) || !(opts.max_usd > opts.min_usd) || opts.points_per_decade < 1) {
    throw DomainError("invalid breakeven search range");
  }
  const NetOutput net_a(a, gas_a_usd, zero_for_one, pricer, timestamp);
  const NetOutput net_b(b, gas_b_usd, zero_for_one, pricer, timestamp);

  BreakevenPoint out;
  out.timestamp = timestamp;
  out.input_token = zero_for_one ? 0 : 1;
  out.output_token = 1 - out.input_token;
  out.gas_a_usd = gas_a_usd;
  out.gas_b_usd = gas_b_usd;

  struct Sample {
    double x, f, scale;
  };
  auto eval = [&](double x) {
    ++out.evaluations;
    const double na = net_a(x);
    const double nb = net_b(x);
    return Sample{x, na - nb, std::max({std::abs(na), std::abs(nb), 1.0})};
  };
  auto sign = [&](const Sample& s) { return std::abs(s.f) <= opts.degenerate_rel * s.scale ? 0 : (s.f > 0 ? 1 : -1); };

  const double decades = std::log10(opts.max_usd / opts.min_usd);
  const int n = std::max(1, static_cast<int>(std::ceil(decades * opts.points_per_decade)));
  std::vector<Sample> grid;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i == n ? opts.max_usd : opts.min_usd * std::pow(10.0, decades * i / n);
    grid.push_back(eval(x));
  }

  const auto first_nonzero =
      std::find_if(grid.begin(), grid.end(), [&](const Sample& s) { return sign(s) != 0; });
  if (first_nonzero == grid.end()) {
    out.status = BreakevenStatus::Degenerate;
    out.regime = Venue::Tie;
    return out;
  }
  const int s0 = sign(*first_nonzero);
  out.regime = s0 > 0 ? Venue::A : Venue::B;

  for (auto it = first_nonzero + 1; it != grid.end(); ++it) {
    const int si = sign(*it);
    if (si == s0) continue;
    // Bracket: last sample on the s0 side and this one.
    double lo = std::prev(it)->x;
    double hi = it->x;
    if (si == 0) {
      // Walk forward past ties to confirm a crossing rather than a touch.
      auto next = std::find_if(it, grid.end(), [&](const Sample& s) { return sign(s) != 0; });
      if (next == grid.end() || sign(*next) == s0) continue;
    }
    while (hi - lo > opts.tol_usd) {
      const double mid = 0.5 * (lo + hi);
      const Sample m = eval(mid);
      if (sign(m) == s0) lo = mid;
      else hi = mid;
    }
    out.breakeven_input_usd = 0.5 * (lo + hi);
    out.status = BreakevenStatus::Root;
    return out;
  }
  out.status = BreakevenStatus::NoCrossing;
  return out;
}

}  // namespace clamm::analytics
