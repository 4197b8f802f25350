#pragma once

#include "clamm/fixmath/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace clamm::ingest {

inline constexpr int kSchemaVersion = 1;

enum class EventKind { Initialize, Mint, Burn, Swap };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Initialize: return "Initialize";
    case EventKind::Mint: return "Mint";
    case EventKind::Burn: return "Burn";
    case EventKind::Swap: return "Swap";
  }
  return "?";
}

inline std::optional<EventKind> parse_kind(std::string_view s) {
  if (s == "Initialize") return EventKind::Initialize;
  if (s == "Mint") return EventKind::Mint;
  if (s == "Burn") return EventKind::Burn;
  if (s == "Swap") return EventKind::Swap;
  return std::nullopt;
}

/// Position of an event on its chain.
struct EventCoord {
  std::uint64_t block_number{0};
  std::uint32_t log_index{0};

  friend auto operator<=>(const EventCoord&, const EventCoord&) = default;
  std::string str() const { return std::to_string(block_number) + ":" + std::to_string(log_index); }
};

/// One exported pool log. Kind-specific fields are empty when unused.
///
/// Swap rows carry the post-swap sqrt price, liquidity and tick as emitted on chain.
/// Mint/Burn amounts are the unsigned token amounts moved.
struct PoolEvent {
  int schema_version{kSchemaVersion};
  std::string chain;
  std::string pool;
  std::uint64_t block_number{0};
  std::int64_t timestamp{0};
  std::string tx_hash;
  std::uint32_t log_index{0};
  EventKind kind{EventKind::Swap};
  std::string owner;
  std::optional<Tick> tick_lower;
  std::optional<Tick> tick_upper;
  std::optional<Liquidity> liquidity_delta;
  std::optional<i256> amount0;
  std::optional<i256> amount1;
  std::optional<SqrtPriceX96> sqrt_price_x96;
  std::optional<Liquidity> liquidity_after;
  std::optional<Tick> tick_after;
  std::string tx_to;
  std::optional<double> gas_fee_usd;

  EventCoord coord() const { return {block_number, log_index}; }
};

struct GasPoint {
  std::int64_t timestamp{0};
  double gas_fee_usd{0};
  double native_usd{0};
};

struct ChainDataset {
  std::string chain;
  std::vector<PoolEvent> events;
  std::vector<GasPoint> gas_series;
  std::optional<double> block_time_seconds;
};

/// Input that fails validation. `line` is 1-based within `source`, 0 when not line-specific.
class IngestError : public std::runtime_error {
 public:
  IngestError(std::string source, std::size_t line, const std::string& msg)
      : std::runtime_error(format(source, line, msg)), source_(std::move(source)), line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line, const std::string& msg) {
    return line ? source + ":" + std::to_string(line) + ": " + msg : source + ": " + msg;
  }
  std::string source_;
  std::size_t line_;
};

/// Lowercases an address and checks it is 0x followed by 40 hex digits.
inline std::optional<std::string> normalize_address(std::string_view s) {
  if (s.size() != 42 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X')) return std::nullopt;
  std::string out = "0x";
  for (char c : s.substr(2)) {
    if (c >= 'A' && c <= 'F') c = static_cast<char>(c - 'A' + 'a');
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
    out += c;
  }
  return out;
}

/// Lowercase without validation; used for tx_to and pool ids that may be free-form in fixtures.
inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace clamm::ingest
