#pragma once

#include "clamm/ingest/event.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace clamm::ingest {

inline constexpr std::array<std::string_view, 19> kEventColumns = {
    "schema_version", "chain",     "pool",       "block_number",    "timestamp",      "tx_hash",   "log_index",
    "kind",           "owner",     "tick_lower", "tick_upper",      "liquidity_delta", "amount0",  "amount1",
    "sqrt_price_x96", "liquidity_after", "tick_after", "tx_to",     "gas_fee_usd"};

inline constexpr std::array<std::string_view, 3> kGasColumns = {"timestamp", "gas_fee_usd", "native_usd"};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view chomp(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

class RowReader {
 public:
  RowReader(const std::string& source, std::size_t line, std::vector<std::string_view> fields)
      : source_(source), line_(line), fields_(std::move(fields)) {}

  [[noreturn]] void fail(const std::string& msg) const { throw IngestError(source_, line_, msg); }

  std::string_view raw(std::size_t i) const { return fields_[i]; }
  std::string text(std::size_t i) const { return std::string(fields_[i]); }
  bool empty(std::size_t i) const { return fields_[i].empty(); }

  template <typename Int>
  Int integer(std::size_t i) const {
    Int v{};
    if (!parse_int(fields_[i], v)) fail("bad " + std::string(kEventColumns[i]) + " '" + text(i) + "'");
    return v;
  }

  template <typename Int>
  std::optional<Int> opt_integer(std::size_t i) const {
    if (empty(i)) return std::nullopt;
    return integer<Int>(i);
  }

  std::optional<Liquidity> opt_liquidity(std::size_t i) const {
    if (empty(i)) return std::nullopt;
    if (fields_[i][0] == '-') fail("negative " + std::string(kEventColumns[i]) + " '" + text(i) + "'");
    try {
      return parse_u128(text(i));
    } catch (const DomainError& e) {
      fail(std::string(kEventColumns[i]) + ": " + e.what());
    }
  }

  std::optional<i256> opt_i256(std::size_t i) const {
    if (empty(i)) return std::nullopt;
    try {
      return parse_i256(text(i));
    } catch (const DomainError& e) {
      fail(std::string(kEventColumns[i]) + ": " + e.what());
    }
  }

  std::optional<SqrtPriceX96> opt_price(std::size_t i) const {
    if (empty(i)) return std::nullopt;
    try {
      return SqrtPriceX96(parse_u256(text(i)));
    } catch (const DomainError& e) {
      fail(std::string(kEventColumns[i]) + ": " + e.what());
    }
  }

 private:
  const std::string& source_;
  std::size_t line_;
  std::vector<std::string_view> fields_;
};

inline void require(const RowReader& r, bool ok, EventKind kind, std::string_view field) {
  if (!ok) r.fail(std::string(to_string(kind)) + " row missing " + std::string(field));
}

inline PoolEvent parse_event_row(const RowReader& r, int schema_version) {
  PoolEvent e;
  e.schema_version = r.integer<int>(0);
  if (e.schema_version != schema_version) {
    r.fail("schema version " + std::to_string(e.schema_version) + ", expected " + std::to_string(schema_version));
  }
  e.chain = r.text(1);
  if (e.chain.empty()) r.fail("empty chain");
  e.pool = lower(r.raw(2));
  if (e.pool.empty()) r.fail("empty pool");
  e.block_number = r.integer<std::uint64_t>(3);
  e.timestamp = r.integer<std::int64_t>(4);
  e.tx_hash = lower(r.raw(5));
  e.log_index = r.integer<std::uint32_t>(6);
  const auto kind = parse_kind(r.raw(7));
  if (!kind) r.fail("unknown kind '" + r.text(7) + "'");
  e.kind = *kind;
  e.owner = lower(r.raw(8));
  e.tick_lower = r.opt_integer<Tick>(9);
  e.tick_upper = r.opt_integer<Tick>(10);
  e.liquidity_delta = r.opt_liquidity(11);
  e.amount0 = r.opt_i256(12);
  e.amount1 = r.opt_i256(13);
  e.sqrt_price_x96 = r.opt_price(14);
  e.liquidity_after = r.opt_liquidity(15);
  e.tick_after = r.opt_integer<Tick>(16);
  e.tx_to = lower(r.raw(17));
  if (!r.empty(18)) {
    double g = 0;
    if (!parse_double(r.raw(18), g) || g < 0) r.fail("bad gas_fee_usd '" + r.text(18) + "'");
    e.gas_fee_usd = g;
  }

  switch (e.kind) {
    case EventKind::Initialize:
      require(r, e.sqrt_price_x96.has_value(), e.kind, "sqrt_price_x96");
      require(r, e.tick_after.has_value(), e.kind, "tick_after");
      break;
    case EventKind::Mint:
    case EventKind::Burn:
      require(r, !e.owner.empty(), e.kind, "owner");
      require(r, e.tick_lower.has_value(), e.kind, "tick_lower");
      require(r, e.tick_upper.has_value(), e.kind, "tick_upper");
      require(r, e.liquidity_delta.has_value(), e.kind, "liquidity_delta");
      require(r, e.amount0.has_value(), e.kind, "amount0");
      require(r, e.amount1.has_value(), e.kind, "amount1");
      if (*e.amount0 < 0 || *e.amount1 < 0) r.fail(std::string(to_string(e.kind)) + " amounts must be non-negative");
      break;
    case EventKind::Swap:
      require(r, e.amount0.has_value(), e.kind, "amount0");
      require(r, e.amount1.has_value(), e.kind, "amount1");
      require(r, e.sqrt_price_x96.has_value(), e.kind, "sqrt_price_x96");
      require(r, e.liquidity_after.has_value(), e.kind, "liquidity_after");
      require(r, e.tick_after.has_value(), e.kind, "tick_after");
      break;
  }
  return e;
}

}  // namespace detail

/// Parses an event export. Rows must be strictly ordered by (block_number, log_index)
/// and all belong to one chain. An empty stream yields an empty dataset.
inline ChainDataset read_events(std::istream& in, const std::string& source, int schema_version = kSchemaVersion) {
  ChainDataset ds;
  std::string line;
  std::size_t line_no = 0;
  char delim = ',';
  bool have_header = false;
  std::optional<EventCoord> prev;
  std::int64_t prev_ts = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = detail::chomp(line);
    if (!have_header) {
      if (view.empty()) continue;
      delim = view.find('\t') != std::string_view::npos ? '\t' : ',';
      const auto cols = detail::split(view, delim);
      bool ok = cols.size() == kEventColumns.size();
      for (std::size_t i = 0; ok && i < cols.size(); ++i) ok = cols[i] == kEventColumns[i];
      if (!ok) throw IngestError(source, line_no, "header does not match event schema");
      have_header = true;
      continue;
    }
    if (view.empty()) continue;

    auto fields = detail::split(view, delim);
    if (fields.size() != kEventColumns.size()) {
      throw IngestError(source, line_no,
                        "expected " + std::to_string(kEventColumns.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    detail::RowReader row(source, line_no, std::move(fields));
    PoolEvent e = detail::parse_event_row(row, schema_version);

    if (ds.chain.empty()) ds.chain = e.chain;
    else if (e.chain != ds.chain) row.fail("chain '" + e.chain + "' differs from '" + ds.chain + "'");

    const EventCoord c = e.coord();
    if (prev) {
      if (c == *prev) row.fail("duplicate event " + c.str());
      if (c < *prev) row.fail("event " + c.str() + " out of order after " + prev->str());
      if (e.timestamp < prev_ts) row.fail("timestamp decreases at event " + c.str());
    }
    prev = c;
    prev_ts = e.timestamp;
    ds.events.push_back(std::move(e));
  }
  return ds;
}

inline ChainDataset load_dataset(const std::filesystem::path& path, int schema_version = kSchemaVersion) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string(), 0, "cannot open event file");
  return read_events(in, path.string(), schema_version);
}

inline void write_events(std::ostream& out, const std::vector<PoolEvent>& events) {
  for (std::size_t i = 0; i < kEventColumns.size(); ++i) out << (i ? "," : "") << kEventColumns[i];
  out << '\n';
  auto opt = [](const auto& o) -> std::string {
    if (!o) return {};
    if constexpr (std::is_same_v<std::decay_t<decltype(*o)>, SqrtPriceX96>) return o->str();
    else if constexpr (std::is_integral_v<std::decay_t<decltype(*o)>>) return std::to_string(*o);
    else return o->str();
  };
  for (const auto& e : events) {
    out << e.schema_version << ',' << e.chain << ',' << e.pool << ',' << e.block_number << ',' << e.timestamp << ','
        << e.tx_hash << ',' << e.log_index << ',' << to_string(e.kind) << ',' << e.owner << ',' << opt(e.tick_lower)
        << ',' << opt(e.tick_upper) << ',' << opt(e.liquidity_delta) << ',' << opt(e.amount0) << ','
        << opt(e.amount1) << ',' << opt(e.sqrt_price_x96) << ',' << opt(e.liquidity_after) << ','
        << opt(e.tick_after) << ',' << e.tx_to << ','
        << (e.gas_fee_usd ? detail::format_double(*e.gas_fee_usd) : std::string()) << '\n';
  }
}

inline std::vector<GasPoint> read_gas_series(std::istream& in, const std::string& source) {
  std::vector<GasPoint> out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = detail::chomp(line);
    if (view.empty()) continue;
    const auto cols = detail::split(view, ',');
    if (!have_header) {
      bool ok = cols.size() == kGasColumns.size();
      for (std::size_t i = 0; ok && i < cols.size(); ++i) ok = cols[i] == kGasColumns[i];
      if (!ok) throw IngestError(source, line_no, "header does not match gas series schema");
      have_header = true;
      continue;
    }
    if (cols.size() != kGasColumns.size()) throw IngestError(source, line_no, "expected 3 fields");
    GasPoint p;
    if (!detail::parse_int(cols[0], p.timestamp)) throw IngestError(source, line_no, "bad timestamp");
    if (!detail::parse_double(cols[1], p.gas_fee_usd) || p.gas_fee_usd < 0) {
      throw IngestError(source, line_no, "bad gas_fee_usd");
    }
    if (!detail::parse_double(cols[2], p.native_usd) || p.native_usd < 0) {
      throw IngestError(source, line_no, "bad native_usd");
    }
    if (!out.empty() && p.timestamp < out.back().timestamp) {
      throw IngestError(source, line_no, "timestamps must be non-decreasing");
    }
    out.push_back(p);
  }
  return out;
}

inline std::vector<GasPoint> load_gas_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string(), 0, "cannot open gas series");
  return read_gas_series(in, path.string());
}

inline void write_gas_series(std::ostream& out, const std::vector<GasPoint>& series) {
  out << "timestamp,gas_fee_usd,native_usd\n";
  for (const auto& p : series) {
    out << p.timestamp << ',' << detail::format_double(p.gas_fee_usd) << ',' << detail::format_double(p.native_usd)
        << '\n';
  }
}

}  // namespace clamm::ingest
