#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace clamm {

namespace mp = boost::multiprecision;

// Fixed-width integers with EVM semantics: unsigned types wrap modulo 2^N.
using u128 = mp::uint128_t;
using i128 = mp::int128_t;
using u256 = mp::uint256_t;
using i256 = mp::int256_t;
using u512 = mp::uint512_t;

using Liquidity = u128;
using Tick = std::int32_t;

inline constexpr Tick kMinTick = -887272;
inline constexpr Tick kMaxTick = 887272;

inline const u256 kQ96 = u256(1) << 96;
inline const u256 kQ128 = u256(1) << 128;
inline const u256 kMaxU256 = ~u256(0);
inline const u256 kMaxU160 = (u256(1) << 160) - 1;
inline const u128 kMaxU128 = ~u128(0);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MathOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// sqrt(token1/token0) as a Q64.96 number. Holds at most 160 bits.
class SqrtPriceX96 {
 public:
  SqrtPriceX96() = default;
  explicit SqrtPriceX96(u256 v) : value_(std::move(v)) {
    if (value_ > kMaxU160) throw DomainError("sqrt price exceeds 160 bits");
  }

  const u256& raw() const { return value_; }
  std::string str() const { return value_.str(); }

  friend bool operator==(const SqrtPriceX96& a, const SqrtPriceX96& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const SqrtPriceX96& a, const SqrtPriceX96& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  u256 value_{0};
};

/// Cumulative fees per unit of liquidity, Q128. Arithmetic wraps modulo 2^256.
class FeeGrowthX128 {
 public:
  FeeGrowthX128() = default;
  explicit FeeGrowthX128(u256 v) : value_(std::move(v)) {}

  const u256& raw() const { return value_; }
  std::string str() const { return value_.str(); }

  friend FeeGrowthX128 operator+(const FeeGrowthX128& a, const FeeGrowthX128& b) {
    return FeeGrowthX128(a.value_ + b.value_);
  }
  friend FeeGrowthX128 operator-(const FeeGrowthX128& a, const FeeGrowthX128& b) {
    return FeeGrowthX128(a.value_ - b.value_);
  }
  FeeGrowthX128& operator+=(const FeeGrowthX128& o) {
    value_ += o.value_;
    return *this;
  }
  friend bool operator==(const FeeGrowthX128& a, const FeeGrowthX128& b) { return a.value_ == b.value_; }

 private:
  u256 value_{0};
};

/// Decimal rendering helpers; boost prints signed values with a leading '-'.
inline std::string to_dec(const u256& v) { return v.str(); }
inline std::string to_dec(const i256& v) { return v.str(); }
inline std::string to_dec(const u128& v) { return v.str(); }
inline std::string to_dec(const i128& v) { return v.str(); }

/// Parses an unsigned decimal string into a fixed-width integer, rejecting overflow.
template <typename UInt>
UInt parse_unsigned(const std::string& s) {
  if (s.empty()) throw DomainError("empty integer");
  UInt out = 0;
  const UInt ten = 10;
  const UInt limit = ~UInt(0);
  for (char c : s) {
    if (c < '0' || c > '9') throw DomainError("not a decimal integer: '" + s + "'");
    UInt digit = static_cast<unsigned>(c - '0');
    if (out > (limit - digit) / ten) throw DomainError("integer out of range: '" + s + "'");
    out = out * ten + digit;
  }
  return out;
}

/// Parses a signed decimal string. Magnitude must fit in (bits - 1) bits.
template <typename SInt, typename UInt>
SInt parse_signed(const std::string& s) {
  if (s.empty()) throw DomainError("empty integer");
  const bool neg = s[0] == '-';
  const std::string digits = (neg || s[0] == '+') ? s.substr(1) : s;
  UInt mag = parse_unsigned<UInt>(digits);
  if (mag > (~UInt(0) >> 1) + (neg ? 1 : 0)) throw DomainError("integer out of range: '" + s + "'");
  SInt v = static_cast<SInt>(mag);
  return neg ? SInt(-v) : v;
}

inline u256 parse_u256(const std::string& s) { return parse_unsigned<u256>(s); }
inline u128 parse_u128(const std::string& s) { return parse_unsigned<u128>(s); }
inline i256 parse_i256(const std::string& s) { return parse_signed<i256, u256>(s); }

}  // namespace clamm
