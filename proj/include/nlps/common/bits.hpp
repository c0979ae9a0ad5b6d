#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlps {

using BigInt = boost::multiprecision::cpp_int;
using Bits = std::vector<std::uint8_t>;

/// Position of the most significant set bit plus one (0 for value 0).
inline std::size_t msb_or_zero(const BigInt& value) {
  return value == 0 ? 0 : boost::multiprecision::msb(value) + 1;
}

/// Interprets bits MSB-first as an unsigned integer.
inline BigInt bits_to_bigint(std::span<const std::uint8_t> bits) {
  BigInt value = 0;
  for (auto b : bits) {
    value <<= 1;
    if (b) value |= 1;
  }
  return value;
}

/// Writes the low `width` bits of value MSB-first.
inline Bits bigint_to_bits(const BigInt& value, std::size_t width) {
  if (value < 0 || msb_or_zero(value) > width)
    throw std::invalid_argument("bigint_to_bits: value does not fit in width");
  Bits bits(width);
  for (std::size_t i = 0; i < width; ++i)
    bits[width - 1 - i] = static_cast<std::uint8_t>(boost::multiprecision::bit_test(value, static_cast<unsigned>(i)));
  return bits;
}

inline std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits) {
  if (bits.size() > 64) throw std::invalid_argument("bits_to_uint: more than 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1U);
  return v;
}

inline Bits uint_to_bits(std::uint64_t value, std::size_t width) {
  Bits bits(width);
  for (std::size_t i = 0; i < width; ++i) bits[width - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1U);
  return bits;
}

inline Bits xor_bits(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("xor_bits: length mismatch");
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

/// floor(log2(value)) for value >= 1.
inline std::size_t floor_log2(const BigInt& value) {
  if (value < 1) throw std::invalid_argument("floor_log2: value must be >= 1");
  return boost::multiprecision::msb(value);
}

}  // namespace nlps
