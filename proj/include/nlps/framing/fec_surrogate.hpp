#pragma once

#include "nlps/common/bits.hpp"
#include "nlps/common/error.hpp"
#include "nlps/common/random.hpp"
#include "nlps/framing/accounting.hpp"

#include <array>
#include <span>

namespace nlps::framing {

/// Stand-in for the systematic FEC encoder. Performance is judged by GMI, so
/// parity only needs the right count and pseudo-random content: the bits are
/// a keyed 128-bit digest of the systematic bits expanded in counter mode.
/// Not a code; nothing decodes it.
inline Bits fec_surrogate_parity(std::span<const std::uint8_t> systematic, Rational fec_rate, std::uint64_t key) {
  if (fec_rate <= 0 || fec_rate > 1) throw ConfigError("FEC rate must lie in (0, 1]");
  const Rational count = Rational(static_cast<long long>(systematic.size())) * (Rational(1) - fec_rate) / fec_rate;
  if (count.denominator() != 1)
    throw ConfigError("parity count " + to_string(count) + " is not an integer for " + std::to_string(systematic.size()) + " systematic bits");
  const auto parity_count = static_cast<std::size_t>(count.numerator());
  if (parity_count == 0) return {};

  std::array<std::uint64_t, 2> h{mix64(key ^ 0x243f6a8885a308d3ULL), mix64(key ^ 0x13198a2e03707344ULL)};
  std::uint64_t word = 0;
  const auto absorb = [&](std::uint64_t w) {
    h[0] = mix64(h[0] ^ w);
    h[1] = mix64(h[1] + w + h[0]);
  };
  for (std::size_t i = 0; i < systematic.size(); ++i) {
    word = (word << 1) | (systematic[i] & 1U);
    if (i % 64 == 63) {
      absorb(word);
      word = 0;
    }
  }
  absorb(word);
  absorb(static_cast<std::uint64_t>(systematic.size()));

  Bits parity(parity_count);
  std::uint64_t block = 0;
  for (std::size_t i = 0; i < parity_count; ++i) {
    if (i % 64 == 0) block = mix64(h[0] ^ mix64(h[1] + i / 64));
    parity[i] = static_cast<std::uint8_t>((block >> (i % 64)) & 1U);
  }
  return parity;
}

}  // namespace nlps::framing
