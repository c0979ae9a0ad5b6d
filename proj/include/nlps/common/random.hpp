#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <type_traits>
#include <vector>

namespace nlps {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used for all seed derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hierarchical seed derivation: derive_seed(global, "candidate", k, "span", s).
/// Every RNG stream in the library is obtained this way; there is no global RNG.
template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t parent, Rest... rest) noexcept {
  if constexpr (sizeof...(Rest) == 0) {
    return parent;
  } else {
    return [parent](auto head, auto... tail) {
      if constexpr (std::is_convertible_v<decltype(head), std::string_view>)
        return derive_seed(mix64(parent ^ hash_tag(head)), tail...);
      else
        return derive_seed(mix64(mix64(parent) + static_cast<std::uint64_t>(head)), tail...);
    }(rest...);
  }
}

inline std::vector<std::uint8_t> random_bits(std::size_t count, Rng& rng) {
  std::vector<std::uint8_t> bits(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng();
    bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
  }
  return bits;
}

}  // namespace nlps
