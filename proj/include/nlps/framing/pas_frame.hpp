#pragma once

#include "nlps/dm/factory.hpp"
#include "nlps/framing/accounting.hpp"
#include "nlps/framing/fec_surrogate.hpp"
#include "nlps/shaping/constellation.hpp"
#include "nlps/shaping/symbol_sequence.hpp"

#include <algorithm>
#include <numeric>

namespace nlps::framing {

/// Where parity bits land among the 4n sign slots.
enum class ParityLayout { kConsecutive, kRandom };

inline ParityLayout parse_parity_layout(const std::string& s) {
  if (s == "consecutive") return ParityLayout::kConsecutive;
  if (s == "random") return ParityLayout::kRandom;
  throw ConfigError("parity_mode must be 'consecutive' or 'random', got '" + s + "'");
}

/// DM output and unshaped bits of one block, before parity is attached.
struct FrameParts {
  std::vector<int> amplitudes;  ///< 4n, slot order X-I, X-Q, Y-I, Y-Q
  Bits unshaped;                ///< n_u bits destined for sign slots

  friend bool operator==(const FrameParts&, const FrameParts&) = default;
};

inline std::int8_t sign_of_bit(std::uint8_t b) { return b ? std::int8_t{1} : std::int8_t{-1}; }
inline std::uint8_t bit_of_sign(std::int8_t s) { return s > 0 ? 1 : 0; }

/// PAS block framing: payload bits -> DM bank (first dm_bits) and unshaped
/// sign bits (remaining n_u); parity of (amplitude labels, unshaped bits) from
/// the FEC surrogate fills the parity sign slots.
class PasFramer {
 public:
  PasFramer(dm::CodecPtr codec, int order, Rational fec_rate, int n, int candidates = 1,
            ParityLayout layout = ParityLayout::kConsecutive, std::uint64_t seed = 0)
      : codec_(std::move(codec)), constellation_(order), fec_key_(derive_seed(seed, "fec-surrogate")) {
    if (!codec_) throw ConfigError("PAS framing needs a distribution matcher");
    const auto alphabet = constellation_.amplitude_alphabet();
    if (!std::equal(alphabet.begin(), alphabet.end(), codec_->alphabet().begin(), codec_->alphabet().end()))
      throw ConfigError("DM alphabet does not match the constellation amplitudes");
    acc_ = account(order, fec_rate, n, codec_->block_length(), codec_->input_bits(), candidates);

    std::vector<int> slots(static_cast<std::size_t>(acc_.sign_slots()));
    std::iota(slots.begin(), slots.end(), 0);
    if (layout == ParityLayout::kRandom) {
      Rng rng(derive_seed(seed, "parity-layout"));
      std::shuffle(slots.begin(), slots.end(), rng);
      std::sort(slots.begin(), slots.begin() + acc_.parity_bits);
      std::sort(slots.begin() + acc_.parity_bits, slots.end());
    }
    parity_slots_.assign(slots.begin(), slots.begin() + acc_.parity_bits);
    unshaped_slots_.assign(slots.begin() + acc_.parity_bits, slots.end());
  }

  const PasAccounting& accounting() const noexcept { return acc_; }
  const Constellation& constellation() const noexcept { return constellation_; }
  const dm::DistributionMatcher& codec() const noexcept { return *codec_; }
  std::span<const int> parity_slots() const noexcept { return parity_slots_; }
  std::span<const int> unshaped_slots() const noexcept { return unshaped_slots_; }

  FrameParts split(std::span<const std::uint8_t> payload) const {
    if (static_cast<int>(payload.size()) != acc_.payload_bits())
      throw std::invalid_argument("PasFramer: expected " + std::to_string(acc_.payload_bits()) + " payload bits, got " +
                                  std::to_string(payload.size()));
    FrameParts parts;
    parts.amplitudes.reserve(static_cast<std::size_t>(acc_.sign_slots()));
    const auto k = static_cast<std::size_t>(acc_.dm_input_bits);
    for (int j = 0; j < acc_.dm_count; ++j) {
      const auto block = codec_->encode(payload.subspan(static_cast<std::size_t>(j) * k, k));
      parts.amplitudes.insert(parts.amplitudes.end(), block.begin(), block.end());
    }
    parts.unshaped.assign(payload.begin() + acc_.dm_bits, payload.end());
    return parts;
  }

  Bits merge(const FrameParts& parts) const {
    Bits payload;
    payload.reserve(static_cast<std::size_t>(acc_.payload_bits()));
    const auto len = static_cast<std::size_t>(acc_.dm_block_length);
    for (int j = 0; j < acc_.dm_count; ++j) {
      const auto bits = codec_->decode(std::span(parts.amplitudes).subspan(static_cast<std::size_t>(j) * len, len));
      payload.insert(payload.end(), bits.begin(), bits.end());
    }
    payload.insert(payload.end(), parts.unshaped.begin(), parts.unshaped.end());
    return payload;
  }

  /// FEC input is the amplitude labels (Gray, sign bit removed) followed by the unshaped bits.
  Bits parity(const FrameParts& parts) const {
    const int label_bits = acc_.bits_per_symbol / 2 - 1;
    Bits systematic;
    systematic.reserve(static_cast<std::size_t>(acc_.fec_input_bits));
    for (int a : parts.amplitudes) {
      const unsigned l = constellation_.amplitude_label(a);
      for (int b = label_bits - 1; b >= 0; --b) systematic.push_back(static_cast<std::uint8_t>((l >> b) & 1U));
    }
    systematic.insert(systematic.end(), parts.unshaped.begin(), parts.unshaped.end());
    return fec_surrogate_parity(systematic, acc_.fec_rate, fec_key_);
  }

  SymbolSequence assemble(const FrameParts& parts, std::span<const std::uint8_t> parity_signs) const {
    if (parity_signs.size() != parity_slots_.size()) throw std::invalid_argument("PasFramer::assemble: wrong parity length");
    if (parts.unshaped.size() != unshaped_slots_.size()) throw std::invalid_argument("PasFramer::assemble: wrong unshaped length");
    std::vector<std::int8_t> signs(static_cast<std::size_t>(acc_.sign_slots()));
    for (std::size_t i = 0; i < parity_slots_.size(); ++i) signs[static_cast<std::size_t>(parity_slots_[i])] = sign_of_bit(parity_signs[i]);
    for (std::size_t i = 0; i < unshaped_slots_.size(); ++i)
      signs[static_cast<std::size_t>(unshaped_slots_[i])] = sign_of_bit(parts.unshaped[i]);
    return assemble_4d(parts.amplitudes, signs, constellation_.amplitude_alphabet());
  }

  SymbolSequence frame(std::span<const std::uint8_t> payload) const {
    const auto parts = split(payload);
    return assemble(parts, parity(parts));
  }

  FrameParts disassemble(const SymbolSequence& seq) const {
    check_length(seq);
    FrameParts parts{seq.amplitudes, {}};
    parts.unshaped.reserve(unshaped_slots_.size());
    for (int slot : unshaped_slots_) parts.unshaped.push_back(bit_of_sign(seq.signs[static_cast<std::size_t>(slot)]));
    return parts;
  }

  Bits parity_signs(const SymbolSequence& seq) const {
    check_length(seq);
    Bits bits;
    bits.reserve(parity_slots_.size());
    for (int slot : parity_slots_) bits.push_back(bit_of_sign(seq.signs[static_cast<std::size_t>(slot)]));
    return bits;
  }

  Bits deframe(const SymbolSequence& seq) const { return merge(disassemble(seq)); }

  bool parity_consistent(const SymbolSequence& seq) const { return parity(disassemble(seq)) == parity_signs(seq); }

 private:
  void check_length(const SymbolSequence& seq) const {
    if (static_cast<int>(seq.size()) != acc_.n) throw std::invalid_argument("PasFramer: sequence length differs from n");
  }

  dm::CodecPtr codec_;
  Constellation constellation_;
  std::uint64_t fec_key_;
  PasAccounting acc_;
  std::vector<int> parity_slots_;
  std::vector<int> unshaped_slots_;
};

}  // namespace nlps::framing
