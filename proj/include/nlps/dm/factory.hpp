#pragma once

#include "nlps/dm/ccdm.hpp"
#include "nlps/dm/ess.hpp"
#include "nlps/dm/hidm.hpp"

#include <memory>
#include <stdexcept>

namespace nlps::dm {

using CodecPtr = std::shared_ptr<const DistributionMatcher>;

/// Rebuilds a codec from its descriptor. Descriptors carrying only
/// (type, block_length, input_bits, alphabet) construct the minimal codec for
/// that rate; fully specified descriptors reproduce the codec exactly.
inline CodecPtr make_codec(const CodecDescriptor& d) {
  if (d.type == "ccdm") {
    if (!d.composition.empty()) return std::make_shared<Ccdm>(d.alphabet, d.composition, d.input_bits);
    return std::make_shared<Ccdm>(Ccdm::for_rate(d.alphabet, d.block_length, d.input_bits));
  }
  if (d.type == "ess") {
    if (d.max_energy > 0) {
      auto ess = Ess::with_max_energy(d.alphabet, d.block_length, d.max_energy);
      if (d.input_bits > 0 && ess.input_bits() != d.input_bits)
        throw std::invalid_argument("ess descriptor: max_energy admits " + std::to_string(ess.input_bits()) + " bits, not " +
                                    std::to_string(d.input_bits));
      return std::make_shared<Ess>(std::move(ess));
    }
    return std::make_shared<Ess>(Ess::for_input_bits(d.alphabet, d.block_length, d.input_bits));
  }
  if (d.type == "hidm") {
    auto hidm = Hidm::from_lists(d.alphabet, d.layer_output_lengths, d.layer_input_bits, d.layer_alphabet_orders);
    if (d.input_bits > 0 && hidm.input_bits() != d.input_bits)
      throw std::invalid_argument("hidm descriptor: layers consume " + std::to_string(hidm.input_bits()) + " bits, not " +
                                  std::to_string(d.input_bits));
    return std::make_shared<Hidm>(std::move(hidm));
  }
  throw std::invalid_argument("unknown DM type '" + d.type + "'");
}

inline std::vector<int> odd_alphabet(int size) {
  std::vector<int> a;
  for (int i = 0; i < size; ++i) a.push_back(2 * i + 1);
  return a;
}

/// Reference operating points at a nominal 1.3 bits/amplitude on {1,3,5,7}.
namespace reference {

inline CodecDescriptor sphere_shaping(int block_length = 256) {
  return {.type = "ess", .block_length = block_length, .input_bits = input_bits_for_rate(block_length, 1.3), .alphabet = odd_alphabet(4)};
}

inline CodecDescriptor constant_composition(int block_length = 1024) {
  return {.type = "ccdm", .block_length = block_length, .input_bits = input_bits_for_rate(block_length, 1.3), .alphabet = odd_alphabet(4)};
}

inline CodecDescriptor hierarchical(std::vector<int> input_bits = {6, 5, 4, 4, 4, 9}) {
  CodecDescriptor d{.type = "hidm", .alphabet = odd_alphabet(4)};
  d.layer_output_lengths = {8, 2, 2, 2, 2, 2};
  d.layer_input_bits = std::move(input_bits);
  d.layer_alphabet_orders = {4, 64, 64, 64, 64, 64};
  d.block_length = 256;
  return d;
}

/// Same layer shape with more input bits per lookup (rate about 1.34).
inline CodecDescriptor hierarchical_enlarged() { return hierarchical({7, 3, 5, 4, 3, 9}); }

}  // namespace reference
}  // namespace nlps::dm
