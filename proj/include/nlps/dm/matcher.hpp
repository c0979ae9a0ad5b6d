#pragma once

#include "nlps/common/bits.hpp"
#include "nlps/shaping/maxwell_boltzmann.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nlps::dm {

/// Serializable construction parameters of a codec.
struct CodecDescriptor {
  std::string type;  ///< "ccdm", "ess", "hidm"
  int block_length = 0;
  int input_bits = 0;
  std::vector<int> alphabet;
  std::vector<int> composition;  ///< ccdm only
  long long max_energy = 0;      ///< ess only
  std::vector<int> layer_output_lengths, layer_input_bits, layer_alphabet_orders;  ///< hidm only

  friend bool operator==(const CodecDescriptor&, const CodecDescriptor&) = default;
};

/// Invertible fixed-to-fixed map between k uniform bits and N_DM amplitudes.
/// Implementations are immutable after construction; encode/decode are const
/// and safe to call concurrently.
class DistributionMatcher {
 public:
  virtual ~DistributionMatcher() = default;

  virtual int block_length() const = 0;
  virtual int input_bits() const = 0;
  virtual std::span<const int> alphabet() const = 0;

  virtual std::vector<int> encode(std::span<const std::uint8_t> bits) const = 0;
  virtual Bits decode(std::span<const int> amplitudes) const = 0;

  /// Amplitude marginal averaged over positions and over all 2^k codewords.
  virtual std::vector<double> induced_distribution() const = 0;

  virtual CodecDescriptor descriptor() const = 0;

  double rate() const { return static_cast<double>(input_bits()) / block_length(); }
};

/// H(P_induced) - k/N_DM in bits/amplitude.
inline double rate_loss(const DistributionMatcher& codec) {
  const auto p = codec.induced_distribution();
  return entropy_bits(p) - codec.rate();
}

/// k = round(target * N), the integer-ratio rate used at a nominal target.
inline int input_bits_for_rate(int block_length, double target_rate) {
  return static_cast<int>(std::lround(target_rate * block_length));
}

namespace detail {

inline int alphabet_index(std::span<const int> alphabet, int amplitude) {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == amplitude) return static_cast<int>(i);
  throw std::invalid_argument("amplitude " + std::to_string(amplitude) + " not in DM alphabet");
}

inline void check_alphabet(std::span<const int> alphabet) {
  if (alphabet.empty()) throw std::invalid_argument("DM alphabet is empty");
  for (std::size_t i = 1; i < alphabet.size(); ++i)
    if (alphabet[i] <= alphabet[i - 1]) throw std::invalid_argument("DM alphabet must be strictly increasing");
}

}  // namespace detail
}  // namespace nlps::dm
