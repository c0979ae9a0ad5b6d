#pragma once

#include "nlps/dm/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlps::dm {

/// Constant composition distribution matcher realized by exact enumerative
/// (combinatorial) ranking: the k input bits, read MSB first, are the index of
/// the codeword in the lexicographic order of all permutations of the
/// composition. Every codeword has exactly the constructed composition.
class Ccdm final : public DistributionMatcher {
 public:
  /// input_bits < 0 selects floor(log2(multinomial)).
  Ccdm(std::vector<int> alphabet, std::vector<int> composition, int input_bits = -1)
      : alphabet_(std::move(alphabet)), composition_(std::move(composition)) {
    detail::check_alphabet(alphabet_);
    if (composition_.size() != alphabet_.size()) throw std::invalid_argument("Ccdm: composition size must match alphabet");
    for (int c : composition_)
      if (c < 0) throw std::invalid_argument("Ccdm: negative composition count");
    length_ = std::accumulate(composition_.begin(), composition_.end(), 0);
    if (length_ <= 0) throw std::invalid_argument("Ccdm: empty composition");
    count_ = multinomial(composition_);
    const int max_bits = static_cast<int>(floor_log2(count_));
    k_ = input_bits < 0 ? max_bits : input_bits;
    if (k_ > max_bits)
      throw std::invalid_argument("Ccdm: " + std::to_string(k_) + " input bits exceed the composition's " +
                                  std::to_string(max_bits));
  }

  /// Composition with the lowest energy (quantized Maxwell-Boltzmann) whose
  /// multinomial still indexes 2^input_bits codewords.
  static Ccdm for_rate(std::vector<int> alphabet, int block_length, int input_bits) {
    const auto energies = amplitude_energies(alphabet);
    const auto feasible = [&](const std::vector<int>& comp) { return floor_log2(multinomial(comp)) >= static_cast<std::size_t>(input_bits); };
    double lo = 0.0, hi = kLambdaMax;
    if (!feasible(quantize(mb_pmf(0.0, energies).pmf, block_length)))
      throw std::invalid_argument("Ccdm::for_rate: rate not achievable with this block length");
    for (int iter = 0; iter < 60; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (approx_log2_multinomial(quantize(mb_pmf(mid, energies).pmf, block_length)) >= input_bits ? lo : hi) = mid;
    }
    auto comp = quantize(mb_pmf(lo, energies).pmf, block_length);
    for (double l = lo; !feasible(comp); l *= 0.999) comp = quantize(mb_pmf(l, energies).pmf, block_length);
    return Ccdm(std::move(alphabet), std::move(comp), input_bits);
  }

  int block_length() const override { return length_; }
  int input_bits() const override { return k_; }
  std::span<const int> alphabet() const override { return alphabet_; }
  std::span<const int> composition() const { return composition_; }
  const BigInt& codeword_count() const { return count_; }

  std::vector<int> encode(std::span<const std::uint8_t> bits) const override {
    if (static_cast<int>(bits.size()) != k_) throw std::invalid_argument("Ccdm::encode: expected " + std::to_string(k_) + " bits");
    return unrank(bits_to_bigint(bits));
  }

  Bits decode(std::span<const int> amplitudes) const override {
    return bigint_to_bits(rank(amplitudes), static_cast<std::size_t>(k_));
  }

  /// Codeword with lexicographic index `index` among all permutations.
  std::vector<int> unrank(BigInt index) const {
    if (index < 0 || index >= count_) throw std::out_of_range("Ccdm::unrank: index out of range");
    std::vector<int> remaining = composition_;
    std::vector<int> out(static_cast<std::size_t>(length_));
    BigInt current = count_;
    for (int pos = 0, left = length_; pos < length_; ++pos, --left) {
      for (std::size_t a = 0; a < remaining.size(); ++a) {
        if (remaining[a] == 0) continue;
        BigInt sub = current * remaining[a] / left;
        if (index < sub) {
          out[static_cast<std::size_t>(pos)] = alphabet_[a];
          --remaining[a];
          current = std::move(sub);
          break;
        }
        index -= sub;
      }
    }
    return out;
  }

  BigInt rank(std::span<const int> amplitudes) const {
    if (static_cast<int>(amplitudes.size()) != length_) throw std::invalid_argument("Ccdm::rank: wrong block length");
    std::vector<int> remaining = composition_;
    BigInt current = count_;
    BigInt index = 0;
    for (int pos = 0, left = length_; pos < length_; ++pos, --left) {
      const auto sym = static_cast<std::size_t>(detail::alphabet_index(alphabet_, amplitudes[static_cast<std::size_t>(pos)]));
      if (remaining[sym] == 0) throw std::invalid_argument("Ccdm::rank: sequence violates the composition");
      for (std::size_t a = 0; a < sym; ++a)
        if (remaining[a] > 0) index += current * remaining[a] / left;
      current = current * remaining[sym] / left;
      --remaining[sym];
    }
    return index;
  }

  std::vector<double> induced_distribution() const override {
    std::vector<double> p(composition_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(composition_[i]) / length_;
    return p;
  }

  CodecDescriptor descriptor() const override {
    CodecDescriptor d;
    d.type = "ccdm";
    d.block_length = length_;
    d.input_bits = k_;
    d.alphabet = alphabet_;
    d.composition = composition_;
    return d;
  }

  static BigInt multinomial(std::span<const int> composition) {
    BigInt result = 1;
    long long total = 0;
    for (int c : composition) {
      // result *= C(total + c, c), built incrementally so every step is exact
      for (int j = 1; j <= c; ++j) {
        result *= total + j;
        result /= j;
      }
      total += c;
    }
    return result;
  }

 private:
  static double approx_log2_multinomial(const std::vector<int>& comp) {
    double total = 0.0, v = 0.0;
    for (int c : comp) {
      v -= std::lgamma(c + 1.0);
      total += c;
    }
    return (v + std::lgamma(total + 1.0)) / std::log(2.0);
  }

  /// Largest-remainder quantization of N * pmf to integer counts summing to N.
  static std::vector<int> quantize(const std::vector<double>& pmf, int n) {
    std::vector<int> counts(pmf.size());
    std::vector<std::pair<double, std::size_t>> rem;
    int used = 0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      const double exact = pmf[i] * n;
      counts[i] = static_cast<int>(std::floor(exact));
      used += counts[i];
      rem.emplace_back(exact - counts[i], i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (int i = 0; i < n - used; ++i) ++counts[rem[static_cast<std::size_t>(i)].second];
    return counts;
  }

  std::vector<int> alphabet_;
  std::vector<int> composition_;
  int length_ = 0;
  int k_ = 0;
  BigInt count_;
};

}  // namespace nlps::dm
