#pragma once

#include "nlps/dm/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlps::dm {

/// Enumerative sphere shaping over the full energy sphere
/// { a in A^N : sum a_i^2 <= E_max }, indexed in lexicographic order (smaller
/// amplitudes first). Codewords are the first 2^k sequences of that order.
///
/// Energies are handled in reduced units e'(a) = (a^2 - min a^2) / g with g the
/// gcd of the energy differences, which keeps the trellis dense (g = 8 for odd
/// amplitudes).
class Ess final : public DistributionMatcher {
 public:
  /// Sphere with a given bound; k = floor(log2 |sphere|).
  static Ess with_max_energy(std::vector<int> alphabet, int block_length, long long max_energy) {
    Ess ess(std::move(alphabet), block_length);
    const long long min_total = ess.min_energy_ * block_length;
    if (max_energy < min_total) throw std::invalid_argument("Ess: energy bound below the minimum sequence energy");
    const long long budget = std::min<long long>((max_energy - min_total) / ess.step_, ess.max_budget());
    ess.build_table(budget);
    ess.budget_ = budget;
    ess.k_ = static_cast<int>(floor_log2(ess.table_[0][static_cast<std::size_t>(budget)]));
    return ess;
  }

  /// Smallest sphere that holds at least 2^k sequences.
  static Ess for_input_bits(std::vector<int> alphabet, int block_length, int input_bits) {
    Ess ess(std::move(alphabet), block_length);
    if (input_bits < 0) throw std::invalid_argument("Ess: negative input bits");
    const BigInt needed = BigInt(1) << input_bits;
    long long guess = std::max<long long>(16, block_length / 2);
    for (;;) {
      guess = std::min(guess, ess.max_budget());
      ess.build_table(guess);
      if (ess.table_[0][static_cast<std::size_t>(guess)] >= needed) break;
      if (guess == ess.max_budget())
        throw std::invalid_argument("Ess: " + std::to_string(input_bits) + " bits infeasible for N=" + std::to_string(block_length));
      guess *= 2;
    }
    const auto& row0 = ess.table_[0];
    const auto it = std::find_if(row0.begin(), row0.end(), [&](const BigInt& c) { return c >= needed; });
    ess.budget_ = it - row0.begin();
    for (auto& row : ess.table_) row.resize(static_cast<std::size_t>(ess.budget_) + 1);
    ess.k_ = input_bits;
    return ess;
  }

  int block_length() const override { return length_; }
  int input_bits() const override { return k_; }
  std::span<const int> alphabet() const override { return alphabet_; }

  long long max_energy() const { return min_energy_ * length_ + step_ * budget_; }
  /// Number of admissible sequences in the sphere.
  const BigInt& sphere_size() const { return table_[0][static_cast<std::size_t>(budget_)]; }

  std::vector<int> encode(std::span<const std::uint8_t> bits) const override {
    if (static_cast<int>(bits.size()) != k_) throw std::invalid_argument("Ess::encode: expected " + std::to_string(k_) + " bits");
    return unrank(bits_to_bigint(bits));
  }

  Bits decode(std::span<const int> amplitudes) const override {
    const BigInt index = rank(amplitudes);
    if (index >= (BigInt(1) << k_)) throw std::invalid_argument("Ess::decode: sequence is not a codeword");
    return bigint_to_bits(index, static_cast<std::size_t>(k_));
  }

  std::vector<int> unrank(BigInt index) const {
    if (index < 0 || index >= sphere_size()) throw std::out_of_range("Ess::unrank: index out of range");
    std::vector<int> out(static_cast<std::size_t>(length_));
    long long b = budget_;
    for (int pos = 0; pos < length_; ++pos) {
      for (std::size_t a = 0; a < alphabet_.size(); ++a) {
        const long long rest = b - reduced_[a];
        if (rest < 0) break;
        const BigInt& c = table_[static_cast<std::size_t>(pos) + 1][static_cast<std::size_t>(rest)];
        if (index < c) {
          out[static_cast<std::size_t>(pos)] = alphabet_[a];
          b = rest;
          break;
        }
        index -= c;
      }
    }
    return out;
  }

  BigInt rank(std::span<const int> amplitudes) const {
    if (static_cast<int>(amplitudes.size()) != length_) throw std::invalid_argument("Ess::rank: wrong block length");
    BigInt index = 0;
    long long b = budget_;
    for (int pos = 0; pos < length_; ++pos) {
      const auto sym = static_cast<std::size_t>(detail::alphabet_index(alphabet_, amplitudes[static_cast<std::size_t>(pos)]));
      for (std::size_t a = 0; a < sym; ++a) {
        const long long rest = b - reduced_[a];
        if (rest < 0) break;
        index += table_[static_cast<std::size_t>(pos) + 1][static_cast<std::size_t>(rest)];
      }
      b -= reduced_[sym];
      if (b < 0) throw std::invalid_argument("Ess::rank: sequence violates the energy bound");
    }
    return index;
  }

  /// Exact codeword-set marginal, accumulated in long double (the counts exceed
  /// double range for long blocks; only the ratios matter here).
  std::vector<double> induced_distribution() const override {
    const std::size_t K = alphabet_.size();
    const auto B = static_cast<std::size_t>(budget_);
    const auto N = static_cast<std::size_t>(length_);
    // occ[i][b*K + a]: occurrences of symbol a in all admissible suffixes from (i, b)
    std::vector<std::vector<long double>> occ(N + 1, std::vector<long double>((B + 1) * K, 0.0L));
    for (std::size_t i = N; i-- > 0;) {
      for (std::size_t b = 0; b <= B; ++b) {
        for (std::size_t a = 0; a < K; ++a) {
          const long long rest = static_cast<long long>(b) - reduced_[a];
          if (rest < 0) break;
          const auto r = static_cast<std::size_t>(rest);
          const long double cnt = to_ld(table_[i + 1][r]);
          for (std::size_t s = 0; s < K; ++s) occ[i][b * K + s] += occ[i + 1][r * K + s];
          occ[i][b * K + a] += cnt;
        }
      }
    }
    std::vector<long double> total(K, 0.0L);
    std::vector<long double> prefix(K, 0.0L);
    BigInt remaining = BigInt(1) << k_;
    long long b = budget_;
    for (std::size_t pos = 0; pos < N && remaining > 0; ++pos) {
      for (std::size_t a = 0; a < K; ++a) {
        const long long rest = b - reduced_[a];
        if (rest < 0) break;
        const auto r = static_cast<std::size_t>(rest);
        const BigInt& c = table_[pos + 1][r];
        if (remaining >= c) {
          const long double cl = to_ld(c);
          for (std::size_t s = 0; s < K; ++s) total[s] += prefix[s] * cl + occ[pos + 1][r * K + s];
          total[a] += cl;
          remaining -= c;
        } else {
          prefix[a] += 1.0L;
          b = rest;
          break;
        }
      }
    }
    long double sum = 0.0L;
    for (auto v : total) sum += v;
    std::vector<double> p(K);
    for (std::size_t a = 0; a < K; ++a) p[a] = static_cast<double>(total[a] / sum);
    return p;
  }

  CodecDescriptor descriptor() const override {
    CodecDescriptor d;
    d.type = "ess";
    d.block_length = length_;
    d.input_bits = k_;
    d.alphabet = alphabet_;
    d.max_energy = max_energy();
    return d;
  }

 private:
  Ess(std::vector<int> alphabet, int block_length) : alphabet_(std::move(alphabet)), length_(block_length) {
    detail::check_alphabet(alphabet_);
    if (block_length <= 0) throw std::invalid_argument("Ess: block length must be positive");
    if (alphabet_.front() <= 0) throw std::invalid_argument("Ess: amplitudes must be positive");
    min_energy_ = static_cast<long long>(alphabet_.front()) * alphabet_.front();
    long long g = 0;
    for (int a : alphabet_) g = std::gcd(g, static_cast<long long>(a) * a - min_energy_);
    step_ = g == 0 ? 1 : g;
    for (int a : alphabet_) reduced_.push_back((static_cast<long long>(a) * a - min_energy_) / step_);
  }

  long long max_budget() const { return reduced_.back() * length_; }

  void build_table(long long budget) {
    const auto B = static_cast<std::size_t>(budget);
    table_.assign(static_cast<std::size_t>(length_) + 1, std::vector<BigInt>(B + 1));
    std::fill(table_.back().begin(), table_.back().end(), BigInt(1));
    for (std::size_t i = static_cast<std::size_t>(length_); i-- > 0;) {
      for (std::size_t b = 0; b <= B; ++b) {
        BigInt acc = 0;
        for (long long e : reduced_) {
          if (e > static_cast<long long>(b)) break;
          acc += table_[i + 1][b - static_cast<std::size_t>(e)];
        }
        table_[i][b] = std::move(acc);
      }
    }
  }

  static long double to_ld(const BigInt& v) {
    // cpp_int -> long double via the top 64 bits and an exponent, exact enough
    const std::size_t bits = msb_or_zero(v);
    if (bits <= 64) return static_cast<long double>(static_cast<unsigned long long>(v));
    const unsigned shift = static_cast<unsigned>(bits - 64);
    const auto top = static_cast<unsigned long long>(v >> shift);
    return std::ldexp(static_cast<long double>(top), static_cast<int>(shift));
  }

  std::vector<int> alphabet_;
  int length_ = 0;
  int k_ = 0;
  long long min_energy_ = 0;
  long long step_ = 1;
  long long budget_ = 0;
  std::vector<long long> reduced_;
  std::vector<std::vector<BigInt>> table_;  ///< table_[i][b]: admissible suffixes of length N-i with reduced energy <= b
};

}  // namespace nlps::dm
