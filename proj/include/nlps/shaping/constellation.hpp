#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlps {

using Complex = std::complex<double>;

/// Square M-QAM on the odd-integer grid with per-quadrature binary-reflected
/// Gray labels. The first m/2 label bits select the in-phase level, the last
/// m/2 the quadrature level; within a quadrature the leading bit is the sign
/// (1 = positive) and the remaining bits label the amplitude.
class Constellation {
 public:
  explicit Constellation(int order) : order_(order) {
    int m = 0;
    while ((1 << m) < order) ++m;
    if (order < 4 || (1 << m) != order || m % 2 != 0)
      throw std::invalid_argument("Constellation: order must be a power of 4, got " + std::to_string(order));
    bits_ = m;
    levels_ = 1 << (m / 2);
    for (int a = 1; a < levels_; a += 2) alphabet_.push_back(a);
    points_.resize(static_cast<std::size_t>(order));
    for (unsigned label = 0; label < static_cast<unsigned>(order); ++label) points_[label] = point(label);
  }

  int order() const noexcept { return order_; }
  int bits_per_symbol() const noexcept { return bits_; }
  int bits_per_quadrature() const noexcept { return bits_ / 2; }
  int levels_per_quadrature() const noexcept { return levels_; }

  /// Positive amplitudes {1, 3, ..., sqrt(M)-1}.
  std::span<const int> amplitude_alphabet() const noexcept { return alphabet_; }

  /// Points indexed by label.
  std::span<const Complex> points() const noexcept { return points_; }

  Complex point(unsigned label) const {
    if (label >= static_cast<unsigned>(order_)) throw std::out_of_range("Constellation::point: label out of range");
    const unsigned q_bits = static_cast<unsigned>(bits_ / 2);
    const unsigned mask = (1U << q_bits) - 1U;
    return {static_cast<double>(level_of((label >> q_bits) & mask)), static_cast<double>(level_of(label & mask))};
  }

  /// Label of a grid point; throws if the point is not on the grid.
  unsigned label(Complex p) const {
    const unsigned q_bits = static_cast<unsigned>(bits_ / 2);
    return (quadrature_label(p.real()) << q_bits) | quadrature_label(p.imag());
  }

  Complex map(std::span<const std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != bits_)
      throw std::invalid_argument("Constellation::map: expected " + std::to_string(bits_) + " bits");
    unsigned label = 0;
    for (auto b : bits) label = (label << 1) | (b & 1U);
    return point(label);
  }

  std::vector<std::uint8_t> demap(Complex p) const {
    const unsigned l = label(p);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(bits_));
    for (int i = 0; i < bits_; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((l >> (bits_ - 1 - i)) & 1U);
    return bits;
  }

  /// Gray label (bits_per_quadrature wide) of a signed PAM level.
  unsigned quadrature_label(double level) const {
    const int v = static_cast<int>(level);
    if (static_cast<double>(v) != level || (v % 2) == 0 || v <= -levels_ || v >= levels_)
      throw std::invalid_argument("Constellation: coordinate not on the odd-integer grid");
    const unsigned index = static_cast<unsigned>((v + levels_ - 1) / 2);
    return index ^ (index >> 1);
  }

  /// Amplitude label within a quadrature: the Gray label without the sign bit.
  unsigned amplitude_label(int amplitude) const {
    return quadrature_label(static_cast<double>(amplitude)) & ((1U << (bits_ / 2 - 1)) - 1U);
  }

  int amplitude_from_label(unsigned amp_label) const {
    const unsigned q_bits = static_cast<unsigned>(bits_ / 2);
    const int level = level_of((1U << (q_bits - 1)) | amp_label);
    return level;
  }

  /// Nearest grid point (hard decision), clamped to the constellation.
  Complex slice(Complex y) const { return {slice_level(y.real()), slice_level(y.imag())}; }

  double slice_level(double y) const noexcept {
    double v = 2.0 * std::floor(y / 2.0) + 1.0;
    if (v > levels_ - 1) v = levels_ - 1;
    if (v < -(levels_ - 1)) v = -(levels_ - 1);
    return v;
  }

  double mean_uniform_energy() const noexcept { return 2.0 * (static_cast<double>(levels_) * levels_ - 1.0) / 3.0; }

 private:
  int level_of(unsigned gray) const noexcept {
    unsigned index = gray;
    for (unsigned shift = 1; shift < 32; shift <<= 1) index ^= index >> shift;
    return 2 * static_cast<int>(index) - (levels_ - 1);
  }

  int order_;
  int bits_ = 0;
  int levels_ = 0;
  std::vector<int> alphabet_;
  std::vector<Complex> points_;
};

}  // namespace nlps
