#pragma once

#include "nlps/shaping/constellation.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <stdexcept>
#include <vector>

namespace nlps {

/// Slots of a dual-polarization 4D symbol, in storage order.
enum Slot : int { kXI = 0, kXQ = 1, kYI = 2, kYQ = 3 };
inline constexpr int kSlotsPer4D = 4;

/// n dual-polarization 4D symbols stored as 4n amplitudes and 4n signs in
/// slot order (X-I, X-Q, Y-I, Y-Q). Points stay on the odd-integer grid; launch
/// power scaling happens at the modulator.
struct SymbolSequence {
  std::vector<int> amplitudes;
  std::vector<std::int8_t> signs;

  std::size_t size() const noexcept { return amplitudes.size() / kSlotsPer4D; }
  bool empty() const noexcept { return amplitudes.empty(); }

  Complex point(std::size_t symbol, int pol) const {
    const std::size_t base = kSlotsPer4D * symbol + 2 * static_cast<std::size_t>(pol);
    return {static_cast<double>(signs[base] * amplitudes[base]), static_cast<double>(signs[base + 1] * amplitudes[base + 1])};
  }

  /// 2D points of one polarization (0 = X, 1 = Y).
  std::vector<Complex> polarization(int pol) const {
    std::vector<Complex> out(size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = point(k, pol);
    return out;
  }

  /// Energy |x|^2 + |y|^2 of each 4D symbol.
  std::vector<double> symbol_energies() const {
    std::vector<double> e(size(), 0.0);
    for (std::size_t i = 0; i < amplitudes.size(); ++i) e[i / kSlotsPer4D] += static_cast<double>(amplitudes[i]) * amplitudes[i];
    return e;
  }

  double mean_energy_2d() const {
    if (empty()) return 0.0;
    double s = 0.0;
    for (int a : amplitudes) s += static_cast<double>(a) * a;
    return s / (2.0 * static_cast<double>(size()));
  }

  friend bool operator==(const SymbolSequence&, const SymbolSequence&) = default;
};

inline SymbolSequence assemble_4d(std::span<const int> amplitudes, std::span<const std::int8_t> signs,
                                  std::span<const int> alphabet) {
  if (amplitudes.size() != signs.size()) throw std::invalid_argument("assemble_4d: amplitude/sign length mismatch");
  if (amplitudes.size() % kSlotsPer4D != 0) throw std::invalid_argument("assemble_4d: length must be a multiple of 4");
  for (int a : amplitudes)
    if (std::find(alphabet.begin(), alphabet.end(), a) == alphabet.end())
      throw std::invalid_argument("assemble_4d: amplitude " + std::to_string(a) + " not in alphabet");
  for (auto s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("assemble_4d: signs must be +1 or -1");
  return {{amplitudes.begin(), amplitudes.end()}, {signs.begin(), signs.end()}};
}

inline std::pair<std::vector<int>, std::vector<std::int8_t>> decompose_4d(const SymbolSequence& seq) {
  return {seq.amplitudes, seq.signs};
}

/// Builds a sequence from per-polarization 2D grid points.
inline SymbolSequence from_points(std::span<const Complex> x_pol, std::span<const Complex> y_pol) {
  if (x_pol.size() != y_pol.size()) throw std::invalid_argument("from_points: polarization length mismatch");
  SymbolSequence seq;
  seq.amplitudes.resize(kSlotsPer4D * x_pol.size());
  seq.signs.resize(kSlotsPer4D * x_pol.size());
  auto put = [&](std::size_t slot, double v) {
    const int iv = static_cast<int>(v);
    seq.amplitudes[slot] = iv < 0 ? -iv : iv;
    seq.signs[slot] = iv < 0 ? std::int8_t{-1} : std::int8_t{1};
  };
  for (std::size_t k = 0; k < x_pol.size(); ++k) {
    put(4 * k + kXI, x_pol[k].real());
    put(4 * k + kXQ, x_pol[k].imag());
    put(4 * k + kYI, y_pol[k].real());
    put(4 * k + kYQ, y_pol[k].imag());
  }
  return seq;
}

}  // namespace nlps
