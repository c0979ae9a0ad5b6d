#pragma once

#include "nlps/shaping/constellation.hpp"

#include <numbers>

namespace nlps::channel {

/// Blind phase search. For every symbol, each of n_angles test angles over
/// [0, pi/2) derotates the window of +-half_window symbols (truncated at the
/// edges); the angle with the smallest summed squared distance to the
/// nearest constellation points wins (ties: smallest angle). Estimates are
/// unwrapped across the pi/2 ambiguity, the first one taken in [-pi/4, pi/4).
/// Input is expected in grid units (after mean-phase/gain removal).
inline std::vector<double> bps_phase(std::span<const Complex> y, const Constellation& c, int n_angles = 64, int half_window = 140) {
  const std::size_t n = y.size();
  const auto b = static_cast<std::size_t>(n_angles);
  const double quantum = std::numbers::pi / 2.0 / n_angles;
  // prefix[i * b + a]: sum of distances of symbols [0, i) at angle a
  std::vector<double> prefix((n + 1) * b, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < b; ++a) {
      const Complex z = y[i] * std::polar(1.0, -quantum * static_cast<double>(a));
      prefix[(i + 1) * b + a] = prefix[i * b + a] + std::norm(z - c.slice(z));
    }
  std::vector<double> phase(n);
  const auto hw = static_cast<std::size_t>(half_window);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > hw ? i - hw : 0, hi = std::min(n, i + hw + 1);
    std::size_t best = 0;
    double best_cost = prefix[hi * b] - prefix[lo * b];
    for (std::size_t a = 1; a < b; ++a) {
      const double cost = prefix[hi * b + a] - prefix[lo * b + a];
      if (cost < best_cost) {
        best_cost = cost;
        best = a;
      }
    }
    double theta = quantum * static_cast<double>(best);
    if (i == 0) {
      if (theta >= std::numbers::pi / 4.0) theta -= std::numbers::pi / 2.0;
    } else {
      theta += std::numbers::pi / 2.0 * std::round((phase[i - 1] - theta) / (std::numbers::pi / 2.0));
    }
    phase[i] = theta;
  }
  return phase;
}

inline std::vector<Complex> bps_correct(std::span<const Complex> y, const Constellation& c, int n_angles = 64, int half_window = 140) {
  const auto phase = bps_phase(y, c, n_angles, half_window);
  std::vector<Complex> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = phase[i] == 0.0 ? y[i] : y[i] * std::polar(1.0, -phase[i]);
  return out;
}

}  // namespace nlps::channel
