#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlps {

struct MbDistribution {
  double lambda = 0.0;
  std::vector<double> pmf;  ///< one entry per alphabet element, same order as the energies
  double mean_energy = 0.0;
};

inline double entropy_bits(std::span<const double> pmf) {
  double h = 0.0;
  for (double p : pmf)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

/// pmf(s) proportional to exp(-lambda * energy(s)).
inline MbDistribution mb_pmf(double lambda, std::span<const double> energies) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("mb_pmf: lambda must be nonnegative");
  if (energies.empty()) throw std::invalid_argument("mb_pmf: empty alphabet");
  const double e_min = *std::min_element(energies.begin(), energies.end());
  MbDistribution d;
  d.lambda = lambda;
  d.pmf.resize(energies.size());
  double z = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    d.pmf[i] = std::exp(-lambda * (energies[i] - e_min));
    z += d.pmf[i];
  }
  for (std::size_t i = 0; i < energies.size(); ++i) {
    d.pmf[i] /= z;
    d.mean_energy += d.pmf[i] * energies[i];
  }
  return d;
}

/// Energies a^2 of a PAM amplitude alphabet.
inline std::vector<double> amplitude_energies(std::span<const int> alphabet) {
  std::vector<double> e;
  e.reserve(alphabet.size());
  for (int a : alphabet) e.push_back(static_cast<double>(a) * a);
  return e;
}

struct LambdaSolution {
  double lambda = 0.0;
  bool saturated = false;  ///< target below H(lambda_max); lambda clamped to the bracket
};

inline constexpr double kLambdaMax = 50.0;
inline constexpr double kEntropyTolerance = 1e-9;

/// Bisection on the strictly decreasing H(lambda) over [0, kLambdaMax].
inline LambdaSolution solve_lambda_for_entropy(double target_bits, std::span<const double> energies) {
  if (energies.empty()) throw std::invalid_argument("solve_lambda_for_entropy: empty alphabet");
  const double h_max = std::log2(static_cast<double>(energies.size()));
  if (!(target_bits > 0.0) || target_bits > h_max + 1e-12)
    throw std::invalid_argument("solve_lambda_for_entropy: target entropy out of (0, log2|alphabet|]");
  const auto h = [&](double l) {
    auto d = mb_pmf(l, energies);
    return entropy_bits(d.pmf);
  };
  if (target_bits >= h_max - kEntropyTolerance) return {0.0, false};
  // Targets the bracket cannot resolve from H(lambda_max) are clamped.
  if (target_bits <= h(kLambdaMax) + kEntropyTolerance) return {kLambdaMax, true};
  double lo = 0.0, hi = kLambdaMax;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (std::abs(hm - target_bits) <= kEntropyTolerance * 1e-3) return {mid, false};
    (hm > target_bits ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), false};
}

}  // namespace nlps
