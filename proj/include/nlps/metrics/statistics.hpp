#pragma once

#include "nlps/metrics/metric.hpp"

#include <numeric>

namespace nlps::metrics {

/// Energy dispersion index: variance-to-mean ratio of the sums of W
/// consecutive 4D symbol energies over all W-windows.
inline double edi(std::span<const double> energies, int window) {
  if (window < 1) throw std::invalid_argument("edi: window must be at least 1");
  if (static_cast<std::size_t>(window) > energies.size()) throw std::invalid_argument("edi: window longer than the sequence");
  const auto w = static_cast<std::size_t>(window);
  std::vector<double> sums;
  sums.reserve(energies.size() - w + 1);
  double s = std::accumulate(energies.begin(), energies.begin() + static_cast<long>(w), 0.0);
  sums.push_back(s);
  for (std::size_t i = w; i < energies.size(); ++i) {
    s += energies[i] - energies[i - w];
    sums.push_back(s);
  }
  double mean = 0.0;
  for (double v : sums) mean += v;
  mean /= static_cast<double>(sums.size());
  if (mean <= 0.0) throw std::invalid_argument("edi: zero-energy sequence");
  double var = 0.0;
  for (double v : sums) var += (v - mean) * (v - mean);
  var /= static_cast<double>(sums.size());
  return var / mean;
}

inline double edi(const SymbolSequence& x, int window) {
  const auto e = x.symbol_energies();
  return edi(e, window);
}

/// E|x|^4 / (E|x|^2)^2 over 2D symbols.
inline double kurtosis(std::span<const Complex> points) {
  double m2 = 0.0, m4 = 0.0;
  for (const auto& p : points) {
    const double e = std::norm(p);
    m2 += e;
    m4 += e * e;
  }
  if (points.empty() || m2 == 0.0) throw std::invalid_argument("kurtosis: zero-power sequence");
  const double n = static_cast<double>(points.size());
  return (m4 / n) / ((m2 / n) * (m2 / n));
}

inline double kurtosis(const SymbolSequence& x) {
  auto pts = x.polarization(0);
  const auto y = x.polarization(1);
  pts.insert(pts.end(), y.begin(), y.end());
  return kurtosis(pts);
}

class EdiMetric final : public SequenceMetric {
 public:
  explicit EdiMetric(int window) : window_(window) {}
  double operator()(const SymbolSequence& x, std::uint64_t) const override { return edi(x, window_); }
  std::string name() const override { return "edi"; }
  bool sign_dependent() const override { return false; }

 private:
  int window_;
};

class KurtosisMetric final : public SequenceMetric {
 public:
  double operator()(const SymbolSequence& x, std::uint64_t) const override { return kurtosis(x); }
  std::string name() const override { return "kurtosis"; }
  bool sign_dependent() const override { return false; }
};

}  // namespace nlps::metrics
