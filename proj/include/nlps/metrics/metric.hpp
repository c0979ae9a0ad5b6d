#pragma once

#include "nlps/common/parallel.hpp"
#include "nlps/shaping/symbol_sequence.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlps::metrics {

/// Selection metric lambda(x): lower is better. The seed drives any internal
/// randomness (neighbor blocks, sign draws) so that callers control common
/// random numbers across candidates.
class SequenceMetric {
 public:
  virtual ~SequenceMetric() = default;
  virtual double operator()(const SymbolSequence& x, std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
  /// False when the value depends on amplitudes only.
  virtual bool sign_dependent() const { return true; }
};

using MetricPtr = std::shared_ptr<const SequenceMetric>;

/// Evaluates every candidate with the same seed. A candidate whose evaluation
/// throws or yields NaN gets +inf (disqualified) rather than aborting the batch.
inline std::vector<double> evaluate_all(const SequenceMetric& metric, const std::vector<SymbolSequence>& candidates,
                                        std::uint64_t seed) {
  std::vector<double> values(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    double v;
    try {
      v = metric(candidates[i], seed);
    } catch (const std::exception&) {
      v = std::numeric_limits<double>::infinity();
    }
    values[i] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  });
  return values;
}

/// Index of the smallest value; ties go to the lowest index.
inline std::size_t argmin(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("argmin of an empty candidate set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  if (!(values[best] < std::numeric_limits<double>::infinity())) throw std::runtime_error("every candidate was disqualified by the metric");
  return best;
}

}  // namespace nlps::metrics
