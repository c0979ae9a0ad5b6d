#pragma once

#include "nlps/framing/sources.hpp"
#include "nlps/metrics/metric.hpp"

#include <cmath>
#include <limits>

namespace nlps::framing {

enum class SignRegime {
  kShaped,           ///< metric sees signs, selection keeps them
  kUnshapedUnknown,  ///< metric is sign-independent, signs redrawn after acceptance
  kUnshapedKnown,    ///< signs fixed per output block, only amplitudes resampled
};

inline SignRegime parse_sign_regime(const std::string& s) {
  if (s == "shaped") return SignRegime::kShaped;
  if (s == "unshaped-unknown") return SignRegime::kUnshapedUnknown;
  if (s == "unshaped-known") return SignRegime::kUnshapedKnown;
  throw ConfigError("sign_regime must be shaped, unshaped-unknown or unshaped-known, got '" + s + "'");
}

inline std::string to_string(SignRegime r) {
  switch (r) {
    case SignRegime::kShaped: return "shaped";
    case SignRegime::kUnshapedUnknown: return "unshaped-unknown";
    case SignRegime::kUnshapedKnown: return "unshaped-known";
  }
  return "?";
}

struct SelectionStats {
  long long proposed = 0;
  long long accepted = 0;
  double threshold = std::numeric_limits<double>::infinity();

  double eta() const { return static_cast<double>(accepted) / static_cast<double>(proposed); }
  double candidates() const { return static_cast<double>(proposed) / static_cast<double>(accepted); }
  /// (1/n) log2(N_p / N_a) bits/4D.
  double penalty(int n) const {
    if (accepted <= 0) throw std::invalid_argument("selection penalty undefined with no accepted sequences");
    return std::log2(static_cast<double>(proposed) / static_cast<double>(accepted)) / n;
  }
};

/// Empirical eta-quantile: the smallest threshold accepting ceil(eta * C) of C values.
inline double quantile_threshold(std::vector<double> values, double eta) {
  if (values.empty()) throw std::invalid_argument("threshold calibration needs a non-empty batch");
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("target acceptance rate must lie in (0, 1]");
  if (eta == 1.0) return std::numeric_limits<double>::infinity();
  std::sort(values.begin(), values.end());
  const auto keep = static_cast<std::size_t>(std::ceil(eta * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(keep, 1) - 1];
}

/// Rejection-sampling selector: a proposal is accepted iff metric <= threshold.
/// Output block i draws proposals from its own seeded stream, so results do
/// not depend on thread scheduling.
class IdealSelector {
 public:
  static constexpr int kMinCalibrationBatch = 4096;

  IdealSelector(SourcePtr source, metrics::MetricPtr metric, SignRegime regime, std::uint64_t seed)
      : source_(std::move(source)), metric_(std::move(metric)), regime_(regime), seed_(seed) {
    if (!source_ || !metric_) throw ConfigError("ideal selection needs a source and a metric");
    if (regime_ == SignRegime::kUnshapedUnknown && metric_->sign_dependent())
      throw ConfigError("unshaped-unknown sign regime needs a sign-independent (sign-averaged) metric, got " + metric_->name());
  }

  /// Metric values of a calibration batch drawn like ordinary proposals.
  std::vector<double> calibration_values(int batch) const {
    if (batch <= 0) throw std::invalid_argument("threshold calibration needs a non-empty batch");
    std::vector<double> values(static_cast<std::size_t>(batch));
    parallel_for(values.size(), [&](std::size_t j) {
      Rng rng(derive_seed(seed_, "calibration", j));
      values[j] = (*metric_)(source_->draw(rng), derive_seed(seed_, "calibration-metric", j));
    });
    return values;
  }

  double calibrate(double eta, int batch = kMinCalibrationBatch) {
    threshold_ = quantile_threshold(calibration_values(batch), eta);
    return threshold_;
  }

  void set_threshold(double gamma) { threshold_ = gamma; }
  double threshold() const { return threshold_; }

  struct Result {
    std::vector<SymbolSequence> blocks;
    SelectionStats stats;
  };

  Result select(int count, long long max_proposals_per_block = 1LL << 24) const {
    std::vector<SymbolSequence> blocks(static_cast<std::size_t>(count));
    std::vector<long long> proposals(static_cast<std::size_t>(count), 0);
    parallel_for(blocks.size(), [&](std::size_t i) {
      Rng rng(derive_seed(seed_, "block", i));
      std::vector<std::int8_t> fixed_signs;
      if (regime_ == SignRegime::kUnshapedKnown) fixed_signs = random_signs(static_cast<std::size_t>(kSlotsPer4D * source_->n()), rng);
      for (long long j = 0;; ++j) {
        if (j >= max_proposals_per_block) throw std::runtime_error("ideal selection: no proposal accepted within the proposal cap");
        SymbolSequence x = source_->draw(rng);
        if (regime_ == SignRegime::kUnshapedKnown) x.signs = fixed_signs;
        const double v = (*metric_)(x, derive_seed(seed_, "metric", i, static_cast<std::uint64_t>(j)));
        if (v <= threshold_) {
          if (regime_ == SignRegime::kUnshapedUnknown) x.signs = random_signs(x.signs.size(), rng);
          blocks[i] = std::move(x);
          proposals[i] = j + 1;
          return;
        }
      }
    });
    Result r{std::move(blocks), {}};
    r.stats.accepted = count;
    for (auto p : proposals) r.stats.proposed += p;
    r.stats.threshold = threshold_;
    return r;
  }

  const SequenceSource& source() const { return *source_; }
  SignRegime regime() const { return regime_; }

 private:
  SourcePtr source_;
  metrics::MetricPtr metric_;
  SignRegime regime_;
  std::uint64_t seed_;
  double threshold_ = std::numeric_limits<double>::infinity();
};

}  // namespace nlps::framing
