#pragma once

#include "nlps/channel/receiver.hpp"
#include "nlps/common/random.hpp"
#include "nlps/metrics/metric.hpp"

#include <functional>
#include <mutex>
#include <numeric>

namespace nlps::metrics {

/// Noiseless single-channel link used to score candidate sequences.
struct MetricContext {
  channel::LinkConfig link;
  channel::WdmGrid grid;  ///< only symbol rate, rolloff and power are used
  int sps = 2;
  int n_avg = 8;
  int n_s = 16;
  int half_window = 140;
  /// Mean 2D energy that maps to the launch power (fixed scale, so a
  /// candidate's own energy reaches the fiber).
  double reference_energy = 0.0;

  void validate() const {
    link.validate();
    if (n_avg < 1) throw ConfigError("metric.n_avg must be at least 1");
    if (n_s < 1) throw ConfigError("metric.n_s must be at least 1");
    if (half_window < 0) throw ConfigError("metric.window must be nonnegative");
    if (sps < 2) throw ConfigError("metric.sps must be at least 2");
  }
};

/// Draws a random block adjacent to the tested one.
using NeighborSource = std::function<SymbolSequence(Rng&)>;

/// Average NLI: the candidate is embedded between random neighbor blocks,
/// propagated through the noiseless link, received, rescaled by the
/// least-squares gain of its own block, and scored by the mean squared symbol
/// error normalized to the reference energy. Averaged over n_avg neighbor draws.
/// The CPR-aware variant first removes, per symbol, the mean nonlinear phase
/// over the surrounding 2 half_window + 1 symbols of the tested block.
class NliMetric : public SequenceMetric {
 public:
  enum class Mode { kPlain, kCprAware };

  NliMetric(MetricContext ctx, NeighborSource neighbors, Mode mode = Mode::kPlain)
      : ctx_(std::move(ctx)), neighbors_(std::move(neighbors)), mode_(mode) {
    ctx_.validate();
    ctx_.link.ase = false;
    ctx_.grid.channels = 1;
    if (!(ctx_.reference_energy > 0.0)) throw ConfigError("metric reference energy must be positive");
  }

  double operator()(const SymbolSequence& x, std::uint64_t seed) const override {
    double total = 0.0;
    for (int a = 0; a < ctx_.n_avg; ++a) total += single_draw(x, derive_seed(seed, "neighbors", static_cast<std::uint64_t>(a)));
    return total / ctx_.n_avg;
  }

  /// Cost for one neighbor draw.
  double single_draw(const SymbolSequence& x, std::uint64_t seed) const {
    Rng rng(seed);
    const auto pre = neighbors_(rng), post = neighbors_(rng);
    const std::size_t n = x.size(), lead = pre.size(), total = lead + n + post.size();
    channel::ChannelSymbols tx;
    for (const auto* block : {&pre, &x, &post}) {
      const auto px = block->polarization(0), py = block->polarization(1);
      tx.x.insert(tx.x.end(), px.begin(), px.end());
      tx.y.insert(tx.y.end(), py.begin(), py.end());
    }
    auto field = channel::wdm_modulate({tx}, ctx_.grid, ctx_.sps, ctx_.reference_energy);
    const auto current = plan(total);
    const auto& [prop, rx] = *current;
    prop->propagate(field, false, 0);

    double err = 0.0;
    for (int pol = 0; pol < 2; ++pol) {
      auto y = rx->demodulate(pol == 0 ? field.x : field.y, 0);
      const auto& ref = pol == 0 ? tx.x : tx.y;
      const std::span<const Complex> yc(y.data() + lead, n), xc(ref.data() + lead, n);
      const Complex h = channel::ls_gain(yc, xc);
      for (auto& v : y) v /= h;
      if (mode_ == Mode::kCprAware) derotate(y, ref, lead, n);
      for (std::size_t i = lead; i < lead + n; ++i) err += std::norm(y[i] - ref[i]);
    }
    return err / (2.0 * static_cast<double>(n) * ctx_.reference_energy);
  }

  std::string name() const override { return mode_ == Mode::kPlain ? "avg-nli" : "avg-nli-cpr"; }
  const MetricContext& context() const { return ctx_; }

 private:
  using Plan = std::pair<std::shared_ptr<const channel::SsfmPropagator>, std::shared_ptr<const channel::Receiver>>;

  struct PlanCache {
    std::mutex mutex;
    std::shared_ptr<const Plan> plan;
    std::size_t symbols = 0;
  };

  std::shared_ptr<const Plan> plan(std::size_t symbols) const {
    std::lock_guard lock(cache_->mutex);
    if (!cache_->plan || cache_->symbols != symbols) {
      const std::size_t samples = symbols * static_cast<std::size_t>(ctx_.sps);
      cache_->plan = std::make_shared<const Plan>(
          std::make_shared<channel::SsfmPropagator>(ctx_.link, samples, ctx_.grid.symbol_rate_thz() * ctx_.sps),
          std::make_shared<channel::Receiver>(ctx_.link, ctx_.grid, ctx_.sps, symbols));
      cache_->symbols = symbols;
    }
    return cache_->plan;
  }

  /// Removes from each tested symbol the phase of the mean of y conj(x) over
  /// its window, truncated at the edges of the tested block.
  void derotate(std::vector<Complex>& y, const std::vector<Complex>& x, std::size_t lead, std::size_t n) const {
    std::vector<Complex> prefix(n + 1, Complex{});
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[lead + i] * std::conj(x[lead + i]);
    const auto hw = static_cast<std::size_t>(ctx_.half_window);
    std::vector<Complex> out(y);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= hw ? i - hw : 0, hi = std::min(n, i + hw + 1);
      out[lead + i] = y[lead + i] * std::polar(1.0, -std::arg(prefix[hi] - prefix[lo]));
    }
    y.swap(out);
  }

  MetricContext ctx_;
  NeighborSource neighbors_;
  Mode mode_;
  std::shared_ptr<PlanCache> cache_ = std::make_shared<PlanCache>();
};

/// Mean of an inner metric over random redraws of the candidate's signs, so
/// only its amplitudes matter.
class SignAveragedMetric : public SequenceMetric {
 public:
  SignAveragedMetric(MetricPtr inner, int draws) : inner_(std::move(inner)), draws_(draws) {
    if (draws_ < 1) throw ConfigError("metric.n_s must be at least 1");
  }

  double operator()(const SymbolSequence& x, std::uint64_t seed) const override {
    std::vector<std::vector<std::int8_t>> signs(static_cast<std::size_t>(draws_));
    for (std::size_t s = 0; s < signs.size(); ++s) {
      Rng rng(derive_seed(seed, "sign-pattern", static_cast<std::uint64_t>(s)));
      const auto bits = random_bits(x.signs.size(), rng);
      signs[s].resize(bits.size());
      for (std::size_t i = 0; i < bits.size(); ++i) signs[s][i] = bits[i] ? std::int8_t{1} : std::int8_t{-1};
    }
    return average(x, signs, seed);
  }

  /// Average over the given sign patterns; draw s uses inner seed derive_seed(seed, "sign-draw", s).
  double average(const SymbolSequence& x, const std::vector<std::vector<std::int8_t>>& patterns, std::uint64_t seed) const {
    if (patterns.empty()) throw std::invalid_argument("sign averaging needs at least one pattern");
    double total = 0.0;
    SymbolSequence v = x;
    for (std::size_t s = 0; s < patterns.size(); ++s) {
      if (patterns[s].size() != x.signs.size()) throw std::invalid_argument("sign pattern length mismatch");
      v.signs = patterns[s];
      total += (*inner_)(v, derive_seed(seed, "sign-draw", static_cast<std::uint64_t>(s)));
    }
    return total / static_cast<double>(patterns.size());
  }

  std::string name() const override { return inner_->name() + "-sign-averaged"; }
  bool sign_dependent() const override { return false; }

 private:
  MetricPtr inner_;
  int draws_;
};

}  // namespace nlps::metrics
