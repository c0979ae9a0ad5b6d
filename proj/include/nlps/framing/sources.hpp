#pragma once

#include "nlps/framing/pas_frame.hpp"
#include "nlps/shaping/maxwell_boltzmann.hpp"

#include <memory>
#include <random>

namespace nlps::framing {

/// Unbiased block source p_u(x): i.i.d. blocks of n 4D symbols.
class SequenceSource {
 public:
  virtual ~SequenceSource() = default;
  virtual SymbolSequence draw(Rng& rng) const = 0;
  /// Per-amplitude marginal the receiver assumes (the unbiased source's).
  virtual std::vector<double> amplitude_prior() const = 0;
  /// Information carried per amplitude by the unbiased source (k/N for a DM, H for i.i.d.).
  virtual double amplitude_rate() const = 0;
  virtual int n() const = 0;
  virtual int order() const = 0;
  virtual std::string name() const = 0;

  /// H(prior) - amplitude_rate, the DM rate loss in bits/amplitude.
  double rate_loss() const {
    const auto p = amplitude_prior();
    return entropy_bits(p) - amplitude_rate();
  }
  /// Information rate of the unbiased source in bits/4D (4 amplitudes + 4 uniform signs).
  double rate_4d() const { return 4.0 * (amplitude_rate() + 1.0); }
  /// Mean 2D energy under the prior, used as the nominal power reference.
  double nominal_energy_2d() const {
    const auto p = amplitude_prior();
    const Constellation c(order());
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * c.amplitude_alphabet()[i] * c.amplitude_alphabet()[i];
    return 2.0 * e;
  }
};

using SourcePtr = std::shared_ptr<const SequenceSource>;

inline std::vector<std::int8_t> random_signs(std::size_t count, Rng& rng) {
  const auto bits = random_bits(count, rng);
  std::vector<std::int8_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = sign_of_bit(bits[i]);
  return s;
}

/// i.i.d. amplitudes from a fixed pmf with uniform signs (uniform QAM or MB).
class IidSource final : public SequenceSource {
 public:
  IidSource(int order, int n, std::vector<double> pmf, std::string name)
      : constellation_(order), n_(n), pmf_(std::move(pmf)), name_(std::move(name)) {
    if (pmf_.size() != constellation_.amplitude_alphabet().size()) throw ConfigError("source pmf size differs from the amplitude alphabet");
    if (n_ <= 0) throw ConfigError("block length n must be positive");
  }

  static IidSource uniform(int order, int n) {
    const Constellation c(order);
    const auto k = c.amplitude_alphabet().size();
    return {order, n, std::vector<double>(k, 1.0 / static_cast<double>(k)), "uniform"};
  }

  /// Maxwell-Boltzmann amplitudes at the given entropy per amplitude.
  static IidSource maxwell_boltzmann(int order, int n, double entropy_per_amplitude) {
    const Constellation c(order);
    const auto energies = amplitude_energies(c.amplitude_alphabet());
    const auto sol = solve_lambda_for_entropy(entropy_per_amplitude, energies);
    return {order, n, mb_pmf(sol.lambda, energies).pmf, "mb"};
  }

  SymbolSequence draw(Rng& rng) const override {
    std::discrete_distribution<int> pick(pmf_.begin(), pmf_.end());
    const auto alphabet = constellation_.amplitude_alphabet();
    const auto slots = static_cast<std::size_t>(kSlotsPer4D * n_);
    SymbolSequence s;
    s.amplitudes.resize(slots);
    for (auto& a : s.amplitudes) a = alphabet[static_cast<std::size_t>(pick(rng))];
    s.signs = random_signs(slots, rng);
    return s;
  }

  std::vector<double> amplitude_prior() const override { return pmf_; }
  double amplitude_rate() const override { return entropy_bits(pmf_); }
  int n() const override { return n_; }
  int order() const override { return constellation_.order(); }
  std::string name() const override { return name_; }

 private:
  Constellation constellation_;
  int n_;
  std::vector<double> pmf_;
  std::string name_;
};

/// PAS blocks from a DM bank fed with uniform payload bits.
class DmSource final : public SequenceSource {
 public:
  DmSource(std::shared_ptr<const PasFramer> framer, std::string name)
      : framer_(std::move(framer)), name_(std::move(name)), prior_(framer_->codec().induced_distribution()) {}

  SymbolSequence draw(Rng& rng) const override {
    return framer_->frame(random_bits(static_cast<std::size_t>(framer_->accounting().payload_bits()), rng));
  }
  std::vector<double> amplitude_prior() const override { return prior_; }
  double amplitude_rate() const override { return framer_->codec().rate(); }
  int n() const override { return framer_->accounting().n; }
  int order() const override { return framer_->accounting().order; }
  std::string name() const override { return name_; }
  const PasFramer& framer() const { return *framer_; }

 private:
  std::shared_ptr<const PasFramer> framer_;
  std::string name_;
  std::vector<double> prior_;
};

}  // namespace nlps::framing
