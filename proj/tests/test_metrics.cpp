#include "nlps/framing/sources.hpp"
#include "nlps/metrics/nli.hpp"
#include "nlps/metrics/performance.hpp"
#include "nlps/metrics/statistics.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace {

using namespace nlps;
using namespace nlps::metrics;
using oracle::gmi_oracle_2d;

SymbolSequence filled(std::size_t n, std::vector<int> pattern, Rng& rng) {
  SymbolSequence s;
  for (std::size_t i = 0; i < 4 * n; ++i) {
    s.amplitudes.push_back(pattern[i % pattern.size()]);
    s.signs.push_back(rng() & 1U ? std::int8_t{1} : std::int8_t{-1});
  }
  return s;
}

TEST(Edi, ConstantEnergyAndDirectArithmetic) {
  Rng rng(1);
  const auto c = filled(32, {3, 5, 5, 3}, rng);
  for (int w : {1, 4, 32}) EXPECT_DOUBLE_EQ(edi(c, w), 0.0);
  const std::vector<double> e{1, 1, 9, 9};
  EXPECT_NEAR(edi(e, 1), 3.2, 1e-12);
  EXPECT_THROW(edi(c, 33), std::invalid_argument);
  EXPECT_THROW(edi(c, 0), std::invalid_argument);
}

TEST(Kurtosis, ReferenceValues) {
  Rng rng(2);
  EXPECT_NEAR(kurtosis(filled(64, {1}, rng)), 1.0, 1e-12);
  std::normal_distribution<double> g;
  std::vector<Complex> gauss(1'000'000);
  for (auto& v : gauss) v = {g(rng), g(rng)};
  EXPECT_NEAR(kurtosis(gauss), 2.0, 0.02);
  const std::vector<Complex> pts{{1, 1}, {1, 3}, {3, 1}, {3, 3}};
  EXPECT_NEAR(kurtosis(pts), 1.32, 1e-12);
  EXPECT_THROW(kurtosis(std::vector<Complex>(4)), std::invalid_argument);
}

TEST(EnergyStatistics, InvariantUnderSignFlips) {
  Rng rng(3);
  const auto src = framing::IidSource::uniform(64, 64);
  for (int t = 0; t < 20; ++t) {
    auto a = src.draw(rng);
    auto b = a;
    for (auto& s : b.signs)
      if (rng() & 1U) s = static_cast<std::int8_t>(-s);
    EXPECT_DOUBLE_EQ(edi(a, 8), edi(b, 8));
    EXPECT_DOUBLE_EQ(kurtosis(a), kurtosis(b));
    EXPECT_DOUBLE_EQ(EdiMetric(8)(a, 0), EdiMetric(8)(b, 1));
  }
}

struct Fixture {
  std::shared_ptr<framing::IidSource> source;
  MetricContext ctx;

  explicit Fixture(int n, double power_dbm = 1.0) : source(std::make_shared<framing::IidSource>(framing::IidSource::uniform(64, n))) {
    ctx.link.steps_per_span = 10;
    ctx.grid.power_dbm = power_dbm;
    ctx.n_avg = 1;
    ctx.reference_energy = source->nominal_energy_2d();
  }
  NeighborSource neighbors() const {
    return [s = source](Rng& r) { return s->draw(r); };
  }
  NliMetric metric(NliMetric::Mode mode = NliMetric::Mode::kPlain) const { return NliMetric(ctx, neighbors(), mode); }
};

TEST(NliMetric, LinearContextCostsNothing) {
  Fixture f(128);
  f.ctx.link.gamma_per_w_km = 0.0;
  Rng rng(4);
  for (int t = 0; t < 4; ++t) {
    const auto x = f.source->draw(rng);
    EXPECT_LE(f.metric()(x, 5), 1e-10);
    EXPECT_LE(f.metric(NliMetric::Mode::kCprAware)(x, 5), 1e-10);
  }
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
  int concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) ((a[i] - a[j]) * (b[i] - b[j]) > 0 ? concordant : discordant)++;
  return static_cast<double>(concordant - discordant) / (concordant + discordant);
}

std::vector<double> batch_costs(double power_dbm, int count) {
  Fixture f(512, power_dbm);
  const auto m = f.metric();
  Rng rng(6);
  std::vector<double> v;
  for (int t = 0; t < count; ++t) v.push_back(m(f.source->draw(rng), 7));
  return v;
}

TEST(NliMetric, RankingIdenticalOneDbApart) {
  const auto a = batch_costs(0.0, 32), b = batch_costs(1.0, 32);
  EXPECT_DOUBLE_EQ(kendall_tau(a, b), 1.0);
  // normalized cost grows by about 2 dB per dB of launch power
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(10 * std::log10(b[i] / a[i]), 2.0, 0.1);
}

TEST(NliMetric, RankingStableOverFourDb) {
  const auto a = batch_costs(-1.0, 32), b = batch_costs(3.0, 32);
  // only near-ties (relative gap below 1%) may swap
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (std::abs(a[i] - a[j]) > 0.01 * std::max(a[i], a[j])) EXPECT_GT((a[i] - a[j]) * (b[i] - b[j]), 0.0) << i << " " << j;
}

TEST(NliMetric, ConstantAmplitudeBeatsUniformQam) {
  Fixture uni(512);
  Fixture inner(512);
  inner.ctx.reference_energy = 2.0;
  const NliMetric inner_metric(inner.ctx, [](Rng& r) { return filled(512, {1}, r); });
  const auto uni_metric = uni.metric();
  Rng rng(8);
  double constant = 0.0, uniform = 0.0;
  for (int t = 0; t < 8; ++t) {
    constant += inner_metric(filled(512, {1}, rng), 9 + t);
    uniform += uni_metric(uni.source->draw(rng), 9 + t);
  }
  EXPECT_LT(constant, uniform);
}

TEST(NliMetric, CprAwareNeverWorseOnSameDraw) {
  Fixture f(512);
  const auto plain = f.metric(), cpr = f.metric(NliMetric::Mode::kCprAware);
  Rng rng(10);
  for (int t = 0; t < 64; ++t) {
    const auto x = f.source->draw(rng);
    EXPECT_LE(cpr(x, 11 + t), plain(x, 11 + t) + 1e-12);
  }
}

TEST(NliMetric, CprAwareLowersMeanCost) {
  Fixture f(512);
  const auto plain = f.metric(), cpr = f.metric(NliMetric::Mode::kCprAware);
  Rng rng(10);
  double a = 0.0, b = 0.0;
  for (int t = 0; t < 16; ++t) {
    const auto x = f.source->draw(rng);
    a += plain(x, 11 + t);
    b += cpr(x, 11 + t);
  }
  EXPECT_LT(b, a);
}

TEST(NliMetric, CprHelpsHighEnergyRunsMore) {
  Fixture f(512, 3.0);
  f.ctx.reference_energy = 50.0;
  Rng rng(12);
  SymbolSequence run = filled(256, {7}, rng), flat = filled(512, {5}, rng);
  const auto tail = filled(256, {1}, rng);
  run.amplitudes.insert(run.amplitudes.end(), tail.amplitudes.begin(), tail.amplitudes.end());
  run.signs.insert(run.signs.end(), tail.signs.begin(), tail.signs.end());
  const auto plain = f.metric(), cpr = f.metric(NliMetric::Mode::kCprAware);
  const double gain_run = 1.0 - cpr(run, 13) / plain(run, 13);
  const double gain_flat = 1.0 - cpr(flat, 13) / plain(flat, 13);
  EXPECT_GT(gain_run, gain_flat);
}

TEST(SignAveraged, SingleOwnDrawEqualsInnerAndSignsAreIgnored) {
  Fixture f(128);
  const auto inner = std::make_shared<NliMetric>(f.metric());
  const SignAveragedMetric avg(inner, 4);
  Rng rng(14);
  const auto x = f.source->draw(rng);
  EXPECT_DOUBLE_EQ(avg.average(x, {x.signs}, 15), (*inner)(x, derive_seed(15, "sign-draw", 0)));
  auto flipped = x;
  for (auto& s : flipped.signs) s = static_cast<std::int8_t>(-s);
  EXPECT_DOUBLE_EQ(avg(x, 16), avg(flipped, 16));
  EXPECT_FALSE(avg.sign_dependent());
}

TEST(SignAveraged, ExhaustiveEnumerationOnTinyBlock) {
  Fixture f(2, 6.0);
  const auto inner = std::make_shared<NliMetric>(f.metric());
  const SignAveragedMetric avg(inner, 1);
  Rng rng(17);
  const auto x = f.source->draw(rng);
  std::vector<std::vector<std::int8_t>> all;
  double brute = 0.0;
  for (unsigned p = 0; p < 256; ++p) {
    auto v = x;
    for (std::size_t i = 0; i < 8; ++i) v.signs[i] = (p >> i) & 1U ? std::int8_t{1} : std::int8_t{-1};
    all.push_back(v.signs);
    brute += (*inner)(v, derive_seed(18, "sign-draw", p)) / 256.0;
  }
  EXPECT_NEAR(avg.average(x, all, 18), brute, 1e-15 * std::abs(brute) + 1e-18);
}

TEST(SignAveraged, EstimateVarianceShrinksWithDraws) {
  Fixture f(128, 4.0);
  const auto inner = std::make_shared<NliMetric>(f.metric());
  Rng rng(19);
  const auto x = f.source->draw(rng);
  std::vector<double> variance;
  for (int ns : {4, 16, 64}) {
    const SignAveragedMetric avg(inner, ns);
    std::vector<double> v;
    for (int r = 0; r < 12; ++r) v.push_back(avg(x, 100 + static_cast<std::uint64_t>(r)));
    double m = 0.0, s = 0.0;
    for (double a : v) m += a / v.size();
    for (double a : v) s += (a - m) * (a - m) / (v.size() - 1);
    variance.push_back(s);
  }
  EXPECT_LT(variance[1], variance[0]);
  EXPECT_LT(variance[2], variance[1]);
  EXPECT_GT(variance[0] / variance[2], 4.0);
  EXPECT_LT(variance[0] / variance[2], 64.0);
}

GmiEstimate awgn_gmi(const Constellation& c, std::span<const double> prior, double snr_db, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::discrete_distribution<int> amp(prior.begin(), prior.end());
  const auto alphabet = c.amplitude_alphabet();
  auto draw = [&] { return (rng() & 1U ? 1.0 : -1.0) * alphabet[static_cast<std::size_t>(amp(rng))]; };
  std::vector<Complex> tx[2], rx[2];
  double es = 0.0;
  for (int p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < n; ++k) {
      tx[p].emplace_back(draw(), draw());
      es += std::norm(tx[p].back()) / (2.0 * n);
    }
  std::normal_distribution<double> g(0.0, std::sqrt(es / std::pow(10.0, snr_db / 10) / 2.0));
  for (int p = 0; p < 2; ++p)
    for (const auto& v : tx[p]) rx[p].push_back(std::isinf(snr_db) ? v : v + Complex(g(rng), g(rng)));
  return gmi_4d(tx[0], tx[1], rx[0], rx[1], c, prior, 512);
}

TEST(Gmi, NoiselessSaturatesToSourceEntropy) {
  const Constellation c(64);
  const std::vector<double> uniform(4, 0.25);
  EXPECT_NEAR(awgn_gmi(c, uniform, INFINITY, 4096, 1).value, 12.0, 1e-6);
  const auto energies = amplitude_energies(c.amplitude_alphabet());
  const auto mb = mb_pmf(solve_lambda_for_entropy(1.6, energies).lambda, energies).pmf;
  EXPECT_NEAR(awgn_gmi(c, mb, INFINITY, 4096, 2).value, 10.4, 1e-6);
}

TEST(Gmi, UniformAwgnMatchesGaussHermiteOracle) {
  const Constellation c(64);
  const std::vector<double> uniform(4, 0.25);
  for (double snr : {10.0, 14.0, 18.0}) {
    const auto est = awgn_gmi(c, uniform, snr, 200'000, 3);
    EXPECT_NEAR(est.value / 2.0, gmi_oracle_2d(c, snr), 0.05) << snr << " dB";
    EXPECT_LT(est.std_error, 0.01);
  }
}

TEST(Gmi, NonincreasingInNoiseVariance) {
  const Constellation c(16);
  const std::vector<double> uniform(2, 0.5);
  double prev = 1e9;
  for (double snr : {30.0, 20.0, 15.0, 10.0, 5.0, 0.0}) {
    const double v = awgn_gmi(c, uniform, snr, 50'000, 4).value;
    EXPECT_LE(v, prev + 1e-9);
    prev = v;
  }
}

TEST(Gmi, InvalidVarianceRejectedAndZeroFloored) {
  EXPECT_THROW(auxiliary_variance(-1.0, 42.0), RuntimeFailure);
  EXPECT_THROW(auxiliary_variance(NAN, 42.0), RuntimeFailure);
  EXPECT_GT(auxiliary_variance(0.0, 42.0), 0.0);
}

TEST(Air, SelectionPenaltyIsExact) {
  EXPECT_EQ(selection_penalty(512, 256, 1), 0.015625);
  EXPECT_EQ(selection_penalty(512, 36864, 144), 0.015625);
  EXPECT_EQ(air_with_selection(9.0, 512, 1000, 1000), 9.0);
  EXPECT_THROW(selection_penalty(512, 10, 0), std::invalid_argument);
  EXPECT_THROW(selection_penalty(512, 10, 11), std::invalid_argument);
  std::vector<double> a{1, 2, 3}, b{1, 2, 3};
  EXPECT_EQ(paired_standard_error(a, b), 0.0);
}

TEST(Air, SpectralEfficiency) {
  EXPECT_NEAR(se_from_air(9.2, 46.5, 50.0), 8.556, 1e-12);
  EXPECT_EQ(se_from_air(0.0, 46.5, 50.0), 0.0);
  for (int d : {1, 2, 5, 10, 20}) EXPECT_NEAR(se_from_air(8.0, 232.5 / d, 250.0 / d), 0.93 * 8.0, 1e-12);
}

}  // namespace
