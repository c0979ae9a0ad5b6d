#include "nlps/common/random.hpp"
#include "nlps/dm/factory.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

namespace {

using namespace nlps;
using namespace nlps::dm;

using oracle::Seq;
using oracle::all_sequences;
using oracle::energy;

Bits index_bits(unsigned long long index, int k) { return uint_to_bits(index, static_cast<std::size_t>(k)); }

void check_round_trip(const DistributionMatcher& codec, int trials, std::uint64_t seed) {
  Rng rng(seed);
  const std::set<int> alpha(codec.alphabet().begin(), codec.alphabet().end());
  for (int t = 0; t < trials; ++t) {
    const auto bits = random_bits(static_cast<std::size_t>(codec.input_bits()), rng);
    const auto amps = codec.encode(bits);
    ASSERT_EQ(static_cast<int>(amps.size()), codec.block_length());
    for (int a : amps) ASSERT_TRUE(alpha.contains(a));
    ASSERT_EQ(codec.decode(amps), bits);
  }
}

TEST(Ccdm, DegenerateComposition) {
  const Ccdm c({1, 3}, {4, 0});
  EXPECT_EQ(c.input_bits(), 0);
  EXPECT_EQ(c.encode({}), (Seq{1, 1, 1, 1}));
  EXPECT_TRUE(c.decode(Seq{1, 1, 1, 1}).empty());
}

TEST(Ccdm, TwoOfEachMatchesBruteForceOrder) {
  const Ccdm c({1, 3}, {2, 2});
  EXPECT_EQ(c.codeword_count(), 6);
  ASSERT_EQ(c.input_bits(), 2);
  std::vector<Seq> perms;
  for (const auto& s : all_sequences({1, 3}, 4))
    if (std::count(s.begin(), s.end(), 1) == 2) perms.push_back(s);
  ASSERT_EQ(perms.size(), 6U);
  for (unsigned i = 0; i < 4; ++i) EXPECT_EQ(c.encode(index_bits(i, 2)), perms[i]);
}

TEST(Ccdm, RejectsTooManyBits) { EXPECT_THROW(Ccdm({1, 3}, {2, 2}, 3), std::invalid_argument); }

TEST(Ccdm, SmallInstancesEqualBruteForce) {
  for (int n = 1; n <= 6; ++n)
    for (int ones = 0; ones <= n; ++ones) {
      const Ccdm c({1, 3}, {ones, n - ones});
      std::vector<Seq> expected;
      for (const auto& s : all_sequences({1, 3}, n))
        if (std::count(s.begin(), s.end(), 1) == ones) expected.push_back(s);
      for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(c.unrank(BigInt(i)), expected[i]);
        EXPECT_EQ(c.rank(expected[i]), BigInt(i));
      }
      const std::size_t used = std::size_t{1} << c.input_bits();
      ASSERT_LE(used, expected.size());
      for (std::size_t i = 0; i < used; ++i) EXPECT_EQ(c.encode(index_bits(i, c.input_bits())), expected[i]);
    }
}

TEST(Ccdm, ReferencePointRoundTripAndComposition) {
  const auto codec = make_codec(reference::constant_composition());
  const auto& ccdm = dynamic_cast<const Ccdm&>(*codec);
  EXPECT_EQ(ccdm.block_length(), 1024);
  EXPECT_EQ(ccdm.input_bits(), 1331);
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto bits = random_bits(1331, rng);
    const auto amps = ccdm.encode(bits);
    std::vector<int> counts(4, 0);
    for (int a : amps) ++counts[static_cast<std::size_t>(a / 2)];
    ASSERT_EQ(counts, std::vector<int>(ccdm.composition().begin(), ccdm.composition().end()));
    ASSERT_EQ(ccdm.decode(amps), bits);
  }
}

TEST(Ess, TwoSymbolToyAgainstBruteForce) {
  const auto ess = Ess::with_max_energy({1, 3}, 2, 10);
  EXPECT_EQ(ess.sphere_size(), 3);
  ASSERT_EQ(ess.input_bits(), 1);
  EXPECT_EQ(ess.encode(Bits{0}), (Seq{1, 1}));
  EXPECT_EQ(ess.encode(Bits{1}), (Seq{1, 3}));
  const auto p = ess.induced_distribution();
  EXPECT_NEAR(p[0], 0.75, 1e-15);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
  EXPECT_NEAR(rate_loss(ess), 0.8112781244591328 - 0.5, 1e-12);
}

TEST(Ess, UnconstrainedSphereUsesEverySequence) {
  const auto ess = Ess::with_max_energy({1, 3, 5, 7}, 5, 5 * 49);
  EXPECT_EQ(ess.input_bits(), 10);
  EXPECT_EQ(ess.sphere_size(), 1024);
}

TEST(Ess, SmallInstancesEqualBruteForce) {
  for (int n = 1; n <= 6; ++n)
    for (long long e_max = 2LL * n; e_max <= 9LL * n; e_max += 8) {
      const auto ess = Ess::with_max_energy({1, 3}, n, e_max);
      std::vector<Seq> admissible;
      for (const auto& s : all_sequences({1, 3}, n))
        if (energy(s) <= e_max) admissible.push_back(s);
      ASSERT_EQ(ess.sphere_size(), BigInt(admissible.size())) << "n=" << n << " E=" << e_max;
      for (std::size_t i = 0; i < admissible.size(); ++i) {
        EXPECT_EQ(ess.unrank(BigInt(i)), admissible[i]);
        EXPECT_EQ(ess.rank(admissible[i]), BigInt(i));
      }
      std::map<int, double> counts;
      const std::size_t used = std::size_t{1} << ess.input_bits();
      for (std::size_t i = 0; i < used; ++i)
        for (int a : admissible[i]) counts[a] += 1.0 / static_cast<double>(used * static_cast<std::size_t>(n));
      const auto p = ess.induced_distribution();
      EXPECT_NEAR(p[0], counts[1], 1e-12);
      EXPECT_NEAR(p[1], counts[3], 1e-12);
    }
}

TEST(Ess, MinimalEnergyBoundForRequestedBits) {
  for (int k = 1; k <= 10; ++k) {
    const auto ess = Ess::for_input_bits({1, 3, 5, 7}, 5, k);
    EXPECT_EQ(ess.input_bits(), k);
    long long below = 0;
    for (const auto& s : all_sequences({1, 3, 5, 7}, 5))
      if (energy(s) < ess.max_energy()) ++below;
    EXPECT_LT(below, 1LL << k) << "bound not minimal for k=" << k;
  }
  EXPECT_THROW(Ess::for_input_bits({1, 3}, 4, 5), std::invalid_argument);
}

TEST(Ess, ReferencePointRoundTripAndEnergyBound) {
  const auto codec = make_codec(reference::sphere_shaping());
  const auto& ess = dynamic_cast<const Ess&>(*codec);
  EXPECT_EQ(ess.input_bits(), 333);
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    const auto bits = random_bits(333, rng);
    const auto amps = ess.encode(bits);
    ASSERT_LE(energy(amps), ess.max_energy());
    ASSERT_EQ(ess.decode(amps), bits);
  }
}

TEST(Enumeration, IndexOrderIsLexicographic) {
  const auto ess = Ess::for_input_bits({1, 3, 5, 7}, 16, 20);
  const Ccdm ccdm({1, 3, 5, 7}, {7, 5, 3, 1});
  Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    BigInt a = bits_to_bigint(random_bits(20, rng)), b = bits_to_bigint(random_bits(20, rng));
    if (a == b) continue;
    EXPECT_EQ(a < b, ess.unrank(a) < ess.unrank(b));
    EXPECT_EQ(a < b, ccdm.unrank(a) < ccdm.unrank(b));
  }
}

TEST(Hidm, SingleLayerIsRelabeling) {
  const Hidm h({1, 3}, {{.output_length = 2, .input_bits = 2, .alphabet_order = 2}});
  EXPECT_EQ(h.block_length(), 2);
  EXPECT_EQ(h.input_bits(), 2);
  std::set<Seq> outputs;
  for (unsigned i = 0; i < 4; ++i) {
    const auto bits = index_bits(i, 2);
    const auto amps = h.encode(bits);
    outputs.insert(amps);
    EXPECT_EQ(h.decode(amps), bits);
  }
  EXPECT_EQ(outputs.size(), 4U);
  EXPECT_EQ(h.encode(index_bits(0, 2)), (Seq{1, 1}));
  EXPECT_EQ(h.encode(index_bits(3, 2)), (Seq{3, 3}));
}

TEST(Hidm, InducedDistributionMatchesExhaustiveEncoding) {
  const Hidm h({1, 3, 5, 7}, {{.output_length = 4, .input_bits = 3, .alphabet_order = 4},
                              {.output_length = 2, .input_bits = 2, .alphabet_order = 8},
                              {.output_length = 2, .input_bits = 5, .alphabet_order = 8}});
  ASSERT_EQ(h.block_length(), 16);
  ASSERT_EQ(h.input_bits(), 4 * 3 + 2 * 2 + 5);
  std::vector<double> p(4, 0.0);
  const unsigned long long total = 1ULL << h.input_bits();
  for (unsigned long long i = 0; i < total; ++i) {
    const auto bits = index_bits(i, h.input_bits());
    const auto amps = h.encode(bits);
    ASSERT_EQ(h.decode(amps), bits);
    for (int a : amps) p[static_cast<std::size_t>(a / 2)] += 1.0 / static_cast<double>(total * 16);
  }
  const auto induced = h.induced_distribution();
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(induced[i], p[i], 1e-12);
}

TEST(Hidm, ReferenceRateAndMemory) {
  const auto codec = make_codec(reference::hierarchical());
  const auto& h = dynamic_cast<const Hidm&>(*codec);
  EXPECT_EQ(h.block_length(), 256);
  EXPECT_EQ(h.input_bits(), 337);
  EXPECT_NEAR(h.rate(), 1.3164, 5e-5);
  EXPECT_EQ(h.instances(), (std::vector<int>{32, 16, 8, 4, 2, 1}));
  EXPECT_NEAR(static_cast<double>(h.memory_bits()) / 1000.0, 133.0, 1.0);
  check_round_trip(h, 10000, 17);

  const auto enlarged = make_codec(reference::hierarchical_enlarged());
  EXPECT_EQ(enlarged->input_bits(), 343);
  EXPECT_NEAR(enlarged->rate(), 1.3398, 5e-5);
  check_round_trip(*enlarged, 1000, 19);
}

TEST(Hidm, RejectsInconsistentLayers) {
  EXPECT_THROW(Hidm({1, 3, 5, 7}, {}), std::invalid_argument);
  EXPECT_THROW(Hidm({1, 3, 5, 7}, {{2, 5, 4}}), std::invalid_argument);
  EXPECT_THROW(Hidm({1, 3, 5, 7}, {{2, 2, 8}}), std::invalid_argument);
  const std::vector<int> lengths{8, 2}, bits{6, 5}, orders{4};
  EXPECT_THROW(Hidm::from_lists({1, 3, 5, 7}, lengths, bits, orders), std::invalid_argument);
  const Hidm h({1, 3}, {{.output_length = 2, .input_bits = 1, .alphabet_order = 2}});
  EXPECT_THROW(h.decode(Seq{3, 3}), std::invalid_argument);
}

TEST(Factory, DescriptorRoundTrip) {
  for (const auto& d : {reference::sphere_shaping(64), reference::constant_composition(64), reference::hierarchical()}) {
    const auto codec = make_codec(d);
    const auto again = make_codec(codec->descriptor());
    EXPECT_EQ(again->descriptor(), codec->descriptor());
    Rng rng(1);
    const auto bits = random_bits(static_cast<std::size_t>(codec->input_bits()), rng);
    EXPECT_EQ(again->encode(bits), codec->encode(bits));
  }
  EXPECT_THROW(make_codec({.type = "nope"}), std::invalid_argument);
}

TEST(RateLoss, NonincreasingInBlockLength) {
  for (const std::string type : {"ccdm", "ess"}) {
    double prev = 1e9;
    for (int n : {32, 64, 128, 256, 512, 1024}) {
      const auto codec = make_codec({.type = type, .block_length = n, .input_bits = input_bits_for_rate(n, 1.3), .alphabet = odd_alphabet(4)});
      const double loss = rate_loss(*codec);
      EXPECT_GE(loss, 0.0);
      EXPECT_LE(loss, prev + 1e-12) << type << " N=" << n;
      prev = loss;
    }
  }
}

TEST(RateLoss, ReferenceCodecOrdering) {
  const double ess = rate_loss(*make_codec(reference::sphere_shaping()));
  const double ccdm = rate_loss(*make_codec(reference::constant_composition()));
  const double hidm = rate_loss(*make_codec(reference::hierarchical()));
  EXPECT_NEAR(ess, ccdm, 0.25 * std::max(ess, ccdm));
  EXPECT_GT(hidm, ess);
}

}  // namespace
