#include <cmath>

#include <gtest/gtest.h>

#include "digeco/complexity.hpp"
#include "digeco/rng.hpp"

using namespace digeco;

namespace {

SitePopulation repeat(std::vector<std::pair<Genome, int>> groups, std::size_t alphabet) {
  SitePopulation p;
  p.alphabet_size = alphabet;
  for (auto& [g, n] : groups)
    for (int i = 0; i < n; ++i) p.sequences.push_back(g);
  return p;
}

// Four symbols; site 1 decides the case, site 2 is fixed so ell_V >= 1 always.
SitePopulation one_site(std::vector<int> counts) {
  SitePopulation p;
  p.alphabet_size = 4;
  for (std::uint32_t s = 0; s < counts.size(); ++s)
    for (int i = 0; i < counts[s]; ++i) p.sequences.push_back({s});
  return p;
}

}  // namespace

TEST(Entropy, UniformOverFourSymbolsIsOne) {
  EXPECT_NEAR(per_site_entropy(one_site({4, 4, 4, 4}), 1), 1.0, 1e-12);
}

TEST(Entropy, FixedSiteIsZero) {
  EXPECT_NEAR(per_site_entropy(one_site({16}), 1), 0.0, 1e-12);
}

TEST(Entropy, TwoOfFourSplitIsHalf) {
  EXPECT_NEAR(per_site_entropy(one_site({8, 8}), 1), 0.5, 1e-12);
}

TEST(Entropy, SiteBeyondEffectiveLengthThrows) {
  auto p = one_site({4, 4, 4, 4});
  try {
    per_site_entropy(p, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SiteOutOfRange);
  }
  EXPECT_THROW(per_site_entropy(p, 0), Error);
}

TEST(EffectiveLength, ThreeSymbolsLongestSixGivesFive) {
  // sampleSize(5) = 16 >= 15 but sampleSize(6) = 10 < 18.
  auto p = repeat({{{0, 1, 2, 0, 1, 2}, 10}, {{2, 1, 0, 2, 1}, 6}}, 3);
  ASSERT_EQ(p.max_length(), 6u);
  EXPECT_EQ(sample_size(p, 5), 16u);
  EXPECT_EQ(sample_size(p, 6), 10u);
  EXPECT_EQ(ell_v(p), 5u);
}

TEST(EffectiveLength, MatchesBruteForceDefinition) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    SitePopulation p;
    p.alphabet_size = 2 + rng.index(5);
    const std::size_t n = 1 + rng.index(40);
    for (std::size_t i = 0; i < n; ++i) {
      Genome g(rng.index(12));
      for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(p.alphabet_size));
      p.sequences.push_back(g);
    }
    for (std::size_t t = 1; t <= 3; ++t) {
      std::size_t expect = 0;
      for (std::size_t l = 1; l <= 12; ++l) {
        std::size_t s = 0;
        for (auto& g : p.sequences) s += g.size() >= l;
        if (s * t >= p.alphabet_size * l) expect = l;
      }
      EXPECT_EQ(ell_v(p, t), expect);
    }
  }
}

TEST(Complexity, NonAtomicAlphabetHalvesEfficiency) {
  // Y replaces the pair G B: [G B P] and [Y P] over {Y, G, B, P}.
  enum : std::uint32_t { Y, G, B, P };
  auto pop = repeat({{{G, B, P}, 8}, {{Y, P}, 8}}, 4);
  const auto rep = complexity_cv(pop);
  EXPECT_EQ(rep.ell_v, 2u);
  EXPECT_NEAR(rep.efficiency, 0.5, 1e-12);
  std::vector<std::size_t> labels(16, 0);
  for (std::size_t i = 8; i < 16; ++i) labels[i] = 1;
  EXPECT_NEAR(efficiency_ec(pop, labels, 2), 1.0, 1e-12);
}

TEST(Complexity, PureClustersReachTheTarget) {
  // Two pure clusters of equal size over 15 symbols.
  Genome a = {0, 1, 2, 3}, b = {4, 5, 6, 7};
  auto pop = repeat({{a, 60}, {b, 60}}, 15);
  std::vector<std::size_t> labels(120, 0);
  for (std::size_t i = 60; i < 120; ++i) labels[i] = 1;
  EXPECT_NEAR(efficiency_ec(pop, labels, 2), 1.0, 1e-12);
  EXPECT_NEAR(complexity_cv(pop).efficiency, clustering_coefficient_target(15, 2), 1e-12);
  EXPECT_NEAR(clustering_coefficient_target(15, 2), 1.0 - std::log(2.0) / std::log(15.0), 1e-15);
}

TEST(Complexity, SingleClusterEqualsWholePopulation) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    SitePopulation p;
    p.alphabet_size = 5;
    for (int i = 0; i < 60; ++i) {
      Genome g(1 + rng.index(6));
      for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(2));
      p.sequences.push_back(g);
    }
    std::vector<std::size_t> labels(p.sequences.size(), 0);
    EXPECT_NEAR(efficiency_ec(p, labels, 1), complexity_cv(p).efficiency, 1e-12);
  }
}

TEST(Complexity, EfficiencyStaysInUnitInterval) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    SitePopulation p;
    p.alphabet_size = 2 + rng.index(10);
    for (int i = 0; i < 80; ++i) {
      Genome g(1 + rng.index(5));
      for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(p.alphabet_size));
      p.sequences.push_back(g);
    }
    if (ell_v(p) == 0) continue;
    const auto r = complexity_cv(p);
    EXPECT_GE(r.efficiency, -1e-12);
    EXPECT_LE(r.efficiency, 1.0 + 1e-12);
    EXPECT_NEAR(r.c_v, r.efficiency * static_cast<double>(r.ell_v), 1e-9);
  }
}

TEST(Complexity, DegeneratePopulationThrows) {
  SitePopulation p;
  p.alphabet_size = 20;
  p.sequences = {{1}, {2}};
  try {
    complexity_cv(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegeneratePopulation);
  }
}

TEST(Complexity, UnusedClusterLabelThrows) {
  auto p = one_site({4, 4});
  std::vector<std::size_t> labels(8, 0);
  EXPECT_THROW(efficiency_ec(p, labels, 2), Error);
}

TEST(SiteEntropies, ParallelMatchesSerial) {
  Rng rng(9);
  SitePopulation p;
  p.alphabet_size = 7;
  for (int i = 0; i < 500; ++i) {
    Genome g(1 + rng.index(30));
    for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(7));
    p.sequences.push_back(g);
  }
  const auto upto = ell_v(p);
  ASSERT_GT(upto, 0u);
  EXPECT_EQ(site_entropies(p, upto), site_entropies_serial(p, upto));
}

TEST(SiteCounts, AgreesWithBatchComputation) {
  Rng rng(13);
  SitePopulation p;
  p.alphabet_size = 4;
  SiteCounts c(4);
  for (int i = 0; i < 40; ++i) {
    Genome g(1 + rng.index(4));
    for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(2));
    p.sequences.push_back(g);
    c.add(g);
  }
  std::vector<std::size_t> labels(p.sequences.size(), 0);
  EXPECT_EQ(c.ell_v(1), ell_v(p));
  EXPECT_NEAR(c.efficiency(1), efficiency_ec(p, labels, 1), 1e-12);
  const Genome last = p.sequences.back();
  c.remove(last);
  p.sequences.pop_back();
  labels.pop_back();
  EXPECT_NEAR(c.efficiency(1), efficiency_ec(p, labels, 1), 1e-12);
}
