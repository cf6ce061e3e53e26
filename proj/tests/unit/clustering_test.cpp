#include <algorithm>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "digeco/clustering.hpp"
#include "digeco/rng.hpp"

using namespace digeco;

namespace {

// Same partition up to renaming.
bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

// Plain O(n^3) average linkage with the same tie rule.
std::vector<std::size_t> naive_upgma(const DistanceMatrix& m, std::size_t k) {
  const std::size_t n = m.size();
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  while (clusters.size() > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double s = 0;
        for (auto x : clusters[i])
          for (auto y : clusters[j]) s += m(x, y);
        s /= static_cast<double>(clusters[i].size() * clusters[j].size());
        if (s < best) best = s, bi = i, bj = j;
      }
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<long>(bj));
  }
  std::vector<std::size_t> labels(n);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (auto x : clusters[c]) labels[x] = c;
  return labels;
}

}  // namespace

TEST(Distance, DirectedTakesClosestSameIdValue) {
  std::vector<AttributeTuple> a = {{1, 10}, {1, 30}}, b = {{1, 28}};
  EXPECT_EQ(directed_distance(a, b), 2);
  EXPECT_EQ(directed_distance(b, a), 20);
  EXPECT_EQ(sequence_distance(a, b), 20);
}

TEST(Distance, MissingIdCostsHundred) {
  std::vector<AttributeTuple> a = {{1, 10}, {2, 50}}, b = {{1, 15}, {3, 5}};
  EXPECT_EQ(directed_distance(a, b), 105);
  EXPECT_EQ(directed_distance(b, a), 105);
}

TEST(Distance, SymmetricAndZeroOnSelf) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<AttributeTuple> a(1 + rng.index(5)), b(1 + rng.index(5));
    for (auto& x : a) x = {static_cast<int>(1 + rng.index(4)), static_cast<int>(1 + rng.index(100))};
    for (auto& x : b) x = {static_cast<int>(1 + rng.index(4)), static_cast<int>(1 + rng.index(100))};
    EXPECT_EQ(sequence_distance(a, b), sequence_distance(b, a));
    EXPECT_EQ(sequence_distance(a, a), 0);
  }
}

TEST(DistanceMatrix, ParallelMatchesSerial) {
  Rng rng(4);
  std::vector<std::vector<AttributeTuple>> items(150);
  for (auto& it : items) {
    it.resize(1 + rng.index(8));
    for (auto& x : it) x = {static_cast<int>(1 + rng.index(10)), static_cast<int>(1 + rng.index(100))};
  }
  const auto a = distance_matrix(items), b = distance_matrix_serial(items);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) ASSERT_EQ(a(i, j), b(i, j));
}

TEST(AverageLink, MatchesNaiveReference) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.index(10);
    DistanceMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, rng.uniform01());
    const std::size_t k = 1 + rng.index(n);
    EXPECT_TRUE(same_partition(average_link(m, k).labels, naive_upgma(m, k))) << "n=" << n << " k=" << k;
  }
}

TEST(AverageLink, MergeHeightsDoNotDecrease) {
  Rng rng(8);
  DistanceMatrix m(12);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = i + 1; j < 12; ++j) m.set(i, j, rng.uniform01());
  const auto d = average_link(m, 1);
  ASSERT_EQ(d.merges.size(), 11u);
  for (std::size_t i = 1; i < d.merges.size(); ++i) EXPECT_GE(d.merges[i].height, d.merges[i - 1].height);
  EXPECT_EQ(d.merges.back().size, 12u);
}

TEST(AverageLink, RecoversPlantedClusters) {
  Rng rng(10);
  std::vector<SemanticDescription> alphabet;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 3; ++i)
      alphabet.push_back(SemanticDescription::canonicalize(
          {{1 + 3 * c, 20 + i}, {2 + 3 * c, 40 + i}, {3 + 3 * c, 60 + i}}));
  std::vector<Genome> pop;
  std::vector<std::size_t> truth;
  for (int i = 0; i < 40; ++i) {
    const std::uint32_t c = i % 2;
    Genome g(1 + rng.index(3));
    for (auto& s : g) s = static_cast<std::uint32_t>(3 * c + rng.index(3));
    pop.push_back(g);
    truth.push_back(c);
  }
  const auto cs = average_link_genomes(pop, alphabet, 2);
  EXPECT_TRUE(same_partition(cs.labels, truth));
  EXPECT_EQ(cs.k_effective, 2u);
}

TEST(PhysicalComplexity, RecoversPlantedPureClusters) {
  SitePopulation p;
  p.alphabet_size = 6;
  std::vector<std::size_t> truth;
  for (int i = 0; i < 30; ++i) {
    p.sequences.push_back(i % 2 ? Genome{0, 1, 2} : Genome{3, 4, 5});
    truth.push_back(i % 2);
  }
  const auto cs = physical_complexity_cluster(p, 2);
  EXPECT_TRUE(same_partition(cs.labels, truth));
  EXPECT_NEAR(cs.e_c, 1.0, 1e-12);
}

TEST(PhysicalComplexity, IdenticalSequencesShareOneCluster) {
  SitePopulation p;
  p.alphabet_size = 3;
  p.sequences.assign(12, Genome{0, 1, 2});
  const auto cs = physical_complexity_cluster(p, 2);
  EXPECT_EQ(cs.k_effective, 1u);
  EXPECT_EQ(cs.labels, std::vector<std::size_t>(12, 0));
}

TEST(PhysicalComplexity, ReportedEfficiencyUsesNonEmptyClusters) {
  Rng rng(14);
  for (int t = 0; t < 200; ++t) {
    SitePopulation p;
    p.alphabet_size = 2 + rng.index(3);
    for (std::size_t i = 0; i < 6 + rng.index(30); ++i) {
      Genome g(1 + rng.index(5));
      for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(p.alphabet_size));
      p.sequences.push_back(g);
    }
    const auto cs = physical_complexity_cluster(p, 3);
    ASSERT_GE(cs.k_effective, 1u);
    ASSERT_LE(cs.k_effective, 3u);
    EXPECT_NEAR(cs.e_c, efficiency_ec(p, cs.labels, cs.k_effective), 1e-12);
  }
}

// One linear pass is not optimal in general; this pins that it never
// beats the exhaustive optimum and stays close on cores plus noise.
TEST(PhysicalComplexity, GreedyAgainstExhaustiveOptimum) {
  Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    SitePopulation p;
    p.alphabet_size = 2;
    const bool cores = t % 2 == 0;
    const std::size_t n = cores ? 8 : 2 + rng.index(7);
    for (std::size_t i = 0; i < n; ++i) {
      Genome g(1 + rng.index(4));
      for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(2));
      if (cores && i < 6) g = i % 2 ? Genome{0, 0, 1} : Genome{1, 1, 0};
      p.sequences.push_back(g);
    }
    double best = 0.0;
    std::vector<std::size_t> labels(n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1;
      best = std::max(best, pc_objective(p, labels, 2));
    }
    const double got = pc_objective(p, physical_complexity_cluster(p, 2).labels, 2);
    EXPECT_LE(got, best + 1e-12);
    if (cores) EXPECT_GE(got, 0.95 * best - 1e-12) << "t=" << t;
  }
}
