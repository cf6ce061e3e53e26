#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "digeco/evolution.hpp"
#include "digeco/experiments.hpp"
#include "digeco/rng.hpp"

using namespace digeco;

namespace {
SemanticDescription desc(std::vector<AttributeTuple> t) { return SemanticDescription::canonicalize(std::move(t)); }
}  // namespace

TEST(Stats, WelchAgainstReferenceValues) {
  // Reference values from an independent statistics package.
  std::vector<double> a = {1, 2, 3, 4, 5.5}, b = {2, 4, 6, 8, 10, 12};
  auto w = welch_t_test(a, b);
  EXPECT_NEAR(w.t, -2.2732378711929924, 1e-10);
  EXPECT_NEAR(w.df, 7.329815811924632, 1e-9);
  EXPECT_NEAR(w.p_two_sided, 0.0555488934131826, 1e-8);
  std::vector<double> one = {1};
  EXPECT_THROW(welch_t_test(one, b), Error);
}

TEST(Stats, ChiSquared) {
  std::vector<double> o = {10, 20, 30}, e = {10, 20, 30};
  auto c = chi_squared(o, e, 2);
  EXPECT_EQ(c.statistic, 0.0);
  EXPECT_TRUE(c.below_critical);
  std::vector<double> o2 = {12, 18, 30};
  EXPECT_NEAR(chi_squared(o2, e, 2).statistic, 4.0 / 10 + 4.0 / 20, 1e-15);
  std::vector<double> short_e = {1, 2};
  try {
    chi_squared(o, short_e, 1);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::BinMismatch);
  }
  std::vector<double> zero = {0, 1, 2};
  EXPECT_THROW(chi_squared(o, zero, 2), Error);
  EXPECT_THROW(chi_squared(o, e, 0), Error);
}

TEST(Stats, ChiSquaredCriticalPoints) {
  EXPECT_DOUBLE_EQ(chi_squared_critical(16), 7.962);
  EXPECT_DOUBLE_EQ(chi_squared_critical(10), 3.940);
  EXPECT_NEAR(chi_squared_critical(5), 1.1454762260617692, 1e-9);
  std::vector<double> o = {4, 6, 2, 8, 5, 5}, e(6, 5.0);
  EXPECT_NEAR(chi_squared(o, e, 5).p_value, 0.5494159513527802, 1e-9);  // statistic 4.0
}

TEST(Stats, TotalVariationAndExpectedCounts) {
  std::vector<double> a = {1, 1, 0}, b = {0, 2, 2};
  EXPECT_NEAR(total_variation(a, b), 0.5, 1e-15);
  EXPECT_EQ(total_variation(a, a), 0.0);
  std::vector<double> p = {0.25, 0.75};
  EXPECT_EQ(expected_counts(p, 8.0), (std::vector<double>{2.0, 6.0}));
}

TEST(Stats, SpearmanAndLeastSquares) {
  std::vector<double> x = {1, 2, 3, 4, 5, 6}, y = {2, 1, 4, 3, 6, 5};
  EXPECT_NEAR(spearman(x, y), 0.8285714285714287, 1e-12);
  std::vector<double> tx = {1, 2, 2, 3}, ty = {1, 3, 2, 4};
  EXPECT_NEAR(spearman(tx, ty), 0.9486832980505139, 1e-12);
  std::vector<double> lx = {1, 2, 3, 4}, ly = {3, 5, 7, 9};
  auto f = least_squares(lx, ly);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_NEAR(mean(lx), 2.5, 1e-15);
  EXPECT_NEAR(sample_stddev(lx), std::sqrt(5.0 / 3.0), 1e-12);
}

TEST(Species, SingleLinkageChains) {
  // 10-28 and 28-46 are within the threshold, 10-46 is not.
  std::vector<SemanticDescription> items = {desc({{1, 10}}), desc({{1, 90}}), desc({{1, 28}}), desc({{1, 46}})};
  auto p = species_partition(items);
  EXPECT_EQ(p.count, 2u);
  EXPECT_EQ(p.labels, (std::vector<std::size_t>{0, 1, 0, 0}));
  auto shares = relative_abundance(p);
  EXPECT_EQ(shares, (std::vector<double>{0.75, 0.25}));
}

TEST(Species, CountFallsAsThresholdGrows) {
  Rng rng(3);
  std::vector<SemanticDescription> items;
  for (int i = 0; i < 60; ++i) {
    std::vector<AttributeTuple> t(3);
    for (auto& x : t) x = {static_cast<int>(1 + rng.index(4)), static_cast<int>(1 + rng.index(100))};
    items.push_back(desc(t));
  }
  std::size_t prev = items.size() + 1;
  for (double th : {0.0, 0.05, 0.1, 0.2, 0.4, 1.0}) {
    auto p = species_partition(items, th);
    EXPECT_LE(p.count, prev);
    prev = p.count;
    auto s = relative_abundance(p);
    EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 1.0, 1e-12);
    EXPECT_TRUE(std::is_sorted(s.rbegin(), s.rend()));
  }
  EXPECT_EQ(prev, 1u);
}

TEST(Windows, MeansPerWindow) {
  std::vector<double> t = {1, 0, 0.5, 0.5, 1, 1};
  EXPECT_EQ(windowed_rates(t, 2), (std::vector<double>{50.0, 50.0, 100.0}));
}

TEST(ClusterSetupTest, KeysSolveTheirOwnObjective) {
  for (int keys = 1; keys <= 6; ++keys) {
    auto s = two_cluster_setup(keys);
    EXPECT_EQ(s.alphabet.size(), 15u);
    ASSERT_EQ(s.objectives.size(), 2u);
    for (int o = 0; o < 2; ++o) {
      Genome g;
      for (int k = 0; k < keys; ++k) g.push_back(static_cast<std::uint32_t>(o * keys + k));
      EXPECT_EQ(FitnessModel(s.alphabet, s.objectives[o]).fitness(g), 1.0) << keys;
      EXPECT_LT(FitnessModel(s.alphabet, s.objectives[1 - o]).fitness(g), 1.0);
    }
  }
  EXPECT_THROW(two_cluster_setup(0), Error);
  EXPECT_THROW(two_cluster_setup(7), Error);
}

TEST(Filter, RendersTheTravelExample) {
  auto t = SemanticFilterTable::load(DIGECO_SOURCE_DIR "/data/travel_filter.txt");
  EXPECT_EQ(t.render(AttributeTuple{1, 25}), "(Business, Airline)");
  auto d = desc({{1, 25}, {2, 35}, {3, 55}, {4, 6}, {5, 37}, {6, 12}});
  EXPECT_EQ(t.render(d),
            "{(Business, Airline), (Company, British Midland), (Quality, Economy), (Cost, 60), "
            "(Depart, Edinburgh), (Arrive, London)}");
}

TEST(Filter, ParsingRulesAndErrors) {
  std::istringstream in("# c\nattr 9 Colour\nvalue 9 1 10 Red\nscale 9 3\n");
  auto t = SemanticFilterTable::parse(in);
  EXPECT_EQ(t.render(AttributeTuple{9, 5}), "(Colour, Red)");
  EXPECT_EQ(t.render(AttributeTuple{9, 11}), "(Colour, 33)");
  EXPECT_EQ(t.render(AttributeTuple{10, 4}), "(10, 4)");
  std::istringstream bad("value 1 x 2 Foo\n");
  EXPECT_THROW(SemanticFilterTable::parse(bad), Error);
  std::istringstream unknown("colour 1 Red\n");
  EXPECT_THROW(SemanticFilterTable::parse(unknown), Error);
}
