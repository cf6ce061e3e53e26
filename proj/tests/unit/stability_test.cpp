#include <cmath>

#include <gtest/gtest.h>

#include "digeco/evolution.hpp"
#include "digeco/stability.hpp"

using namespace digeco;

TEST(MacroState, Classification) {
  std::vector<double> opt = {0.2, 1.0}, half = {0.5, 0.1}, both = {0.5, 1.0}, none = {0.3};
  EXPECT_EQ(classify_generation(opt).cell(), MacroFlags::Max);
  EXPECT_EQ(classify_generation(half).cell(), MacroFlags::Half);
  EXPECT_TRUE(classify_generation(both).half);
  EXPECT_EQ(classify_generation(both).cell(), MacroFlags::Max);
  EXPECT_EQ(classify_generation(none).cell(), MacroFlags::Other);
}

TEST(Instability, Oracles) {
  std::vector<double> certain = {1, 0, 0}, flat = {1 / 3.0, 1 / 3.0, 1 / 3.0}, split = {0.5, 0.5, 0};
  EXPECT_NEAR(degree_of_instability(certain, 3), 0.0, 1e-15);
  EXPECT_NEAR(degree_of_instability(flat, 3), 1.0, 1e-12);
  EXPECT_NEAR(degree_of_instability(split, 3), std::log(2.0) / std::log(3.0), 1e-12);
  std::vector<double> bad = {0.5, 0.6, 0}, neg = {1.2, -0.2, 0};
  EXPECT_THROW(degree_of_instability(bad, 3), Error);
  EXPECT_THROW(degree_of_instability(neg, 3), Error);
}

TEST(Occupation, FractionsOfRunsPartitionEachGeneration) {
  std::vector<OccupationTrace> runs = {
      {{false, false}, {false, true}, {true, false}},
      {{false, true}, {true, true}, {true, false}},
      {{false, false}, {false, false}, {false, true}},
      {{false, false}, {true, false}, {true, false}},
  };
  const auto occ = occupation_probabilities(runs);
  ASSERT_EQ(occ.p_max.size(), 3u);
  EXPECT_DOUBLE_EQ(occ.p_max[1], 0.5);
  EXPECT_DOUBLE_EQ(occ.p_half[1], 0.25);
  EXPECT_DOUBLE_EQ(occ.p_max[2], 0.75);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(occ.p_max[t] + occ.p_half[t] + occ.p_other[t], 1.0, 1e-15);
  const auto at = stability_at(occ, 2);
  EXPECT_NEAR(at.d_ins, degree_of_instability(std::vector<double>{0.75, 0.25, 0.0}, 3), 1e-12);
  std::vector<OccupationTrace> ragged = {{{}}, {{}, {}}};
  EXPECT_THROW(occupation_probabilities(ragged), Error);
  EXPECT_THROW(occupation_probabilities(std::span<const OccupationTrace>{}), Error);
}

TEST(StabilitySetupTest, TwentyAgentsAndNoLoneOptimum) {
  const auto s = default_stability_setup();
  EXPECT_EQ(s.alphabet.size(), 20u);
  FitnessModel m(s.alphabet, s.request);
  for (std::uint32_t i = 0; i < s.alphabet.size(); ++i) EXPECT_LT(m.fitness(Genome{i}), 0.5);
}

TEST(StabilityRuns, ShapeAndDeterminism) {
  const auto s = default_stability_setup();
  auto a = stability_runs(s, EvolutionParams{}, 50, 3, 99);
  auto b = stability_runs(s, EvolutionParams{}, 50, 3, 99);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    ASSERT_EQ(a[r].size(), b[r].size());
    for (std::size_t t = 0; t < a[r].size(); ++t) EXPECT_EQ(a[r][t].cell(), b[r][t].cell());
  }
}
