#include <memory>
#include <set>

#include <gtest/gtest.h>

#include "digeco/augment.hpp"
#include "digeco/experiments.hpp"

using namespace digeco;

namespace {

SemanticDescription desc(std::vector<AttributeTuple> t) { return SemanticDescription::canonicalize(std::move(t)); }

// Habitat 0 holds the migrating agent (service 1) and a look-alike peer
// (service 2) that has been used at habitats 2 and 3.
struct Fixture {
  HabitatNetwork net;
  EcosystemParams p;
  ServicePtr mover = std::make_shared<Service>(Service{1, desc({{1, 50}, {2, 50}, {3, 50}}), 0});
  ServicePtr peer = std::make_shared<Service>(Service{2, desc({{1, 52}, {2, 50}, {3, 50}}), 0});
  ServicePtr stranger = std::make_shared<Service>(Service{3, desc({{7, 5}, {8, 5}, {9, 5}}), 0});

  Fixture() {
    for (HabitatId i = 0; i < 5; ++i) net.habitats.push_back(Habitat{.id = i});
    Agent m = make_agent(net, mover, 0, p);
    m.targeted_migrations = 1;
    Agent q = make_agent(net, peer, 0, p);
    q.migration_history = {{0, 1}, {2, 5}, {3, 7}};
    Agent s = make_agent(net, stranger, 0, p);
    s.migration_history = {{0, 0}, {4, 50}};
    net.habitats[0].agents = {m, q, s};
  }
};

TargetedMigrationConfig distance_cfg() {
  TargetedMigrationConfig c;
  c.enabled = true;
  c.recognizer = RecognizerKind::Distance;
  return c;
}

}  // namespace

TEST(Targeted, GoesWhereSimilarPeersWereUsedMost) {
  Fixture f;
  RecognizerBank bank(RecognizerKind::Distance, MlpParams{}, 1);
  Rng rng(1);
  auto out = targeted_migrate(f.net, 1, 0, distance_cfg(), bank, f.p, rng);
  ASSERT_TRUE(out.destination);
  EXPECT_EQ(*out.destination, 3u);  // not 4: the stranger is not similar
  EXPECT_EQ(out.peers, std::vector<ServiceId>{2});
  EXPECT_EQ(f.net.at(0).find(1)->targeted_migrations, 0u);
  ASSERT_NE(f.net.at(3).find(1), nullptr);
  // No credit left: nothing moves.
  auto again = targeted_migrate(f.net, 1, 0, distance_cfg(), bank, f.p, rng);
  EXPECT_FALSE(again.destination);
}

TEST(Targeted, SkipsVisitedHabitats) {
  Fixture f;
  f.net.habitats[0].agents[0].migration_history.push_back({3, 0});
  RecognizerBank bank(RecognizerKind::Distance, MlpParams{}, 1);
  Rng rng(1);
  auto out = targeted_migrate(f.net, 1, 0, distance_cfg(), bank, f.p, rng);
  ASSERT_TRUE(out.destination);
  EXPECT_EQ(*out.destination, 2u);
}

TEST(Targeted, RandomControlOnlyPicksUnvisitedHabitats) {
  std::set<HabitatId> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Fixture f;
    f.net.habitats[0].agents[0].migration_history.push_back({2, 0});
    auto cfg = distance_cfg();
    cfg.mode = TargetingMode::RandomControl;
    RecognizerBank bank(RecognizerKind::Distance, MlpParams{}, 1);
    Rng rng(seed);
    auto out = targeted_migrate(f.net, 1, 0, cfg, bank, f.p, rng);
    ASSERT_TRUE(out.destination);
    EXPECT_NE(*out.destination, 0u);
    EXPECT_NE(*out.destination, 2u);
    seen.insert(*out.destination);
  }
  EXPECT_EQ(seen, (std::set<HabitatId>{1, 3, 4}));
}

TEST(Targeted, DisabledConfigDoesNothing) {
  Fixture f;
  TargetedMigrationConfig cfg;
  RecognizerBank bank(RecognizerKind::Distance, MlpParams{}, 1);
  Rng rng(1);
  EXPECT_FALSE(targeted_migrate(f.net, 1, 0, cfg, bank, f.p, rng).destination);
  EXPECT_EQ(f.net.agent_count(), 3u);
}

TEST(Targeted, EcosystemCopiesNeverRevisitAndSpendOnlyEarnedCredits) {
  EcosystemParams p;
  p.n_users = 20;
  p.n_communities = 4;
  p.catalogue_size = 40;
  p.evolution.max_generations = 40;
  for (auto mode : {TargetingMode::Targeted, TargetingMode::RandomControl}) {
    auto cfg = distance_cfg();
    cfg.mode = mode;
    TargetedMigration hook(cfg, 5);
    Ecosystem eco(p, 11, &hook);
    eco.run(60);
    EXPECT_LE(hook.migrations(), hook.executions());
    EXPECT_GT(hook.migrations(), 0u);
    std::size_t targeted_events = 0;
    for (const auto& e : eco.network().log.events()) targeted_events += e.kind == EventKind::Targeted;
    EXPECT_EQ(targeted_events, hook.migrations());
    for (const auto& h : eco.network().habitats)
      for (const auto& a : h.agents) {
        std::set<HabitatId> hist;
        for (const auto& r : a.migration_history) EXPECT_TRUE(hist.insert(r.habitat_id).second);
      }
  }
}

TEST(Catalyst, PairsStayInsideClustersAndAreDisjoint) {
  const auto setup = two_cluster_setup(4);
  Rng rng(2);
  std::vector<Genome> pop;
  for (int i = 0; i < 60; ++i) {
    Genome g(1 + rng.index(5));
    for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(setup.alphabet.size()));
    pop.push_back(g);
  }
  for (auto alg : {ClusterAlgorithm::AverageLink, ClusterAlgorithm::PhysicalComplexity}) {
    CatalystConfig cfg{true, alg, 2, 0.25};
    const auto cs = cluster_genomes(pop, setup.alphabet, alg, 2);
    auto pairs = catalyst_pairing(pop, setup.alphabet, cfg, 20, rng);
    EXPECT_FALSE(pairs.empty());
    std::set<std::size_t> used;
    for (auto [a, b] : pairs) {
      EXPECT_EQ(cs.labels[a], cs.labels[b]);
      EXPECT_TRUE(used.insert(a).second);
      EXPECT_TRUE(used.insert(b).second);
    }
  }
}

TEST(Catalyst, DisabledIsRandomPairing) {
  const auto setup = two_cluster_setup(4);
  std::vector<Genome> pop(30, Genome{0});
  CatalystConfig off;
  Rng a(9), b(9);
  EXPECT_EQ(catalyst_pairing(pop, setup.alphabet, off, 10, a), random_pairing(30, 10, b));
}

TEST(Catalyst, NamesRoundTrip) {
  for (auto a : {ClusterAlgorithm::AverageLink, ClusterAlgorithm::PhysicalComplexity})
    EXPECT_EQ(parse_cluster_algorithm(cluster_algorithm_name(a)), a);
  for (auto r : {RecognizerKind::Distance, RecognizerKind::Mlp}) EXPECT_EQ(parse_recognizer(recognizer_name(r)), r);
  for (auto m : {TargetingMode::Targeted, TargetingMode::RandomControl})
    EXPECT_EQ(parse_targeting(targeting_name(m)), m);
  EXPECT_THROW(parse_recognizer("svm"), Error);
}
