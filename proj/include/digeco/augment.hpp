#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "digeco/clustering.hpp"
#include "digeco/ecosystem.hpp"
#include "digeco/evolution.hpp"
#include "digeco/recognition.hpp"

namespace digeco {

enum class ClusterAlgorithm { AverageLink, PhysicalComplexity };
const char* cluster_algorithm_name(ClusterAlgorithm a);
ClusterAlgorithm parse_cluster_algorithm(const std::string& name);  // throws Error(Config)

struct CatalystConfig {
  bool enabled = false;
  ClusterAlgorithm algorithm = ClusterAlgorithm::PhysicalComplexity;
  std::size_t k = 2;
  double crossover_rate = 0.25;
};

ClusterSet cluster_genomes(std::span<const Genome> individuals,
                           std::span<const SemanticDescription> alphabet, ClusterAlgorithm algorithm,
                           std::size_t k);

// Disjoint parent pairs drawn inside clusters: the first parent is uniform
// over individuals whose cluster still has an unpaired partner, the second
// uniform within that cluster. With k = 1 this is a uniform random pairing.
PairList catalyst_pairing(std::span<const Genome> individuals, std::span<const SemanticDescription> alphabet,
                          const CatalystConfig& cfg, std::size_t pairs, Rng& rng);

// Pairing hook for Population::run; a disabled config gives random pairing.
PairingStrategy make_pairing(const CatalystConfig& cfg, std::vector<SemanticDescription> alphabet);

enum class RecognizerKind { Distance, Mlp };
enum class TargetingMode { Targeted, RandomControl };
const char* recognizer_name(RecognizerKind k);
RecognizerKind parse_recognizer(const std::string& name);  // throws Error(Config)
const char* targeting_name(TargetingMode m);
TargetingMode parse_targeting(const std::string& name);  // throws Error(Config)

struct TargetedMigrationConfig {
  bool enabled = false;
  RecognizerKind recognizer = RecognizerKind::Mlp;
  TargetingMode mode = TargetingMode::Targeted;
  MlpParams mlp;
  std::size_t interaction_cap = 0;  // pool members consulted; 0 = all
  bool online_learning = true;      // feed successful targeted copies back
};

// One recognizer per service, built on first use from a seed derived from
// the service id, so results do not depend on the order of requests.
class RecognizerBank {
 public:
  RecognizerBank(RecognizerKind kind, MlpParams mlp, std::uint64_t seed)
      : kind_(kind), mlp_(mlp), seed_(seed) {}

  Recognizer& get(const Service& s);
  // a's view of b, cached until a learns.
  bool similar(const Service& a, const Service& b);
  bool mutual(const Service& a, const Service& b) { return similar(a, b) && similar(b, a); }
  void learn(const Service& a, const SemanticDescription& other, bool positive);
  std::size_t built() const { return recognizers_.size(); }

 private:
  RecognizerKind kind_;
  MlpParams mlp_;
  std::uint64_t seed_;
  std::unordered_map<ServiceId, std::unique_ptr<Recognizer>> recognizers_;
  std::map<std::pair<ServiceId, ServiceId>, bool> cache_;
};

struct TargetedOutcome {
  std::optional<HabitatId> destination;
  std::vector<ServiceId> peers;  // mutually similar pool members consulted
};

// The agent of `service` at `at` meets the pool; mutually similar peers share
// their migration records. If the agent holds a targeted-migration credit it
// is copied to the unvisited habitat with the most peer-reported uses (ties
// to the lowest id), or, in the random control, to a uniformly drawn habitat
// it has not visited.
TargetedOutcome targeted_migrate(HabitatNetwork& net, ServiceId service, HabitatId at,
                                 const TargetedMigrationConfig& cfg, RecognizerBank& bank,
                                 const EcosystemParams& p, Rng& rng);

// Execution hook running targeted_migrate for every executed agent.
class TargetedMigration : public ExecutionHook {
 public:
  TargetedMigration(TargetedMigrationConfig cfg, std::uint64_t seed)
      : cfg_(cfg), bank_(cfg.recognizer, cfg.mlp, seed) {}

  void after_execution(HabitatNetwork& net, HabitatId at, std::span<const ServiceId> executed,
                       const EcosystemParams& p, Rng& rng) override;

  std::uint64_t executions() const { return executions_; }
  std::uint64_t migrations() const { return migrations_; }
  const RecognizerBank& bank() const { return bank_; }

 private:
  TargetedMigrationConfig cfg_;
  RecognizerBank bank_;
  std::uint64_t executions_ = 0;
  std::uint64_t migrations_ = 0;
  // Targeted copies awaiting their first use. A copy executed at its
  // destination teaches the migrating service that the peers were right; one
  // that is gone from it (death or escape) teaches the opposite.
  struct Pending {
    ServicePtr service;
    HabitatId destination = 0;
    std::vector<SemanticDescription> peers;
  };
  void settle(HabitatNetwork& net, HabitatId at, std::span<const ServiceId> executed);
  std::map<AgentId, Pending> pending_;
};

}  // namespace digeco
