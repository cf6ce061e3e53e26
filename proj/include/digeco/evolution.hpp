#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "digeco/core.hpp"
#include "digeco/rng.hpp"

namespace digeco {

struct EvolutionParams {
  double crossover_rate = 0.10;
  double mutation_rate = 0.10;
  double pop_size_factor = 1.29;
  int max_generations = 1000;
  int stall_generations = 50;  // 0 disables stall detection
  int min_population = 10;
  int initial_max_length = 1;  // random seeds get a length in [1, this]
  bool stop_at_optimum = true;
};

// Symbol indices into a Population's alphabet.
using Genome = std::vector<std::uint32_t>;

// fitness = 1 / (1 + total mismatch). For each required tuple the closest
// value among sequence tuples with the same id counts; no such tuple costs 100.
double fitness(const AgentSequence& seq, const UserRequest& req);
double fitness_from_mismatch(long mismatch);
double effective_fitness(double fitness, std::size_t len, double mean_len);

// Precomputed per-symbol costs for one request, so a genome is scored in
// O(len * required) without touching descriptions.
class FitnessModel {
 public:
  FitnessModel(std::span<const SemanticDescription> alphabet, const UserRequest& req);
  long mismatch(std::span<const std::uint32_t> genome) const;
  double fitness(std::span<const std::uint32_t> genome) const {
    return fitness_from_mismatch(mismatch(genome));
  }
  std::size_t required() const { return required_; }

 private:
  std::size_t required_ = 0;
  std::vector<std::uint8_t> cost_;  // symbol-major, required_ entries per symbol
};

struct FitnessReport {
  std::vector<double> fitness;  // raw fitness per individual
  double max_fitness = 0.0;
  double avg_fitness = 0.0;
  double mean_length = 0.0;
};

// Roulette-wheel draws with replacement; weights must be positive.
std::vector<std::size_t> select(std::span<const double> weights, std::size_t count, Rng& rng);

// One-point crossover with a shared cut in [1, min(len)-1].
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, Rng& rng);

enum class MutationKind { Insert, Replace, Delete };
void mutate(Genome& g, std::size_t alphabet_size, Rng& rng);
void mutate(Genome& g, std::size_t alphabet_size, MutationKind kind, Rng& rng);

using PairList = std::vector<std::pair<std::size_t, std::size_t>>;
// Chooses `pairs` disjoint parent pairs among the selected individuals.
using PairingStrategy =
    std::function<PairList(std::span<const Genome> individuals, std::size_t alphabet_size,
                           std::size_t pairs, Rng& rng)>;
PairList random_pairing(std::size_t population_size, std::size_t pairs, Rng& rng);

struct RunResult {
  Genome best;
  double best_fitness = 0.0;
  int generations_used = 0;
  std::vector<FitnessReport> trace;
};

class Population {
 public:
  // With more than one objective, raw fitness is the best over objectives and
  // selection splits the draws evenly across objectives (vector-evaluated).
  Population(std::vector<SemanticDescription> alphabet, std::vector<UserRequest> objectives,
             EvolutionParams params, Rng rng, std::vector<Genome> seeds = {});

  std::size_t alphabet_size() const { return alphabet_.size(); }
  const std::vector<SemanticDescription>& alphabet() const { return alphabet_; }
  const std::vector<Genome>& individuals() const { return individuals_; }
  const std::vector<double>& fitness() const { return fitness_; }
  const EvolutionParams& params() const { return params_; }
  int generation() const { return generation_; }
  double mean_length() const;
  std::size_t target_size() const;
  FitnessReport report() const;

  // evaluate -> select -> crossover -> mutate; returns the new generation's report.
  FitnessReport step_generation(const PairingStrategy* pairing = nullptr);

  Genome best() const;
  double best_fitness() const;

  // Optional hook called after initialisation and after every generation.
  using Observer = std::function<void(const Population&)>;
  RunResult run(const PairingStrategy* pairing = nullptr, const Observer& observer = {});

  // Test hook: replaces the individuals and re-evaluates them.
  void set_individuals(std::vector<Genome> individuals);

 private:
  void evaluate();
  double raw_fitness(const Genome& g, std::size_t objective) const;

  std::vector<SemanticDescription> alphabet_;
  std::vector<FitnessModel> models_;
  EvolutionParams params_;
  Rng rng_;
  int generation_ = 0;
  std::vector<Genome> individuals_;
  std::vector<double> fitness_;                    // best over objectives
  std::vector<std::vector<double>> per_objective_;  // only filled with >1 objective
};

}  // namespace digeco
