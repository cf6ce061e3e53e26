#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "digeco/evolution.hpp"

namespace digeco {

inline constexpr double kFitnessTolerance = 1e-9;

// Occupancy of the two tracked macro-states in one generation. The flags can
// both be set; cell() maps them onto the partition {max, half\max, other}.
struct MacroFlags {
  bool max = false;
  bool half = false;

  enum Cell { Max = 0, Half = 1, Other = 2 };
  Cell cell() const { return max ? Max : (half ? Half : Other); }
};

MacroFlags classify_generation(std::span<const double> fitness, double global_max = 1.0,
                               double tol = kFitnessTolerance);

using OccupationTrace = std::vector<MacroFlags>;  // index = generation

struct OccupationProbabilities {
  std::vector<double> p_max;    // runs with an optimal individual
  std::vector<double> p_half;   // runs with a half-fitness individual and no optimal one
  std::vector<double> p_other;
};

// Fraction of runs in each partition cell per generation. Throws
// InvalidArgument on no runs or unequal horizons.
OccupationProbabilities occupation_probabilities(std::span<const OccupationTrace> runs);

// -sum p log_N p. Throws NotADistribution unless p is non-negative and sums to 1.
double degree_of_instability(std::span<const double> p, std::size_t n_states);

struct StabilityReport {
  std::vector<double> p_hat;  // partition cell probabilities at the horizon
  double d_ins = 0.0;
};
StabilityReport stability_at(const OccupationProbabilities& occ, std::size_t generation);

// Fixed request + alphabet for the stability experiments.
struct StabilitySetup {
  std::vector<SemanticDescription> alphabet;
  UserRequest request;
};
// 20 agents; optimal sequences need four of them, lone agents score < 0.5.
StabilitySetup default_stability_setup();

// Runs `runs` populations for `horizon` generations with no early stop.
std::vector<OccupationTrace> stability_runs(const StabilitySetup& setup, EvolutionParams params,
                                            int horizon, std::size_t runs, std::uint64_t seed);

struct GridCell {
  double mutation = 0.0;
  double crossover = 0.0;
  double d_ins = 0.0;
  std::vector<double> p_hat;
};
std::vector<GridCell> stability_grid(const StabilitySetup& setup, EvolutionParams base,
                                     std::span<const double> mutations,
                                     std::span<const double> crossovers, std::size_t runs_per_cell,
                                     int horizon, std::uint64_t seed);

std::string occupation_csv(const OccupationProbabilities& occ);

}  // namespace digeco
