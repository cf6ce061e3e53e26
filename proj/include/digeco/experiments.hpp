#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "digeco/augment.hpp"
#include "digeco/complexity.hpp"
#include "digeco/distribution.hpp"
#include "digeco/ecosystem.hpp"
#include "digeco/evolution.hpp"

namespace digeco {

// ---- statistics ----------------------------------------------------------

struct ChiSquared {
  double statistic = 0.0;
  std::size_t df = 0;
  double critical = 0.0;  // lower-tail 5% point, the value the comparison uses
  bool below_critical = false;
  double p_value = 1.0;   // upper tail
};

// Lower-tail 5% point of chi-squared with df degrees of freedom; 7.962 at
// df 16 and 3.940 at df 10 as rounded constants, Boost otherwise.
double chi_squared_critical(std::size_t df);

// Sum (O-E)^2/E. Throws BinMismatch on unequal lengths, InvalidArgument when
// an expected bin is not positive or df is 0.
ChiSquared chi_squared(std::span<const double> observed, std::span<const double> expected, std::size_t df);

// Expected counts: pmf scaled to the observed total.
std::vector<double> expected_counts(std::span<const double> pmf, double total);

// Half the L1 distance between two histograms after normalising each.
double total_variation(std::span<const double> a, std::span<const double> b);

struct WelchTest {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
};
// Throws InvalidArgument when either sample has fewer than two values.
WelchTest welch_t_test(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> x);
double sample_stddev(std::span<const double> x);
// Average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// ---- species -------------------------------------------------------------

// labels[i] is the species of item i, numbered by first appearance.
struct SpeciesPartition {
  std::vector<std::size_t> labels;
  std::size_t count = 0;
};

// Single linkage: two items share a species when a chain of pairs each
// differing by at most `threshold` joins them.
SpeciesPartition species_partition(std::span<const SemanticDescription> items,
                                   double threshold = kSimilarityThreshold);
// Over every agent copy in the network.
SpeciesPartition species_partition(const HabitatNetwork& net, double threshold = kSimilarityThreshold);

// Species shares, largest first; they sum to 1.
std::vector<double> relative_abundance(const SpeciesPartition& p);

struct SpeciesAreaPoint {
  std::size_t habitats = 0;
  double mean_species = 0.0;
};
struct SpeciesArea {
  std::vector<SpeciesAreaPoint> points;
  LinearFit log_fit;  // log10 species against log10 habitats
};
// For n = 1..|habitats|, the mean number of species found over `resamples`
// random sets of n habitats, species taken from the partition of the whole
// network.
SpeciesArea species_area(const HabitatNetwork& net, Rng& rng, std::size_t resamples = 10,
                         double threshold = kSimilarityThreshold);

// ---- semantic filter -----------------------------------------------------

// Lines of the form
//   attr  <id> <label>
//   value <id> <lo> <hi> <label>
//   scale <id> <factor>      numeric values shown multiplied
// with '#' comments. Labels run to the end of the line; a value label wins
// over a scale.
class SemanticFilterTable {
 public:
  static SemanticFilterTable parse(std::istream& in);  // throws Error(Config)
  static SemanticFilterTable load(const std::string& path);

  void add_attribute(int id, std::string label);
  void add_value(int id, int lo, int hi, std::string label);
  void add_scale(int id, int factor);
  bool empty() const { return attrs_.empty() && values_.empty() && scales_.empty(); }

  // "(Label, Value-label)" per tuple; unmapped parts stay numeric.
  std::string render(const AttributeTuple& t) const;
  std::string render(const SemanticDescription& d) const;
  std::string render(const UserRequest& r) const;

 private:
  struct Range {
    int lo, hi;
    std::string label;
  };
  std::map<int, std::string> attrs_;
  std::map<int, std::vector<Range>> values_;
  std::map<int, int> scales_;
};

// ---- evolving populations with clusters ----------------------------------

// Alphabet and objectives of the population experiments with clusters.
struct ClusterSetup {
  std::vector<SemanticDescription> alphabet;
  std::vector<UserRequest> objectives;
};
// 15 agents, two objectives. Each objective is met exactly by its own
// `keys` agents; the rest are near misses spanning two required attributes.
ClusterSetup two_cluster_setup(int keys = 4);

struct ComplexityPoint {
  int generation = 0;
  double max_fitness = 0.0;
  std::size_t ell_v = 0;
  double c_v = 0.0;
  double efficiency = 0.0;   // whole population
  double efficiency_c = 0.0; // PC clustering with k = objectives
};
// One population run for `horizon` generations, measured every `every`.
std::vector<ComplexityPoint> complexity_trace(const ClusterSetup& setup, EvolutionParams params, int horizon,
                                              int every, Rng rng);

// Generation at which every objective first has an exact solution, or
// horizon + 1 if that never happens.
int generations_to_optima(const ClusterSetup& setup, EvolutionParams params, const CatalystConfig& catalyst,
                          int horizon, Rng rng);

// ---- ecosystem measurements ----------------------------------------------

// Lengths of every stored agent-sequence in the network, binned onto
// [lo, hi]; longer ones count in the last bin.
std::vector<double> sequence_length_histogram(const HabitatNetwork& net, int lo, int hi);

// Mean of `trace` over consecutive windows of `window` events, as percentages.
std::vector<double> windowed_rates(std::span<const double> trace, std::size_t window);

}  // namespace digeco
