#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "digeco/evolution.hpp"

namespace digeco {

// A population of variable-length symbol sequences over an alphabet of
// size `alphabet_size`.
struct SitePopulation {
  std::vector<Genome> sequences;
  std::size_t alphabet_size = 2;

  std::size_t max_length() const;
};

struct ComplexityReport {
  std::size_t ell_v = 0;
  std::vector<double> per_site_entropy;  // sites 1..ell_v, stored 0-based
  double c_v = 0.0;
  double efficiency = 0.0;
};

// Number of sequences with length >= ell.
std::size_t sample_size(const SitePopulation& pop, std::size_t ell);

// Effective length: the largest ell with sampleSize(ell) >= |D|*ell/|T|, or 0.
std::size_t ell_v(const SitePopulation& pop, std::size_t clusters = 1);

// -sum p log_|D| p over sequences long enough to have site i (1-based).
// Throws SiteOutOfRange unless 1 <= i <= ell_v(pop).
double per_site_entropy(const SitePopulation& pop, std::size_t i);

// Entropies of sites 1..upto (0-based output). The OpenMP version splits the
// sites across threads; the serial one is kept as the reference.
std::vector<double> site_entropies(const SitePopulation& pop, std::size_t upto);
std::vector<double> site_entropies_serial(const SitePopulation& pop, std::size_t upto);

// C_V = ell_V - sum H_V(i), E = C_V / ell_V. Throws DegeneratePopulation if ell_V = 0.
ComplexityReport complexity_cv(const SitePopulation& pop, std::size_t clusters = 1);

// 1 - log_|D| |T|
double clustering_coefficient_target(std::size_t alphabet_size, std::size_t clusters);

struct ClusterSet {
  std::vector<std::size_t> labels;  // cluster index per sequence
  std::size_t k = 1;
  std::size_t k_effective = 0;      // non-empty clusters
  std::vector<double> efficiency;   // per cluster, empty ones 0
  double e_c = 0.0;
};

// Mean of per-cluster Efficiency, each cluster using ell_V with |T| = k.
// k = 1 gives the whole-population E. A cluster too small to have any
// effective site contributes 0. Throws EmptyCluster if a label is unused.
double efficiency_ec(const SitePopulation& pop, const std::vector<std::size_t>& labels, std::size_t k);

// Incremental per-site symbol counts for one group of sequences.
class SiteCounts {
 public:
  explicit SiteCounts(std::size_t alphabet_size) : alphabet_(alphabet_size) {}
  void add(const Genome& g);
  void remove(const Genome& g);
  std::size_t size() const { return n_; }
  // Efficiency of the group under the |T|-aware effective length; 0 if the
  // group has no effective site.
  double efficiency(std::size_t clusters) const;
  std::size_t ell_v(std::size_t clusters) const;

 private:
  std::size_t alphabet_;
  std::size_t n_ = 0;
  std::vector<std::uint32_t> len_hist_;             // len_hist_[l] = sequences of length l
  std::vector<std::vector<std::uint32_t>> counts_;  // counts_[site][symbol]
};

}  // namespace digeco
