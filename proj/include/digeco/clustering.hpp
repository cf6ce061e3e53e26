#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "digeco/complexity.hpp"
#include "digeco/core.hpp"
#include "digeco/evolution.hpp"

namespace digeco {

// Sum over the tuples of b of the closest same-id value in a (100 if none).
long directed_distance(std::span<const AttributeTuple> a, std::span<const AttributeTuple> b);
// max of both directions.
long sequence_distance(std::span<const AttributeTuple> a, std::span<const AttributeTuple> b);
long sequence_distance(const AgentSequence& a, const AgentSequence& b);

// All tuples of a genome's agents, in sequence order.
std::vector<AttributeTuple> genome_tuples(const Genome& g, std::span<const SemanticDescription> alphabet);

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// Pairwise symmetrised distances. Rows are split across OpenMP threads; the
// serial version is the reference.
DistanceMatrix distance_matrix(const std::vector<std::vector<AttributeTuple>>& items);
DistanceMatrix distance_matrix_serial(const std::vector<std::vector<AttributeTuple>>& items);

struct Merge {
  std::size_t a = 0;  // cluster ids: the lowest original index in each cluster
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<Merge> merges;
  std::vector<std::size_t> labels;  // cut result, clusters numbered by lowest member
  std::size_t k = 0;
};

// Average-link agglomeration down to k clusters. `weights` gives the number
// of identical members each row stands for (defaults to 1). Ties go to the
// lowest (i,j) pair.
Dendrogram average_link(const DistanceMatrix& m, std::size_t k,
                        std::span<const std::size_t> weights = {});
ClusterSet average_link_cluster(const DistanceMatrix& m, std::size_t k);

// Average-link over genomes. Sequences with equal tuple sets sit at distance
// 0, so they are merged up front and the agglomeration runs on the groups.
ClusterSet average_link_genomes(std::span<const Genome> pop, std::span<const SemanticDescription> alphabet,
                                std::size_t k);

// Greedy assignment maximising E_c; see README for the ordering rule.
ClusterSet physical_complexity_cluster(const SitePopulation& pop, std::size_t k);

// The objective used by the greedy algorithm: sum of non-empty cluster
// efficiencies over k (empty clusters count 0), |T| = k.
double pc_objective(const SitePopulation& pop, const std::vector<std::size_t>& labels, std::size_t k);

}  // namespace digeco
