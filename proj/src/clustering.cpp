#include "digeco/clustering.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>

namespace digeco {

long directed_distance(std::span<const AttributeTuple> a, std::span<const AttributeTuple> b) {
  long total = 0;
  for (const auto& tb : b) {
    int best = kMaxComponent;
    for (const auto& ta : a)
      if (ta.id == tb.id) best = std::min(best, std::abs(ta.value - tb.value));
    total += best;
  }
  return total;
}

long sequence_distance(std::span<const AttributeTuple> a, std::span<const AttributeTuple> b) {
  return std::max(directed_distance(a, b), directed_distance(b, a));
}

long sequence_distance(const AgentSequence& a, const AgentSequence& b) {
  std::vector<AttributeTuple> ta, tb;
  for (const auto& s : a.agents) ta.insert(ta.end(), s->description.begin(), s->description.end());
  for (const auto& s : b.agents) tb.insert(tb.end(), s->description.begin(), s->description.end());
  return sequence_distance(ta, tb);
}

std::vector<AttributeTuple> genome_tuples(const Genome& g, std::span<const SemanticDescription> alphabet) {
  std::vector<AttributeTuple> out;
  for (auto s : g) out.insert(out.end(), alphabet[s].begin(), alphabet[s].end());
  return out;
}

DistanceMatrix distance_matrix_serial(const std::vector<std::vector<AttributeTuple>>& items) {
  DistanceMatrix m(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j)
      m.set(i, j, static_cast<double>(sequence_distance(items[i], items[j])));
  return m;
}

DistanceMatrix distance_matrix(const std::vector<std::vector<AttributeTuple>>& items) {
  DistanceMatrix m(items.size());
  const auto n = static_cast<std::int64_t>(items.size());
  // Each (i,j) cell is written by exactly one iteration.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j)
      m.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
            static_cast<double>(sequence_distance(items[static_cast<std::size_t>(i)],
                                                  items[static_cast<std::size_t>(j)])));
  return m;
}

Dendrogram average_link(const DistanceMatrix& m, std::size_t k, std::span<const std::size_t> weights) {
  const std::size_t n = m.size();
  if (k < 1 || k > n) throw Error(Errc::InvalidArgument, "average link needs 1 <= k <= n");
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = m(i, j);
  std::vector<std::size_t> size(n, 1), parent(n);
  if (!weights.empty()) std::copy(weights.begin(), weights.end(), size.begin());
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);

  Dendrogram out;
  out.k = k;
  while (active.size() > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t x = 0; x < active.size(); ++x)
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double v = d[active[x] * n + active[y]];
        if (v < best) {
          best = v;
          bi = x;
          bj = y;
        }
      }
    const std::size_t i = active[bi], j = active[bj];
    const double si = static_cast<double>(size[i]), sj = static_cast<double>(size[j]);
    for (auto o : active) {
      if (o == i || o == j) continue;
      const double v = (si * d[i * n + o] + sj * d[j * n + o]) / (si + sj);
      d[i * n + o] = v;
      d[o * n + i] = v;
    }
    size[i] += size[j];
    parent[j] = i;
    out.merges.push_back({i, j, best, size[i]});
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  out.labels.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t r = root(x);
    out.labels[x] = static_cast<std::size_t>(std::lower_bound(active.begin(), active.end(), r) - active.begin());
  }
  return out;
}

ClusterSet average_link_cluster(const DistanceMatrix& m, std::size_t k) {
  auto dg = average_link(m, k);
  ClusterSet c;
  c.labels = std::move(dg.labels);
  c.k = k;
  c.k_effective = k;
  return c;
}

ClusterSet average_link_genomes(std::span<const Genome> pop, std::span<const SemanticDescription> alphabet,
                                std::size_t k) {
  std::map<std::vector<AttributeTuple>, std::size_t> key_to_group;
  std::vector<std::size_t> group_of(pop.size());
  std::vector<std::vector<AttributeTuple>> reps;
  std::vector<std::size_t> weights;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    auto tuples = genome_tuples(pop[i], alphabet);
    auto key = tuples;
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    auto [it, inserted] = key_to_group.emplace(std::move(key), reps.size());
    if (inserted) {
      reps.push_back(std::move(tuples));
      weights.push_back(0);
    }
    group_of[i] = it->second;
    ++weights[it->second];
  }

  ClusterSet out;
  out.k = k;
  if (k > reps.size()) {
    // More clusters than distinct tuple sets: fall back to the full matrix.
    std::vector<std::vector<AttributeTuple>> all;
    for (const auto& g : pop) all.push_back(genome_tuples(g, alphabet));
    auto full = average_link_cluster(distance_matrix(all), k);
    return full;
  }
  auto dg = average_link(distance_matrix(reps), k, weights);
  out.labels.resize(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) out.labels[i] = dg.labels[group_of[i]];
  out.k_effective = k;
  return out;
}

double pc_objective(const SitePopulation& pop, const std::vector<std::size_t>& labels, std::size_t k) {
  std::vector<SiteCounts> groups(k, SiteCounts(pop.alphabet_size));
  for (std::size_t s = 0; s < labels.size(); ++s) groups[labels[s]].add(pop.sequences[s]);
  double total = 0.0;
  for (const auto& g : groups)
    if (g.size() > 0) total += g.efficiency(k);
  return total / static_cast<double>(k);
}

ClusterSet physical_complexity_cluster(const SitePopulation& pop, std::size_t k) {
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");
  const std::size_t n = pop.sequences.size();

  // Duplicate groups in first-occurrence order, then stably by size.
  std::map<Genome, std::size_t> index;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = index.emplace(pop.sequences[i], groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::vector<SiteCounts> clusters(k, SiteCounts(pop.alphabet_size));
  std::vector<double> eff(k, 0.0);
  std::vector<std::size_t> labels(n, 0);
  for (const auto& group : groups) {
    const Genome& g = pop.sequences[group.front()];
    std::size_t best_c = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      // Only cluster c changes, so compare the change in its efficiency.
      clusters[c].add(g);
      const double gain = clusters[c].efficiency(k) - eff[c];
      clusters[c].remove(g);
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best_c = c;
      }
    }
    for (auto i : group) {
      clusters[best_c].add(pop.sequences[i]);
      labels[i] = best_c;
    }
    eff[best_c] = clusters[best_c].efficiency(k);
  }

  // Compact away empty clusters.
  std::vector<std::size_t> remap(k, k);
  ClusterSet out;
  out.k = k;
  for (std::size_t i = 0; i < n; ++i) {
    if (remap[labels[i]] == k) remap[labels[i]] = out.k_effective++;
    labels[i] = remap[labels[i]];
  }
  out.labels = std::move(labels);
  if (n > 0 && out.k_effective >= 1) {
    std::vector<SiteCounts> final_groups(out.k_effective, SiteCounts(pop.alphabet_size));
    for (std::size_t i = 0; i < n; ++i) final_groups[out.labels[i]].add(pop.sequences[i]);
    for (const auto& fg : final_groups) out.efficiency.push_back(fg.efficiency(out.k_effective));
    out.e_c = std::accumulate(out.efficiency.begin(), out.efficiency.end(), 0.0) /
              static_cast<double>(out.k_effective);
  }
  return out;
}

}  // namespace digeco
