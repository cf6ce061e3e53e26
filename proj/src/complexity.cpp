#include "digeco/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace digeco {

namespace {

double entropy_of_counts(const std::uint32_t* counts, std::size_t alphabet, std::size_t total) {
  if (total == 0 || alphabet < 2) return 0.0;
  double h = 0.0;
  const double n = static_cast<double>(total);
  for (std::size_t d = 0; d < alphabet; ++d) {
    if (counts[d] == 0) continue;
    const double p = counts[d] / n;
    h -= p * std::log(p);
  }
  h /= std::log(static_cast<double>(alphabet));
  return std::clamp(h, 0.0, 1.0);
}

double site_entropy_raw(const SitePopulation& pop, std::size_t i, std::vector<std::uint32_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0u);
  std::size_t total = 0;
  for (const auto& s : pop.sequences) {
    if (s.size() < i) continue;
    ++counts[s[i - 1]];
    ++total;
  }
  return entropy_of_counts(counts.data(), pop.alphabet_size, total);
}

// Largest ell in [1, ell_max] with ss(ell) >= |D| ell / |T|, given ss as a
// function of ell. Written as ss * |T| >= |D| * ell to stay in integers.
template <class SampleSize>
std::size_t effective_length(std::size_t ell_max, std::size_t alphabet, std::size_t clusters,
                             SampleSize ss) {
  for (std::size_t ell = ell_max; ell >= 1; --ell)
    if (ss(ell) * clusters >= alphabet * ell) return ell;
  return 0;
}

}  // namespace

std::size_t SitePopulation::max_length() const {
  std::size_t m = 0;
  for (const auto& s : sequences) m = std::max(m, s.size());
  return m;
}

std::size_t sample_size(const SitePopulation& pop, std::size_t ell) {
  return static_cast<std::size_t>(std::count_if(pop.sequences.begin(), pop.sequences.end(),
                                                [ell](const Genome& g) { return g.size() >= ell; }));
}

std::size_t ell_v(const SitePopulation& pop, std::size_t clusters) {
  const std::size_t lmax = pop.max_length();
  std::vector<std::size_t> ss(lmax + 2, 0);
  for (const auto& s : pop.sequences) ++ss[s.size()];
  for (std::size_t l = lmax; l >= 1; --l) ss[l - 1] += ss[l];
  return effective_length(lmax, pop.alphabet_size, std::max<std::size_t>(clusters, 1),
                          [&](std::size_t l) { return ss[l]; });
}

double per_site_entropy(const SitePopulation& pop, std::size_t i) {
  const std::size_t lv = ell_v(pop, 1);
  if (i < 1 || i > lv)
    throw Error(Errc::SiteOutOfRange,
                "site " + std::to_string(i) + " outside [1," + std::to_string(lv) + "]");
  std::vector<std::uint32_t> counts(pop.alphabet_size);
  return site_entropy_raw(pop, i, counts);
}

std::vector<double> site_entropies_serial(const SitePopulation& pop, std::size_t upto) {
  std::vector<double> out(upto);
  std::vector<std::uint32_t> counts(pop.alphabet_size);
  for (std::size_t i = 1; i <= upto; ++i) out[i - 1] = site_entropy_raw(pop, i, counts);
  return out;
}

std::vector<double> site_entropies(const SitePopulation& pop, std::size_t upto) {
  std::vector<double> out(upto);
  const auto n = static_cast<std::int64_t>(upto);
#pragma omp parallel
  {
    std::vector<std::uint32_t> counts(pop.alphabet_size);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = site_entropy_raw(pop, static_cast<std::size_t>(i) + 1, counts);
  }
  return out;
}

ComplexityReport complexity_cv(const SitePopulation& pop, std::size_t clusters) {
  ComplexityReport r;
  r.ell_v = ell_v(pop, clusters);
  if (r.ell_v == 0) throw Error(Errc::DegeneratePopulation, "population has no effective site");
  r.per_site_entropy = site_entropies(pop, r.ell_v);
  double sum = 0.0;
  for (double h : r.per_site_entropy) sum += h;
  r.c_v = static_cast<double>(r.ell_v) - sum;
  r.efficiency = r.c_v / static_cast<double>(r.ell_v);
  return r;
}

double clustering_coefficient_target(std::size_t alphabet_size, std::size_t clusters) {
  if (alphabet_size < 2 || clusters < 1)
    throw Error(Errc::InvalidArgument, "needs |D| >= 2 and |T| >= 1");
  return 1.0 - std::log(static_cast<double>(clusters)) / std::log(static_cast<double>(alphabet_size));
}

double efficiency_ec(const SitePopulation& pop, const std::vector<std::size_t>& labels, std::size_t k) {
  if (labels.size() != pop.sequences.size())
    throw Error(Errc::InvalidArgument, "one label per sequence required");
  if (k <= 1) return complexity_cv(pop, 1).efficiency;
  std::vector<SiteCounts> groups(k, SiteCounts(pop.alphabet_size));
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] >= k) throw Error(Errc::InvalidArgument, "label outside [0,k)");
    groups[labels[s]].add(pop.sequences[s]);
  }
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (groups[c].size() == 0) throw Error(Errc::EmptyCluster, "cluster " + std::to_string(c) + " is empty");
    total += groups[c].efficiency(k);
  }
  return total / static_cast<double>(k);
}

void SiteCounts::add(const Genome& g) {
  if (g.size() >= len_hist_.size()) len_hist_.resize(g.size() + 1, 0);
  ++len_hist_[g.size()];
  if (g.size() > counts_.size()) counts_.resize(g.size(), std::vector<std::uint32_t>(alphabet_, 0));
  for (std::size_t i = 0; i < g.size(); ++i) ++counts_[i][g[i]];
  ++n_;
}

void SiteCounts::remove(const Genome& g) {
  --len_hist_[g.size()];
  for (std::size_t i = 0; i < g.size(); ++i) --counts_[i][g[i]];
  --n_;
}

std::size_t SiteCounts::ell_v(std::size_t clusters) const {
  std::size_t lmax = len_hist_.empty() ? 0 : len_hist_.size() - 1;
  while (lmax > 0 && len_hist_[lmax] == 0) --lmax;
  std::vector<std::size_t> ss(lmax + 2, 0);
  for (std::size_t l = 1; l <= lmax; ++l) ss[l] = len_hist_[l];
  for (std::size_t l = lmax; l >= 1; --l) ss[l - 1] += ss[l];
  return effective_length(lmax, alphabet_, std::max<std::size_t>(clusters, 1),
                          [&](std::size_t l) { return ss[l]; });
}

double SiteCounts::efficiency(std::size_t clusters) const {
  const std::size_t lv = ell_v(clusters);
  if (lv == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < lv; ++i) {
    std::size_t total = 0;
    for (auto c : counts_[i]) total += c;
    sum += entropy_of_counts(counts_[i].data(), alphabet_, total);
  }
  return (static_cast<double>(lv) - sum) / static_cast<double>(lv);
}

}  // namespace digeco
