#include "digeco/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "digeco/clustering.hpp"

namespace digeco {

double chi_squared_critical(std::size_t df) {
  if (df == 0) throw Error(Errc::InvalidArgument, "df must be positive");
  if (df == 16) return 7.962;
  if (df == 10) return 3.940;
  return boost::math::quantile(boost::math::chi_squared(static_cast<double>(df)), 0.05);
}

ChiSquared chi_squared(std::span<const double> observed, std::span<const double> expected, std::size_t df) {
  if (observed.size() != expected.size())
    throw Error(Errc::BinMismatch, "observed and expected have different bin counts");
  ChiSquared out;
  out.df = df;
  out.critical = chi_squared_critical(df);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw Error(Errc::InvalidArgument, "expected counts must be positive");
    const double d = observed[i] - expected[i];
    out.statistic += d * d / expected[i];
  }
  out.below_critical = out.statistic < out.critical;
  out.p_value = boost::math::cdf(boost::math::complement(
      boost::math::chi_squared(static_cast<double>(df)), out.statistic));
  return out;
}

std::vector<double> expected_counts(std::span<const double> pmf, double total) {
  std::vector<double> e(pmf.begin(), pmf.end());
  for (auto& v : e) v *= total;
  return e;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::BinMismatch, "histograms have different bin counts");
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(sa > 0.0) || !(sb > 0.0)) throw Error(Errc::InvalidArgument, "empty histogram");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] / sa - b[i] / sb);
  return 0.5 * d;
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

WelchTest welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(Errc::InvalidArgument, "each sample needs two values");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double va = std::pow(sample_stddev(a), 2) / na, vb = std::pow(sample_stddev(b), 2) / nb;
  WelchTest out;
  const double se = std::sqrt(va + vb);
  const double diff = mean(a) - mean(b);
  if (se == 0.0) {
    out.t = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    out.df = na + nb - 2.0;
    out.p_two_sided = diff == 0.0 ? 1.0 : 0.0;
    return out;
  }
  out.t = diff / se;
  out.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  boost::math::students_t dist(out.df);
  out.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
  return out;
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return x[i] < x[j]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::InvalidArgument, "need two paired samples");
  const auto rx = ranks(x), ry = ranks(y);
  return pearson(rx, ry);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::InvalidArgument, "need two paired samples");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

SpeciesPartition species_partition(std::span<const SemanticDescription> items, double threshold) {
  // Identical descriptions are one node; the pairwise pass runs on distinct ones.
  std::map<SemanticDescription, std::size_t> index;
  std::vector<const SemanticDescription*> distinct;
  std::vector<std::size_t> node(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto [it, inserted] = index.emplace(items[i], distinct.size());
    if (inserted) distinct.push_back(&items[i]);
    node[i] = it->second;
  }
  UnionFind uf(distinct.size());
  for (std::size_t a = 0; a < distinct.size(); ++a)
    for (std::size_t b = a + 1; b < distinct.size(); ++b)
      if (description_difference(*distinct[a], *distinct[b]) <= threshold) uf.unite(a, b);

  SpeciesPartition out;
  out.labels.resize(items.size());
  std::map<std::size_t, std::size_t> number;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto [it, inserted] = number.emplace(uf.find(node[i]), number.size());
    out.labels[i] = it->second;
  }
  out.count = number.size();
  return out;
}

SpeciesPartition species_partition(const HabitatNetwork& net, double threshold) {
  std::vector<SemanticDescription> items;
  for (const auto& h : net.habitats)
    for (const auto& a : h.agents) items.push_back(a.description());
  return species_partition(items, threshold);
}

std::vector<double> relative_abundance(const SpeciesPartition& p) {
  std::vector<double> counts(p.count, 0.0);
  for (auto l : p.labels) counts[l] += 1.0;
  const double n = static_cast<double>(p.labels.size());
  for (auto& c : counts) c /= n;
  std::sort(counts.begin(), counts.end(), std::greater<>());
  return counts;
}

SpeciesArea species_area(const HabitatNetwork& net, Rng& rng, std::size_t resamples, double threshold) {
  const auto part = species_partition(net, threshold);
  std::vector<std::set<std::size_t>> present(net.habitats.size());
  std::size_t k = 0;
  for (std::size_t h = 0; h < net.habitats.size(); ++h)
    for (std::size_t a = 0; a < net.habitats[h].agents.size(); ++a) present[h].insert(part.labels[k++]);

  SpeciesArea out;
  std::vector<std::size_t> order(net.habitats.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> lx, ly;
  for (std::size_t n = 1; n <= net.habitats.size(); ++n) {
    double total = 0.0;
    for (std::size_t r = 0; r < resamples; ++r) {
      // Partial Fisher-Yates for a uniform n-subset.
      for (std::size_t i = 0; i < n; ++i) std::swap(order[i], order[i + rng.index(order.size() - i)]);
      std::set<std::size_t> seen;
      for (std::size_t i = 0; i < n; ++i) seen.insert(present[order[i]].begin(), present[order[i]].end());
      total += static_cast<double>(seen.size());
    }
    const double m = total / static_cast<double>(resamples);
    out.points.push_back({n, m});
    if (m > 0.0) {
      lx.push_back(std::log10(static_cast<double>(n)));
      ly.push_back(std::log10(m));
    }
  }
  if (lx.size() >= 2) out.log_fit = least_squares(lx, ly);
  return out;
}

SemanticFilterTable SemanticFilterTable::parse(std::istream& in) {
  SemanticFilterTable t;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw Error(Errc::Config, "filter table line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    auto rest = [&] {
      std::string label;
      std::getline(ls >> std::ws, label);
      while (!label.empty() && std::isspace(static_cast<unsigned char>(label.back()))) label.pop_back();
      if (label.empty()) fail("missing label");
      return label;
    };
    if (kind == "attr") {
      int id;
      if (!(ls >> id)) fail("expected an attribute id");
      t.add_attribute(id, rest());
    } else if (kind == "value") {
      int id, lo, hi;
      if (!(ls >> id >> lo >> hi)) fail("expected id, lo and hi");
      if (lo > hi) fail("lo exceeds hi");
      t.add_value(id, lo, hi, rest());
    } else if (kind == "scale") {
      int id, factor;
      if (!(ls >> id >> factor)) fail("expected id and factor");
      t.add_scale(id, factor);
    } else {
      fail("unknown entry '" + kind + "'");
    }
  }
  return t;
}

SemanticFilterTable SemanticFilterTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open filter table " + path);
  return parse(in);
}

void SemanticFilterTable::add_attribute(int id, std::string label) { attrs_[id] = std::move(label); }

void SemanticFilterTable::add_scale(int id, int factor) { scales_[id] = factor; }

void SemanticFilterTable::add_value(int id, int lo, int hi, std::string label) {
  values_[id].push_back({lo, hi, std::move(label)});
}

std::string SemanticFilterTable::render(const AttributeTuple& t) const {
  std::string a = std::to_string(t.id), v = std::to_string(t.value);
  if (auto it = attrs_.find(t.id); it != attrs_.end()) a = it->second;
  if (auto it = scales_.find(t.id); it != scales_.end()) v = std::to_string(t.value * it->second);
  if (auto it = values_.find(t.id); it != values_.end())
    for (const auto& r : it->second)
      if (t.value >= r.lo && t.value <= r.hi) {
        v = r.label;
        break;
      }
  return "(" + a + ", " + v + ")";
}

std::string SemanticFilterTable::render(const SemanticDescription& d) const {
  std::string out = "{";
  for (std::size_t i = 0; i < d.size(); ++i) out += (i ? ", " : "") + render(d.tuples()[i]);
  return out + "}";
}

std::string SemanticFilterTable::render(const UserRequest& r) const {
  std::string out = "[";
  for (std::size_t p = 0; p < r.parts.size(); ++p) {
    out += p ? ", {" : "{";
    for (std::size_t i = 0; i < r.parts[p].size(); ++i) out += (i ? ", " : "") + render(r.parts[p][i]);
    out += "}";
  }
  return out + "]";
}

ClusterSetup two_cluster_setup(int keys) {
  if (keys < 1 || keys > 6) throw Error(Errc::InvalidArgument, "keys must be in [1,6]");
  ClusterSetup s;
  for (int o = 0; o < 2; ++o) {
    std::vector<AttributeTuple> part;
    for (int j = 1; j <= keys; ++j) part.push_back({keys * o + j, 50});
    s.objectives.push_back(UserRequest{{part}, 0});
  }
  for (int id = 1; id <= 2 * keys; ++id)
    s.alphabet.push_back(SemanticDescription::canonicalize({{id, 50}, {20 + id, 10}, {40 + id, 10}}, LengthCheck::Agent));
  for (int k = 0; s.alphabet.size() < 15; ++k) {
    // Near misses: off by 4 on one or two required attributes.
    const int a = (2 * k) % (2 * keys) + 1;
    std::vector<AttributeTuple> t{{a, 54}, {60 + k, 10}, {80 + k, 10}};
    if (a + 1 <= 2 * keys) t.push_back({a + 1, 46});
    s.alphabet.push_back(SemanticDescription::canonicalize(std::move(t), LengthCheck::Agent));
  }
  return s;
}

std::vector<ComplexityPoint> complexity_trace(const ClusterSetup& setup, EvolutionParams params, int horizon,
                                              int every, Rng rng) {
  params.max_generations = horizon;
  params.stall_generations = 0;
  params.stop_at_optimum = false;
  const std::size_t k = setup.objectives.size();
  std::vector<ComplexityPoint> out;
  Population pop(setup.alphabet, setup.objectives, params, std::move(rng));
  pop.run(nullptr, [&](const Population& p) {
    if (p.generation() % std::max(every, 1) != 0 && p.generation() != horizon) return;
    ComplexityPoint pt;
    pt.generation = p.generation();
    pt.max_fitness = p.best_fitness();
    SitePopulation sp{p.individuals(), p.alphabet_size()};
    pt.ell_v = ell_v(sp);
    if (pt.ell_v > 0) {
      const auto rep = complexity_cv(sp);
      pt.c_v = rep.c_v;
      pt.efficiency = rep.efficiency;
    }
    pt.efficiency_c = physical_complexity_cluster(sp, k).e_c;
    out.push_back(pt);
  });
  return out;
}

int generations_to_optima(const ClusterSetup& setup, EvolutionParams params, const CatalystConfig& catalyst,
                          int horizon, Rng rng) {
  params.max_generations = horizon;
  params.stall_generations = 0;
  params.stop_at_optimum = false;
  std::vector<FitnessModel> models;
  for (const auto& o : setup.objectives) models.emplace_back(setup.alphabet, o);
  Population pop(setup.alphabet, setup.objectives, params, std::move(rng));
  std::optional<PairingStrategy> pairing;
  if (catalyst.enabled) pairing = make_pairing(catalyst, setup.alphabet);
  auto solved = [&](const Population& p) {
    for (const auto& m : models) {
      bool any = false;
      for (const auto& g : p.individuals())
        if (m.mismatch(g) == 0) {
          any = true;
          break;
        }
      if (!any) return false;
    }
    return true;
  };
  if (solved(pop)) return 0;
  for (int g = 1; g <= horizon; ++g) {
    pop.step_generation(pairing ? &*pairing : nullptr);
    if (solved(pop)) return g;
  }
  return horizon + 1;
}

std::vector<double> sequence_length_histogram(const HabitatNetwork& net, int lo, int hi) {
  if (hi < lo) throw Error(Errc::InvalidArgument, "empty support");
  std::vector<double> h(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& hab : net.habitats)
    for (const auto& s : hab.sequences) {
      const int len = std::clamp(static_cast<int>(s.sequence.size()), lo, hi);
      h[static_cast<std::size_t>(len - lo)] += 1.0;
    }
  return h;
}

std::vector<double> windowed_rates(std::span<const double> trace, std::size_t window) {
  if (window == 0) throw Error(Errc::InvalidArgument, "window must be positive");
  std::vector<double> out;
  for (std::size_t s = 0; s + window <= trace.size(); s += window)
    out.push_back(100.0 * std::accumulate(trace.begin() + static_cast<std::ptrdiff_t>(s),
                                          trace.begin() + static_cast<std::ptrdiff_t>(s + window), 0.0) /
                  static_cast<double>(window));
  return out;
}

}  // namespace digeco
