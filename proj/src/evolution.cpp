#include "digeco/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace digeco {

double fitness_from_mismatch(long mismatch) { return 1.0 / (1.0 + static_cast<double>(mismatch)); }

double fitness(const AgentSequence& seq, const UserRequest& req) {
  long total = 0;
  for (const auto& part : req.parts) {
    for (const auto& r : part) {
      int best = kMaxComponent;
      for (const auto& agent : seq.agents)
        for (const auto& t : agent->description)
          if (t.id == r.id) best = std::min(best, std::abs(t.value - r.value));
      total += best;
    }
  }
  return fitness_from_mismatch(total);
}

double effective_fitness(double f, std::size_t len, double mean_len) {
  if (static_cast<double>(len) <= mean_len) return f;
  return f * (mean_len / static_cast<double>(len));
}

FitnessModel::FitnessModel(std::span<const SemanticDescription> alphabet, const UserRequest& req) {
  const auto required = req.flattened();
  required_ = required.size();
  cost_.assign(alphabet.size() * required_, static_cast<std::uint8_t>(kMaxComponent));
  for (std::size_t s = 0; s < alphabet.size(); ++s) {
    for (std::size_t r = 0; r < required_; ++r) {
      int best = kMaxComponent;
      for (const auto& t : alphabet[s])
        if (t.id == required[r].id) best = std::min(best, std::abs(t.value - required[r].value));
      cost_[s * required_ + r] = static_cast<std::uint8_t>(best);
    }
  }
}

long FitnessModel::mismatch(std::span<const std::uint32_t> genome) const {
  if (genome.empty()) return static_cast<long>(required_) * kMaxComponent;
  long total = 0;
  for (std::size_t r = 0; r < required_; ++r) {
    int best = kMaxComponent;
    for (auto s : genome) {
      int c = cost_[s * required_ + r];
      if (c < best) {
        best = c;
        if (best == 0) break;
      }
    }
    total += best;
  }
  return total;
}

std::vector<std::size_t> select(std::span<const double> weights, std::size_t count, Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(count);
  if (weights.empty()) return out;
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double total = cumulative.back();
  for (std::size_t k = 0; k < count; ++k) {
    const double x = rng.uniform01() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    if (it == cumulative.end()) --it;
    out.push_back(static_cast<std::size_t>(it - cumulative.begin()));
  }
  return out;
}

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, Rng& rng) {
  const std::size_t shortest = std::min(a.size(), b.size());
  if (shortest <= 1) return {a, b};
  const auto cut = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(shortest) - 1));
  Genome x(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut));
  x.insert(x.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
  Genome y(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
  y.insert(y.end(), a.begin() + static_cast<std::ptrdiff_t>(cut), a.end());
  return {std::move(x), std::move(y)};
}

void mutate(Genome& g, std::size_t alphabet_size, MutationKind kind, Rng& rng) {
  const auto n = static_cast<std::uint32_t>(alphabet_size);
  switch (kind) {
    case MutationKind::Insert: {
      auto pos = rng.index(g.size() + 1);
      g.insert(g.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<std::uint32_t>(rng.index(n)));
      break;
    }
    case MutationKind::Replace: {
      if (g.empty()) {
        g.push_back(static_cast<std::uint32_t>(rng.index(n)));
        break;
      }
      auto pos = rng.index(g.size());
      if (n > 1) {
        // Draw from the alphabet minus the current symbol.
        auto s = static_cast<std::uint32_t>(rng.index(n - 1));
        if (s >= g[pos]) ++s;
        g[pos] = s;
      }
      break;
    }
    case MutationKind::Delete: {
      if (g.size() <= 1) return;
      auto pos = rng.index(g.size());
      g.erase(g.begin() + static_cast<std::ptrdiff_t>(pos));
      break;
    }
  }
}

void mutate(Genome& g, std::size_t alphabet_size, Rng& rng) {
  MutationKind kind;
  if (g.size() <= 1)
    kind = rng.index(2) == 0 ? MutationKind::Insert : MutationKind::Replace;
  else
    kind = static_cast<MutationKind>(rng.index(3));
  mutate(g, alphabet_size, kind, rng);
}

namespace {

// k distinct indices from [0,n) via a partial Fisher-Yates.
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

PairList random_pairing(std::size_t population_size, std::size_t pairs, Rng& rng) {
  auto idx = choose_distinct(population_size, 2 * pairs, rng);
  PairList out;
  for (std::size_t i = 0; i + 1 < idx.size(); i += 2) out.emplace_back(idx[i], idx[i + 1]);
  return out;
}

Population::Population(std::vector<SemanticDescription> alphabet,
                       std::vector<UserRequest> objectives, EvolutionParams params, Rng rng,
                       std::vector<Genome> seeds)
    : alphabet_(std::move(alphabet)), params_(params), rng_(std::move(rng)) {
  if (alphabet_.empty()) throw Error(Errc::EmptyPool, "population needs a non-empty alphabet");
  if (objectives.empty()) throw Error(Errc::InvalidArgument, "population needs a request");
  for (const auto& req : objectives) {
    req.validate();
    models_.emplace_back(alphabet_, req);
  }
  for (auto& s : seeds) {
    if (s.empty()) continue;
    for (auto sym : s)
      if (sym >= alphabet_.size()) throw Error(Errc::InvalidArgument, "seed symbol outside alphabet");
    individuals_.push_back(std::move(s));
  }
  const int max_len = std::max(1, params_.initial_max_length);
  while (individuals_.empty() || individuals_.size() < target_size()) {
    Genome g(static_cast<std::size_t>(rng_.uniform_int(1, max_len)));
    for (auto& sym : g) sym = static_cast<std::uint32_t>(rng_.index(alphabet_.size()));
    individuals_.push_back(std::move(g));
  }
  evaluate();
}

double Population::mean_length() const {
  if (individuals_.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& g : individuals_) total += g.size();
  return static_cast<double>(total) / static_cast<double>(individuals_.size());
}

std::size_t Population::target_size() const {
  const double ell = individuals_.empty() ? 1.0 : mean_length();
  const auto n = static_cast<std::size_t>(
      std::ceil(params_.pop_size_factor * static_cast<double>(alphabet_.size()) * ell - 1e-9));
  return std::max<std::size_t>(n, static_cast<std::size_t>(std::max(1, params_.min_population)));
}

double Population::raw_fitness(const Genome& g, std::size_t objective) const {
  return models_[objective].fitness(g);
}

void Population::evaluate() {
  fitness_.assign(individuals_.size(), 0.0);
  if (models_.size() > 1) per_objective_.assign(models_.size(), std::vector<double>(individuals_.size()));
  for (std::size_t i = 0; i < individuals_.size(); ++i) {
    double best = 0.0;
    for (std::size_t o = 0; o < models_.size(); ++o) {
      double f = raw_fitness(individuals_[i], o);
      if (models_.size() > 1) per_objective_[o][i] = f;
      best = std::max(best, f);
    }
    fitness_[i] = best;
  }
}

FitnessReport Population::report() const {
  FitnessReport r;
  r.fitness = fitness_;
  r.mean_length = mean_length();
  if (!fitness_.empty()) {
    r.max_fitness = *std::max_element(fitness_.begin(), fitness_.end());
    r.avg_fitness = std::accumulate(fitness_.begin(), fitness_.end(), 0.0) /
                    static_cast<double>(fitness_.size());
  }
  return r;
}

void Population::set_individuals(std::vector<Genome> individuals) {
  individuals_ = std::move(individuals);
  evaluate();
}

FitnessReport Population::step_generation(const PairingStrategy* pairing) {
  const double ell = mean_length();
  const std::size_t next_size = target_size();

  std::vector<std::size_t> chosen;
  chosen.reserve(next_size);
  auto weights_for = [&](const std::vector<double>& raw) {
    std::vector<double> w(individuals_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = effective_fitness(raw[i], individuals_[i].size(), ell);
    return w;
  };
  if (models_.size() == 1) {
    auto w = weights_for(fitness_);
    chosen = select(w, next_size, rng_);
  } else {
    const std::size_t m = models_.size();
    for (std::size_t o = 0; o < m; ++o) {
      const std::size_t share = next_size / m + (o < next_size % m ? 1 : 0);
      auto w = weights_for(per_objective_[o]);
      auto part = select(w, share, rng_);
      chosen.insert(chosen.end(), part.begin(), part.end());
    }
  }

  std::vector<Genome> next;
  next.reserve(next_size);
  for (auto i : chosen) next.push_back(individuals_[i]);

  const auto pair_count = static_cast<std::size_t>(
      std::llround(params_.crossover_rate * static_cast<double>(next.size())) / 2);
  if (pair_count > 0) {
    PairList pairs = pairing ? (*pairing)(next, alphabet_.size(), pair_count, rng_)
                             : random_pairing(next.size(), pair_count, rng_);
    for (auto [a, b] : pairs) {
      auto [x, y] = crossover(next[a], next[b], rng_);
      next[a] = std::move(x);
      next[b] = std::move(y);
    }
  }

  const auto mutants = static_cast<std::size_t>(
      std::llround(params_.mutation_rate * static_cast<double>(next.size())));
  for (auto i : choose_distinct(next.size(), mutants, rng_)) mutate(next[i], alphabet_.size(), rng_);

  individuals_ = std::move(next);
  evaluate();
  ++generation_;
  return report();
}

Genome Population::best() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < individuals_.size(); ++i) {
    const auto& g = individuals_[i];
    const auto& b = individuals_[best];
    if (fitness_[i] > fitness_[best] ||
        (fitness_[i] == fitness_[best] &&
         (g.size() < b.size() || (g.size() == b.size() && g < b))))
      best = i;
  }
  return individuals_[best];
}

double Population::best_fitness() const {
  return *std::max_element(fitness_.begin(), fitness_.end());
}

RunResult Population::run(const PairingStrategy* pairing, const Observer& observer) {
  // The reported best is the best individual seen in any generation, since
  // non-elitist selection can lose it again.
  RunResult out;
  if (observer) observer(*this);
  out.best = best();
  out.best_fitness = best_fitness();
  int since_improvement = 0;
  while (true) {
    if (params_.stop_at_optimum && out.best_fitness >= 1.0) break;
    if (generation_ >= params_.max_generations) break;
    if (params_.stall_generations > 0 && since_improvement >= params_.stall_generations) break;
    out.trace.push_back(step_generation(pairing));
    if (observer) observer(*this);
    const double m = out.trace.back().max_fitness;
    if (m > out.best_fitness) {
      out.best = best();
      out.best_fitness = m;
      since_improvement = 0;
    } else {
      if (m == out.best_fitness) {
        auto cand = best();
        if (cand.size() < out.best.size() || (cand.size() == out.best.size() && cand < out.best))
          out.best = std::move(cand);
      }
      ++since_improvement;
    }
  }
  out.generations_used = static_cast<int>(out.trace.size());
  return out;
}

}  // namespace digeco
