#include "digeco/augment.hpp"

#include <algorithm>

namespace digeco {

const char* cluster_algorithm_name(ClusterAlgorithm a) {
  return a == ClusterAlgorithm::AverageLink ? "average_link" : "physical_complexity";
}

ClusterAlgorithm parse_cluster_algorithm(const std::string& name) {
  if (name == "average_link") return ClusterAlgorithm::AverageLink;
  if (name == "physical_complexity") return ClusterAlgorithm::PhysicalComplexity;
  throw Error(Errc::Config, "unknown clustering algorithm '" + name + "'");
}

const char* recognizer_name(RecognizerKind k) { return k == RecognizerKind::Distance ? "distance" : "mlp"; }

RecognizerKind parse_recognizer(const std::string& name) {
  if (name == "distance") return RecognizerKind::Distance;
  if (name == "mlp") return RecognizerKind::Mlp;
  throw Error(Errc::Config, "unknown recognizer '" + name + "'");
}

const char* targeting_name(TargetingMode m) { return m == TargetingMode::Targeted ? "targeted" : "random_control"; }

TargetingMode parse_targeting(const std::string& name) {
  if (name == "targeted") return TargetingMode::Targeted;
  if (name == "random_control") return TargetingMode::RandomControl;
  throw Error(Errc::Config, "unknown targeting mode '" + name + "'");
}

ClusterSet cluster_genomes(std::span<const Genome> individuals,
                           std::span<const SemanticDescription> alphabet, ClusterAlgorithm algorithm,
                           std::size_t k) {
  if (algorithm == ClusterAlgorithm::AverageLink) return average_link_genomes(individuals, alphabet, k);
  SitePopulation pop;
  pop.sequences.assign(individuals.begin(), individuals.end());
  pop.alphabet_size = std::max<std::size_t>(alphabet.size(), 2);
  return physical_complexity_cluster(pop, k);
}

PairList catalyst_pairing(std::span<const Genome> individuals, std::span<const SemanticDescription> alphabet,
                          const CatalystConfig& cfg, std::size_t pairs, Rng& rng) {
  if (!cfg.enabled || cfg.k <= 1) return random_pairing(individuals.size(), pairs, rng);
  const auto clusters = cluster_genomes(individuals, alphabet, cfg.algorithm, cfg.k);

  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < clusters.labels.size(); ++i) {
    const auto c = clusters.labels[i];
    if (c >= members.size()) members.resize(c + 1);
    members[c].push_back(i);
  }
  PairList out;
  while (out.size() < pairs) {
    std::size_t eligible = 0;
    for (const auto& m : members)
      if (m.size() >= 2) eligible += m.size();
    if (eligible == 0) break;
    // First parent uniform over eligible individuals.
    std::size_t r = rng.index(eligible);
    std::size_t c = 0;
    for (; c < members.size(); ++c) {
      if (members[c].size() < 2) continue;
      if (r < members[c].size()) break;
      r -= members[c].size();
    }
    auto& m = members[c];
    const std::size_t a = m[r];
    m.erase(m.begin() + static_cast<std::ptrdiff_t>(r));
    const std::size_t j = rng.index(m.size());
    const std::size_t b = m[j];
    m.erase(m.begin() + static_cast<std::ptrdiff_t>(j));
    out.emplace_back(a, b);
  }
  return out;
}

PairingStrategy make_pairing(const CatalystConfig& cfg, std::vector<SemanticDescription> alphabet) {
  return [cfg, alphabet = std::move(alphabet)](std::span<const Genome> individuals, std::size_t,
                                               std::size_t pairs, Rng& rng) {
    return catalyst_pairing(individuals, alphabet, cfg, pairs, rng);
  };
}

Recognizer& RecognizerBank::get(const Service& s) {
  auto it = recognizers_.find(s.id);
  if (it != recognizers_.end()) return *it->second;
  std::unique_ptr<Recognizer> r;
  if (kind_ == RecognizerKind::Distance) {
    r = std::make_unique<DistanceRecognizer>(s.description);
  } else {
    Rng rng = Rng(seed_).derive({s.id});
    r = std::make_unique<MlpRecognizer>(s.description, mlp_, rng);
  }
  return *recognizers_.emplace(s.id, std::move(r)).first->second;
}

bool RecognizerBank::similar(const Service& a, const Service& b) {
  const auto key = std::make_pair(a.id, b.id);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const bool v = get(a).similar(b.description);
  cache_.emplace(key, v);
  return v;
}

void RecognizerBank::learn(const Service& a, const SemanticDescription& other, bool positive) {
  get(a).learn(other, positive);
  cache_.erase(cache_.lower_bound({a.id, 0}), cache_.lower_bound({a.id + 1, 0}));
}

TargetedOutcome targeted_migrate(HabitatNetwork& net, ServiceId service, HabitatId at,
                                 const TargetedMigrationConfig& cfg, RecognizerBank& bank,
                                 const EcosystemParams& p, Rng& rng) {
  TargetedOutcome out;
  if (!cfg.enabled) return out;
  Agent* agent = net.at(at).find(service);
  if (!agent) return out;

  auto open = [&](HabitatId h) { return h != at && !agent->visited(h) && !net.habitats[h].holds(service); };

  if (cfg.mode == TargetingMode::RandomControl) {
    if (agent->targeted_migrations == 0) return out;
    std::vector<HabitatId> candidates;
    for (const auto& h : net.habitats)
      if (open(h.id)) candidates.push_back(h.id);
    if (candidates.empty()) return out;
    out.destination = candidates[rng.index(candidates.size())];
  } else {
    // Pool members to meet, optionally a random sample.
    std::vector<std::size_t> order;
    const auto& pool = net.at(at).agents;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i].service->id != service) order.push_back(i);
    if (cfg.interaction_cap > 0 && order.size() > cfg.interaction_cap) {
      shuffle(order.begin(), order.end(), rng);
      order.resize(cfg.interaction_cap);
      std::sort(order.begin(), order.end());
    }
    std::map<HabitatId, std::uint32_t> reported;
    for (auto i : order) {
      const Agent& peer = pool[i];
      if (!bank.mutual(*agent->service, *peer.service)) continue;
      out.peers.push_back(peer.service->id);
      for (const auto& r : peer.migration_history)
        if (r.uses > 0) reported[r.habitat_id] = std::max(reported[r.habitat_id], r.uses);
    }
    if (agent->targeted_migrations == 0) return out;
    std::uint32_t best = 0;
    for (const auto& [h, uses] : reported)  // ascending ids, so ties keep the lowest
      if (uses > best && open(h)) {
        best = uses;
        out.destination = h;
      }
    if (!out.destination) return out;
  }

  --agent->targeted_migrations;
  const HabitatId to = *out.destination;
  Agent c;
  c.id = net.next_agent_id++;
  c.service = agent->service;
  c.migration_history = agent->migration_history;
  c.migration_history.push_back({to, 0});
  c.escape_remaining = p.escape_budget;
  net.log.add({net.time, EventKind::Targeted, c.id, service, at, to, 0.0});
  net.habitats[to].agents.push_back(std::move(c));
  return out;
}

void TargetedMigration::settle(HabitatNetwork& net, HabitatId at, std::span<const ServiceId> executed) {
  for (auto s : executed) {
    const Agent* a = net.at(at).find(s);
    if (!a) continue;
    auto it = pending_.find(a->id);
    if (it == pending_.end()) continue;
    for (const auto& d : it->second.peers) bank_.learn(*a->service, d, true);
    pending_.erase(it);
  }
  for (auto it = pending_.begin(); it != pending_.end();) {
    const auto& dest = net.at(it->second.destination).agents;
    const bool present =
        std::any_of(dest.begin(), dest.end(), [&](const Agent& a) { return a.id == it->first; });
    if (present) {
      ++it;
      continue;
    }
    for (const auto& d : it->second.peers) bank_.learn(*it->second.service, d, false);
    it = pending_.erase(it);
  }
}

void TargetedMigration::after_execution(HabitatNetwork& net, HabitatId at, std::span<const ServiceId> executed,
                                        const EcosystemParams& p, Rng& rng) {
  if (!cfg_.enabled) return;
  executions_ += executed.size();
  const bool learning = cfg_.online_learning && cfg_.mode == TargetingMode::Targeted;
  if (learning) settle(net, at, executed);
  for (auto s : executed) {
    const auto copy_id = net.next_agent_id;
    auto res = targeted_migrate(net, s, at, cfg_, bank_, p, rng);
    if (!res.destination) continue;
    ++migrations_;
    if (!learning || res.peers.empty()) continue;
    Pending pend{net.at(at).find(s)->service, *res.destination, {}};
    for (const auto& a : net.at(at).agents)
      if (std::find(res.peers.begin(), res.peers.end(), a.service->id) != res.peers.end())
        pend.peers.push_back(a.service->description);
    pending_.emplace(copy_id, std::move(pend));
  }
}

}  // namespace digeco
