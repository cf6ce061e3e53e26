#include "digeco/ecosystem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

namespace digeco {

void EcosystemParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::Config, what); };
  if (n_users < 2) fail("n_users must be at least 2");
  if (n_communities < 1 || n_communities > n_users) fail("n_communities must be in [1, n_users]");
  if (ids_per_community < static_cast<int>(kMinAgentTuples))
    fail("ids_per_community must be at least 3");
  if (static_cast<long>(n_communities) * ids_per_community > kMaxComponent)
    fail("n_communities * ids_per_community must not exceed 100");
  const auto per_community = (n_users + n_communities - 1) / n_communities;
  if (static_cast<long>(catalogue_size) < static_cast<long>(per_community) * initial_agents_per_user)
    fail("catalogue_size must cover the initial deployment of a community");
  if (initial_agents_per_user < 1) fail("initial_agents_per_user must be positive");
  if (deploy_every_k_requests < 1) fail("deploy_every_k_requests must be positive");
  if (k_init < 1) fail("k_init must be positive");
  if (!(community_links >= 0.0 && community_links <= 1.0)) fail("community_links must be in [0,1]");
  if (!(p_init > 0.0 && p_init <= 1.0)) fail("p_init must be in (0,1]");
  if (!(hebbian_alpha >= 0.0 && hebbian_alpha <= 1.0)) fail("hebbian_alpha must be in [0,1]");
  if (!(connection_floor >= 0.0 && connection_floor < 1.0)) fail("connection_floor must be in [0,1)");
  if (templates_per_community < 1) fail("templates_per_community must be positive");
  if (template_delta < 1) fail("template_delta must be positive");
  if (request_parts.lo < 1 || request_parts.hi > catalogue_size)
    fail("request_parts support must lie in [1, catalogue_size]");
  try {
    request_parts.validate();
  } catch (const Error& e) {
    fail(std::string("request_parts: ") + e.what());
  }
  if (part_size) {
    if (part_size->lo < 1 || part_size->hi > ids_per_community)
      fail("part_size support must lie in [1, ids_per_community]");
    try {
      part_size->validate();
    } catch (const Error& e) {
      fail(std::string("part_size: ") + e.what());
    }
  }
}

Agent* Habitat::find(ServiceId s) {
  for (auto& a : agents)
    if (a.service->id == s) return &a;
  return nullptr;
}

const Agent* Habitat::find(ServiceId s) const {
  for (const auto& a : agents)
    if (a.service->id == s) return &a;
  return nullptr;
}

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::Deploy: return "deploy";
    case EventKind::Migrate: return "migrate";
    case EventKind::Escape: return "escape";
    case EventKind::Death: return "death";
    case EventKind::Request: return "request";
    case EventKind::Targeted: return "targeted";
  }
  return "?";
}

void EventLog::write_jsonl(std::ostream& os) const {
  char buf[64];
  for (const auto& e : events_) {
    std::snprintf(buf, sizeof buf, "%.17g", e.fitness);
    os << "{\"t\":" << e.time << ",\"event\":\"" << event_name(e.kind) << "\",\"subject\":" << e.subject
       << ",\"service\":" << e.service << ",\"from\":" << e.from << ",\"to\":" << e.to
       << ",\"fitness\":" << buf << "}\n";
  }
}

Habitat& HabitatNetwork::at(HabitatId h) {
  if (h >= habitats.size()) throw Error(Errc::UnknownHabitat, "no habitat " + std::to_string(h));
  return habitats[h];
}

const Habitat& HabitatNetwork::at(HabitatId h) const {
  if (h >= habitats.size()) throw Error(Errc::UnknownHabitat, "no habitat " + std::to_string(h));
  return habitats[h];
}

double HabitatNetwork::probability(HabitatId from, HabitatId to) const {
  const auto& c = at(from).connections;
  auto it = c.find(to);
  return it == c.end() ? 0.0 : it->second;
}

std::size_t HabitatNetwork::edge_count() const {
  std::size_t n = 0;
  for (const auto& h : habitats) n += h.connections.size();
  return n;
}

std::size_t HabitatNetwork::agent_count() const {
  std::size_t n = 0;
  for (const auto& h : habitats) n += h.agents.size();
  return n;
}

HabitatNetwork init_network(const EcosystemParams& p, Rng& rng) {
  if (p.n_users < 2) throw Error(Errc::Config, "n_users must be at least 2");
  HabitatNetwork net;
  net.log = EventLog(p.record_events);
  const std::size_t n = p.n_users;
  net.habitats.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    net.habitats[i].id = static_cast<HabitatId>(i);
    net.habitats[i].owner_user = static_cast<UserId>(i);
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(p.k_init), n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order.begin(), order.end(), rng);
  auto degree = [&](std::size_t i) { return net.habitats[i].connections.size(); };
  for (auto h : order) {
    while (degree(h) < k) {
      const bool local = rng.bernoulli(p.community_links);
      const auto c = p.community_of(static_cast<UserId>(h));
      std::vector<std::size_t> open, any;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == h || net.habitats[h].connections.count(static_cast<HabitatId>(j))) continue;
        if (local && p.community_of(static_cast<UserId>(j)) != c) continue;
        any.push_back(j);
        if (degree(j) < k) open.push_back(j);
      }
      const auto& from = open.empty() ? any : open;
      if (from.empty()) {
        if (local) continue;
        break;
      }
      const auto j = from[rng.index(from.size())];
      net.habitats[h].connections[static_cast<HabitatId>(j)] = p.p_init;
      net.habitats[j].connections[static_cast<HabitatId>(h)] = p.p_init;
    }
  }
  return net;
}

Agent make_agent(HabitatNetwork& net, ServicePtr service, HabitatId at, const EcosystemParams& p) {
  Agent a;
  a.id = net.next_agent_id++;
  a.service = std::move(service);
  a.migration_history.push_back({at, 0});
  a.escape_remaining = p.escape_budget;
  return a;
}

namespace {

// Copies `src` (living elsewhere) into habitat `to`; the copy keeps the
// lineage history and starts with fresh counters.
void place_copy(HabitatNetwork& net, const Agent& src, HabitatId from, HabitatId to,
                const EcosystemParams& p) {
  Agent c;
  c.id = net.next_agent_id++;
  c.service = src.service;
  c.migration_history = src.migration_history;
  c.migration_history.push_back({to, 0});
  c.escape_remaining = p.escape_budget;
  net.log.add({net.time, EventKind::Migrate, c.id, c.service->id, from, to, 0.0});
  net.habitats[to].agents.push_back(std::move(c));
}

bool same_agents(const AgentSequence& a, const AgentSequence& b) {
  if (a.agents.size() != b.agents.size()) return false;
  for (std::size_t i = 0; i < a.agents.size(); ++i)
    if (a.agents[i]->id != b.agents[i]->id) return false;
  return true;
}

StoredSequence* find_sequence(Habitat& h, const AgentSequence& s) {
  for (auto& st : h.sequences)
    if (same_agents(st.sequence, s)) return &st;
  return nullptr;
}

}  // namespace

void deploy_agent(HabitatNetwork& net, HabitatId h, ServicePtr service, const EcosystemParams& p,
                  Rng& rng) {
  auto& hab = net.at(h);
  if (hab.holds(service->id)) return;
  const ServiceId sid = service->id;
  hab.agents.push_back(make_agent(net, std::move(service), h, p));
  net.log.add({net.time, EventKind::Deploy, hab.agents.back().id, sid, h, h, 0.0});
  migrate(net, h, sid, p, rng);
}

std::vector<HabitatId> migrate(HabitatNetwork& net, HabitatId from, ServiceId service,
                               const EcosystemParams& p, Rng& rng) {
  std::vector<HabitatId> out;
  const auto& src_hab = net.at(from);
  const Agent* src = src_hab.find(service);
  if (!src) return out;
  const Agent agent = *src;  // the pool vector of `from` is not touched below
  for (const auto& [to, prob] : src_hab.connections) {
    if (!rng.bernoulli(prob)) continue;
    if (net.habitats[to].holds(service)) continue;
    place_copy(net, agent, from, to, p);
    out.push_back(to);
  }
  return out;
}

std::vector<HabitatId> migrate(HabitatNetwork& net, HabitatId from, const StoredSequence& seq,
                               const EcosystemParams& p, Rng& rng) {
  std::vector<HabitatId> out;
  const StoredSequence item = seq;
  const auto connections = net.at(from).connections;
  for (const auto& [to, prob] : connections) {
    if (!rng.bernoulli(prob)) continue;
    auto& dest = net.habitats[to];
    if (find_sequence(dest, item.sequence)) continue;
    std::set<ServiceId> copied;
    for (const auto& svc : item.sequence.agents) {
      if (dest.holds(svc->id) || copied.count(svc->id)) continue;
      copied.insert(svc->id);
      if (const Agent* src = net.habitats[from].find(svc->id)) {
        place_copy(net, *src, from, to, p);
      } else {
        Agent fresh = make_agent(net, svc, to, p);
        net.log.add({net.time, EventKind::Migrate, fresh.id, svc->id, from, to, 0.0});
        dest.agents.push_back(std::move(fresh));
      }
    }
    StoredSequence c;
    c.sequence = item.sequence;
    c.escape_remaining = p.escape_budget;
    dest.sequences.push_back(std::move(c));
    net.log.add({net.time, EventKind::Migrate, 0, 0, from, to, 0.0});
    out.push_back(to);
  }
  return out;
}

void hebbian_update(HabitatNetwork& net, std::span<const HabitatId> origins, HabitatId at,
                    bool success, const EcosystemParams& p) {
  net.at(at);
  for (HabitatId o : origins) {
    if (o == at) continue;
    auto& conn = net.at(o).connections;
    auto it = conn.find(at);
    if (it == conn.end()) {
      if (success) conn[at] = p.p_init;
      continue;
    }
    if (success) {
      it->second += p.hebbian_alpha * (1.0 - it->second);
      it->second = std::min(it->second, 1.0);
    } else {
      it->second *= 1.0 - p.hebbian_alpha;
      if (it->second < p.connection_floor) conn.erase(it);
    }
  }
}

ResponseRecord handle_request(HabitatNetwork& net, HabitatId h, const UserRequest& req,
                              const EcosystemParams& p, Rng& rng, ExecutionHook* hook) {
  req.validate();
  auto& hab = net.at(h);
  if (hab.agents.empty() && hab.sequences.empty())
    throw Error(Errc::EmptyPool, "habitat " + std::to_string(h) + " has an empty pool");

  // Alphabet: the pool's agents, then any service only reachable through a
  // stored sequence.
  std::vector<ServicePtr> symbols;
  std::unordered_map<ServiceId, std::uint32_t> index;
  auto add_symbol = [&](const ServicePtr& s) {
    if (index.emplace(s->id, static_cast<std::uint32_t>(symbols.size())).second) symbols.push_back(s);
  };
  for (const auto& a : hab.agents) add_symbol(a.service);
  for (const auto& st : hab.sequences)
    for (const auto& s : st.sequence.agents) add_symbol(s);

  std::vector<SemanticDescription> alphabet;
  alphabet.reserve(symbols.size());
  for (const auto& s : symbols) alphabet.push_back(s->description);
  std::vector<Genome> seeds;
  for (const auto& st : hab.sequences) {
    Genome g;
    for (const auto& s : st.sequence.agents) g.push_back(index.at(s->id));
    seeds.push_back(std::move(g));
  }

  Population pop(std::move(alphabet), {req}, p.evolution, rng.derive({0}), std::move(seeds));
  const auto result = pop.run();

  ResponseRecord rec;
  rec.fitness = result.best_fitness;
  rec.generations = result.generations_used;
  rec.success = rec.fitness >= p.success_threshold;
  for (auto sym : result.best) rec.best.agents.push_back(symbols[sym]);
  rec.best.add_origin(h);

  // Register, or refresh the identical stored sequence.
  StoredSequence* stored = find_sequence(hab, rec.best);
  if (stored) {
    for (auto o : stored->sequence.origin_habitats) rec.best.add_origin(o);
    stored->sequence.origin_habitats = rec.best.origin_habitats;
  } else {
    StoredSequence st;
    st.sequence = rec.best;
    st.escape_remaining = p.escape_budget;
    hab.sequences.push_back(std::move(st));
    stored = &hab.sequences.back();
  }

  // Execute: the user always uses the response.
  std::vector<ServiceId> executed;
  for (const auto& s : rec.best.agents)
    if (std::find(executed.begin(), executed.end(), s->id) == executed.end()) executed.push_back(s->id);
  for (auto& a : hab.agents) {
    if (std::find(executed.begin(), executed.end(), a.service->id) == executed.end()) {
      ++a.unused_requests;
      continue;
    }
    a.unused_requests = 0;
    ++a.targeted_migrations;
    auto rit = std::find_if(a.migration_history.begin(), a.migration_history.end(),
                            [&](const MigrationRecord& r) { return r.habitat_id == h; });
    if (rit == a.migration_history.end()) {
      a.migration_history.push_back({h, 1});
    } else {
      ++rit->uses;
    }
  }
  for (auto& st : hab.sequences) {
    if (&st == stored) {
      st.unused_requests = 0;
    } else {
      ++st.unused_requests;
    }
  }
  net.log.add({net.time, EventKind::Request, h, 0, h, h, rec.fitness});

  Rng mig = rng.derive({1});
  if (hook) hook->after_execution(net, h, executed, p, mig);

  // `stored` may have been invalidated by the hook; look it up again.
  if (const StoredSequence* s = find_sequence(net.at(h), rec.best)) {
    const StoredSequence copy = *s;
    migrate(net, h, copy, p, mig);
  }

  std::vector<HabitatId> origins = rec.best.origin_habitats;
  for (const auto& s : rec.best.agents) origins.push_back(s->owner);
  std::sort(origins.begin(), origins.end());
  origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
  hebbian_update(net, origins, h, rec.success, p);
  return rec;
}

void decay_and_escape(HabitatNetwork& net, const EcosystemParams& p, Rng& rng) {
  struct Move {
    Agent agent;
    HabitatId to;
  };
  std::vector<Move> moves;
  for (auto& hab : net.habitats) {
    std::vector<Agent> keep;
    keep.reserve(hab.agents.size());
    for (auto& a : hab.agents) {
      if (a.unused_requests < p.unused_threshold) {
        keep.push_back(std::move(a));
        continue;
      }
      std::vector<HabitatId> dest;
      if (a.escape_remaining > 0)
        for (const auto& [to, prob] : hab.connections)
          if (!net.habitats[to].holds(a.service->id)) dest.push_back(to);
      if (dest.empty()) {
        net.log.add({net.time, EventKind::Death, a.id, a.service->id, hab.id, hab.id, 0.0});
        continue;
      }
      const HabitatId to = dest[rng.index(dest.size())];
      --a.escape_remaining;
      a.unused_requests = 0;
      a.migration_history.push_back({to, 0});
      net.log.add({net.time, EventKind::Escape, a.id, a.service->id, hab.id, to, 0.0});
      moves.push_back({std::move(a), to});
    }
    hab.agents = std::move(keep);

    std::vector<StoredSequence> kept;
    kept.reserve(hab.sequences.size());
    for (auto& st : hab.sequences) {
      if (st.unused_requests < p.unused_threshold) {
        kept.push_back(std::move(st));
        continue;
      }
      net.log.add({net.time, EventKind::Death, 0, 0, hab.id, hab.id, 0.0});
    }
    hab.sequences = std::move(kept);
  }
  // Two escapes of one service into the same habitat: the later one dies.
  for (auto& m : moves) {
    auto& dest = net.habitats[m.to];
    if (dest.holds(m.agent.service->id)) {
      net.log.add({net.time, EventKind::Death, m.agent.id, m.agent.service->id, m.to, m.to, 0.0});
      continue;
    }
    dest.agents.push_back(std::move(m.agent));
  }
}

std::size_t matched_attributes(const AgentSequence& seq, const UserRequest& req) {
  std::set<AttributeTuple> have;
  for (const auto& a : seq.agents) have.insert(a->description.begin(), a->description.end());
  std::size_t n = 0;
  for (const auto& part : req.parts)
    for (const auto& t : part) n += have.count(t);
  return n;
}

double response_rate(std::span<const double> trace, std::size_t window) {
  if (window == 0 || window > trace.size())
    throw Error(Errc::InvalidArgument, "window must be in [1, trace length]");
  double s = 0.0;
  for (std::size_t i = trace.size() - window; i < trace.size(); ++i) s += trace[i];
  return 100.0 * s / static_cast<double>(window);
}

UserBase::UserBase(const EcosystemParams& p, Rng& rng)
    : communities_(p.n_communities),
      users_(p.n_users),
      ids_per_community_(p.ids_per_community),
      initial_per_user_(p.initial_agents_per_user),
      delta_(p.template_delta),
      catalogue_(p.n_communities),
      next_uncovered_(p.n_communities, 0) {
  for (std::uint32_t c = 0; c < communities_; ++c) {
    std::vector<SemanticDescription> templates;
    for (int t = 0; t < p.templates_per_community; ++t) templates.push_back(random_description(c, rng));
    std::set<SemanticDescription> seen;
    auto& cat = catalogue_[c];
    while (cat.size() < static_cast<std::size_t>(p.catalogue_size)) {
      auto d = perturb(templates[rng.index(templates.size())], rng);
      if (seen.insert(d).second) cat.push_back(std::move(d));
    }
    std::uint32_t members = 0;
    for (UserId u = 0; u < users_; ++u) members += community_of(u) == c;
    next_uncovered_[c] = static_cast<std::size_t>(members) * static_cast<std::size_t>(initial_per_user_);
  }
}

SemanticDescription UserBase::random_description(std::uint32_t community, Rng& rng) const {
  const int base = static_cast<int>(community) * ids_per_community_ + 1;
  const int max_len = std::min<int>(ids_per_community_, static_cast<int>(kMaxAgentTuples));
  const int len = static_cast<int>(rng.uniform_int(static_cast<int>(kMinAgentTuples), max_len));
  std::vector<int> ids(static_cast<std::size_t>(ids_per_community_));
  std::iota(ids.begin(), ids.end(), base);
  for (int i = 0; i < len; ++i) std::swap(ids[static_cast<std::size_t>(i)], ids[i + rng.index(ids.size() - i)]);
  std::vector<AttributeTuple> t;
  for (int i = 0; i < len; ++i)
    t.push_back({ids[static_cast<std::size_t>(i)], static_cast<int>(rng.uniform_int(kMinComponent, kMaxComponent))});
  return SemanticDescription::canonicalize(std::move(t), LengthCheck::Agent);
}

SemanticDescription UserBase::perturb(const SemanticDescription& t, Rng& rng) const {
  auto tuples = t.tuples();
  std::vector<std::size_t> idx(tuples.size());
  std::iota(idx.begin(), idx.end(), 0);
  shuffle(idx.begin(), idx.end(), rng);
  const auto count = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(tuples.size())));
  for (std::size_t k = 0; k < count; ++k) {
    int& v = tuples[idx[k]].value;
    const int d = static_cast<int>(rng.uniform_int(1, delta_));
    v = std::clamp(v + (rng.bernoulli(0.5) ? d : -d), kMinComponent, kMaxComponent);
  }
  return SemanticDescription::canonicalize(std::move(tuples), LengthCheck::Agent);
}

std::vector<SemanticDescription> UserBase::initial_services(UserId u) const {
  const auto& cat = catalogue_[community_of(u)];
  const std::size_t slot = u / communities_;
  std::vector<SemanticDescription> out;
  for (int i = 0; i < initial_per_user_; ++i)
    out.push_back(cat[slot * static_cast<std::size_t>(initial_per_user_) + static_cast<std::size_t>(i)]);
  return out;
}

SemanticDescription UserBase::next_service(UserId u, Rng& rng) {
  const auto c = community_of(u);
  auto& next = next_uncovered_[c];
  if (next < catalogue_[c].size()) return catalogue_[c][next++];
  return random_description(c, rng);
}

namespace {

// First n positions of idx become a uniform draw without replacement.
void partial_shuffle(std::vector<std::size_t>& idx, std::size_t n, Rng& rng) {
  for (std::size_t i = 0; i < n && i < idx.size(); ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
}

}  // namespace

UserRequest UserBase::request(UserId u, const DistributionSpec& parts, Rng& rng) const {
  const auto& cat = catalogue_[community_of(u)];
  const auto n = std::min(static_cast<std::size_t>(sample(parts, rng)), cat.size());
  std::vector<std::size_t> idx(cat.size());
  std::iota(idx.begin(), idx.end(), 0);
  partial_shuffle(idx, n, rng);
  UserRequest r;
  for (std::size_t i = 0; i < n; ++i) r.parts.push_back(cat[idx[i]].tuples());
  return r;
}

UserRequest UserBase::request(UserId u, const DistributionSpec& parts, const DistributionSpec& part_size,
                              Rng& rng) const {
  const auto& cat = catalogue_[community_of(u)];
  const auto n = static_cast<std::size_t>(sample(parts, rng));
  UserRequest r;
  for (std::size_t k = 0; k < n; ++k) {
    const auto m = static_cast<std::size_t>(sample(part_size, rng));
    std::vector<std::size_t> idx(cat.size());
    std::iota(idx.begin(), idx.end(), 0);
    partial_shuffle(idx, idx.size(), rng);
    std::vector<AttributeTuple> part;
    for (auto i : idx) {
      auto tuples = cat[i].tuples();
      shuffle(tuples.begin(), tuples.end(), rng);
      for (const auto& t : tuples) {
        if (part.size() == m) break;
        if (std::none_of(part.begin(), part.end(), [&](const AttributeTuple& x) { return x.id == t.id; }))
          part.push_back(t);
      }
      if (part.size() == m) break;
    }
    std::sort(part.begin(), part.end());
    r.parts.push_back(std::move(part));
  }
  return r;
}

Ecosystem::Ecosystem(EcosystemParams p, std::uint64_t seed, ExecutionHook* hook)
    : params_((p.validate(), std::move(p))),
      master_(seed),
      hook_(hook),
      net_([&] {
        Rng r = master_.derive({1});
        return init_network(params_, r);
      }()),
      users_([&] {
        Rng r = master_.derive({2});
        return UserBase(params_, r);
      }()),
      requests_made_(params_.n_users, 0) {
  Rng r = master_.derive({3});
  for (UserId u = 0; u < params_.n_users; ++u)
    for (auto& d : users_.initial_services(u))
      deploy_agent(net_, u, new_service(std::move(d), u), params_, r);
}

ServicePtr Ecosystem::new_service(SemanticDescription d, HabitatId owner) {
  auto s = std::make_shared<Service>();
  s->id = services_.size() + 1;
  s->description = std::move(d);
  s->owner = owner;
  services_.push_back(s);
  return s;
}

StepRecord Ecosystem::step() {
  ++net_.time;
  Rng r = master_.derive({4, net_.time});
  const auto user = static_cast<UserId>(r.index(params_.n_users));
  UserRequest req = params_.part_size ? users_.request(user, params_.request_parts, *params_.part_size, r)
                                       : users_.request(user, params_.request_parts, r);
  req.issued_at = net_.time;
  const auto res = handle_request(net_, user, req, params_, r, hook_);

  if (++requests_made_[user] % static_cast<std::uint32_t>(params_.deploy_every_k_requests) == 0)
    deploy_agent(net_, user, new_service(users_.next_service(user, r), user), params_, r);
  decay_and_escape(net_, params_, r);

  StepRecord s;
  s.time = net_.time;
  s.user = user;
  s.parts = req.parts.size();
  s.fitness = res.fitness;
  s.generations = res.generations;
  s.best_length = res.best.size();
  s.required = req.flattened().size();
  s.matched = matched_attributes(res.best, req);
  trace_.push_back(s);
  return s;
}

void Ecosystem::run(std::size_t events) {
  for (std::size_t i = 0; i < events; ++i) step();
}

std::vector<double> Ecosystem::fitness_trace() const {
  std::vector<double> f;
  f.reserve(trace_.size());
  for (const auto& s : trace_) f.push_back(s.fitness);
  return f;
}

}  // namespace digeco
