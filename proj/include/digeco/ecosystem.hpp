#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "digeco/core.hpp"
#include "digeco/distribution.hpp"
#include "digeco/evolution.hpp"
#include "digeco/rng.hpp"

namespace digeco {

struct EcosystemParams {
  std::uint32_t n_users = 100;
  int initial_agents_per_user = 5;
  int deploy_every_k_requests = 3;
  int k_init = 4;  // undirected links per habitat at start
  double community_links = 1.0;  // chance an initial link stays inside the community
  double p_init = 0.5;
  double hebbian_alpha = 0.1;
  double connection_floor = 0.05;
  double success_threshold = 0.9;
  std::uint32_t escape_budget = 3;
  std::uint32_t unused_threshold = 10;

  // User base. Users are split into communities; each community draws its
  // attribute ids from its own block and requests services from its own
  // catalogue, which the initial deployment only partly covers. Catalogue
  // entries are value perturbations of a few service templates.
  std::uint32_t n_communities = 10;
  int ids_per_community = 6;
  int catalogue_size = 72;
  int templates_per_community = 8;
  int template_delta = 20;  // values move by +-U(1, delta)
  DistributionSpec request_parts{DistributionKind::Uniform, 1, 2};
  // When set, each request part has this many attributes, gathered from
  // catalogue entries of the community; otherwise a part is one entry.
  std::optional<DistributionSpec> part_size;

  EvolutionParams evolution{.max_generations = 200, .stall_generations = 30};
  bool record_events = true;

  // Throws Error(Config) when the combination cannot be built.
  void validate() const;
  std::uint32_t community_of(UserId u) const { return u % n_communities; }
};

// A registered Agent-sequence in a pool.
struct StoredSequence {
  AgentSequence sequence;
  std::uint32_t unused_requests = 0;
  std::uint32_t escape_remaining = 0;
};

struct Habitat {
  HabitatId id = 0;
  UserId owner_user = 0;
  std::vector<Agent> agents;  // at most one copy of each service
  std::vector<StoredSequence> sequences;
  std::map<HabitatId, double> connections;  // outgoing

  Agent* find(ServiceId s);
  const Agent* find(ServiceId s) const;
  bool holds(ServiceId s) const { return find(s) != nullptr; }
};

enum class EventKind { Deploy, Migrate, Escape, Death, Request, Targeted };
const char* event_name(EventKind k);

struct Event {
  std::uint64_t time = 0;
  EventKind kind = EventKind::Request;
  std::uint64_t subject = 0;  // agent id, or habitat id for requests
  ServiceId service = 0;      // 0 for sequences and requests
  HabitatId from = 0;
  HabitatId to = 0;
  double fitness = 0.0;
};

class EventLog {
 public:
  explicit EventLog(bool enabled = true) : enabled_(enabled) {}
  void add(const Event& e) {
    if (enabled_) events_.push_back(e);
  }
  const std::vector<Event>& events() const { return events_; }
  void write_jsonl(std::ostream& os) const;

 private:
  bool enabled_;
  std::vector<Event> events_;
};

struct HabitatNetwork {
  std::vector<Habitat> habitats;
  AgentId next_agent_id = 1;
  std::uint64_t time = 0;
  EventLog log;

  // Throws UnknownHabitat.
  Habitat& at(HabitatId h);
  const Habitat& at(HabitatId h) const;
  double probability(HabitatId from, HabitatId to) const;  // 0 when absent
  std::size_t edge_count() const;
  std::size_t agent_count() const;
};

// Each habitat ends with about k_init undirected links (both directions at
// p_init); none is left isolated. Each link is drawn from the habitat's own
// community with probability community_links, else from the whole network.
HabitatNetwork init_network(const EcosystemParams& p, Rng& rng);

// New agent copy at `at`, with a fresh id and a history starting there.
Agent make_agent(HabitatNetwork& net, ServicePtr service, HabitatId at, const EcosystemParams& p);

// Adds the agent to the habitat and migrates it from there.
void deploy_agent(HabitatNetwork& net, HabitatId h, ServicePtr service, const EcosystemParams& p,
                  Rng& rng);

// Copies along every outgoing connection with that connection's
// probability. Habitats already holding the item receive nothing. Returns
// the receiving habitats.
std::vector<HabitatId> migrate(HabitatNetwork& net, HabitatId from, ServiceId service,
                               const EcosystemParams& p, Rng& rng);
// A sequence travels with its agents: missing ones are copied alongside.
std::vector<HabitatId> migrate(HabitatNetwork& net, HabitatId from, const StoredSequence& seq,
                               const EcosystemParams& p, Rng& rng);

// Reinforces origin->at edges on success (opening missing ones at p_init)
// and weakens them on failure, closing any that fall below the floor.
void hebbian_update(HabitatNetwork& net, std::span<const HabitatId> origins, HabitatId at,
                    bool success, const EcosystemParams& p);

// Called after a response has been executed at a habitat.
class ExecutionHook {
 public:
  virtual ~ExecutionHook() = default;
  virtual void after_execution(HabitatNetwork& net, HabitatId at, std::span<const ServiceId> executed,
                               const EcosystemParams& p, Rng& rng) = 0;
};

struct ResponseRecord {
  AgentSequence best;
  double fitness = 0.0;
  int generations = 0;
  bool success = false;
};

// Evolves a response from the habitat's pool, registers and executes it,
// migrates it and applies migration feedback. Throws EmptyPool.
ResponseRecord handle_request(HabitatNetwork& net, HabitatId h, const UserRequest& req,
                              const EcosystemParams& p, Rng& rng, ExecutionHook* hook = nullptr);

// Agents and sequences left unused for unused_threshold requests at their
// habitat move to a random connected habitat; with no escapes left, or
// nowhere to go, they die.
void decay_and_escape(HabitatNetwork& net, const EcosystemParams& p, Rng& rng);

// Request tuples exactly matched by some tuple of the sequence.
std::size_t matched_attributes(const AgentSequence& seq, const UserRequest& req);

// Mean of the last `window` fitness values, as a percentage.
double response_rate(std::span<const double> trace, std::size_t window);

// Hidden request catalogue and deployment schedule of the user base.
class UserBase {
 public:
  UserBase(const EcosystemParams& p, Rng& rng);

  std::uint32_t community_of(UserId u) const { return u % communities_; }
  const std::vector<SemanticDescription>& catalogue(std::uint32_t community) const {
    return catalogue_[community];
  }
  // Services deployed at start, in order, for one user.
  std::vector<SemanticDescription> initial_services(UserId u) const;
  // The next service a user deploys: an uncovered catalogue entry of its
  // community while any is left, then a new random description.
  SemanticDescription next_service(UserId u, Rng& rng);
  // Parts are distinct catalogue entries of the user's community.
  UserRequest request(UserId u, const DistributionSpec& parts, Rng& rng) const;
  // Parts of `part_size` attributes with distinct ids, taken entry by entry
  // from a shuffled catalogue; capped by the ids the catalogue covers.
  UserRequest request(UserId u, const DistributionSpec& parts, const DistributionSpec& part_size, Rng& rng) const;

 private:
  SemanticDescription random_description(std::uint32_t community, Rng& rng) const;
  SemanticDescription perturb(const SemanticDescription& t, Rng& rng) const;

  std::uint32_t communities_;
  std::uint32_t users_;
  int ids_per_community_;
  int initial_per_user_;
  int delta_;
  std::vector<std::vector<SemanticDescription>> catalogue_;  // deployment order
  std::vector<std::size_t> next_uncovered_;
};

struct StepRecord {
  std::uint64_t time = 0;
  UserId user = 0;
  std::size_t parts = 0;
  double fitness = 0.0;
  int generations = 0;
  std::size_t best_length = 0;
  std::size_t required = 0;  // request tuples
  std::size_t matched = 0;   // of those, exactly present in the response
};

// One simulated ecosystem: network, user base and the request loop.
class Ecosystem {
 public:
  Ecosystem(EcosystemParams p, std::uint64_t seed, ExecutionHook* hook = nullptr);

  StepRecord step();
  void run(std::size_t events);

  const EcosystemParams& params() const { return params_; }
  HabitatNetwork& network() { return net_; }
  const HabitatNetwork& network() const { return net_; }
  const UserBase& users() const { return users_; }
  const std::vector<StepRecord>& trace() const { return trace_; }
  std::vector<double> fitness_trace() const;
  // Every service ever deployed, by id.
  const std::vector<ServicePtr>& services() const { return services_; }

 private:
  ServicePtr new_service(SemanticDescription d, HabitatId owner);

  EcosystemParams params_;
  Rng master_;
  ExecutionHook* hook_;
  HabitatNetwork net_;
  UserBase users_;
  std::vector<ServicePtr> services_;
  std::vector<std::uint32_t> requests_made_;
  std::vector<StepRecord> trace_;
};

}  // namespace digeco
