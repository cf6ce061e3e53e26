#include "digeco/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace digeco {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(Errc::Config, path + ": " + what);
}

// Reads the known keys of one JSON object and rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    const json* v = take(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      config_error(at(key), "wrong type");
    }
    if constexpr (std::is_unsigned_v<T>)
      if (v->is_number_integer() && v->get<long long>() < 0) config_error(at(key), "must not be negative");
  }

  template <class Parse, class T>
  void get_enum(const char* key, T& out, Parse parse) {
    std::string name;
    get(key, name);
    if (!j_.contains(key)) return;
    try {
      out = parse(name);
    } catch (const Error& e) {
      config_error(at(key), e.what());
    }
  }

  void object(const char* key, const std::function<void(const json&, const std::string&)>& read) {
    const json* v = take(key);
    if (v) read(*v, at(key));
  }

  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) config_error(at(k.c_str()), "unknown key");
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_distribution(const json& j, const std::string& path, DistributionSpec& d) {
  Fields f(j, path);
  f.get_enum("kind", d.kind, parse_distribution);
  f.get("lo", d.lo);
  f.get("hi", d.hi);
  f.get("mean", d.mean);
  f.get("stddev", d.stddev);
  f.get("exponent", d.exponent);
  f.finish();
}

json distribution_json(const DistributionSpec& d) {
  return {{"kind", distribution_name(d.kind)}, {"lo", d.lo}, {"hi", d.hi},
          {"mean", d.mean}, {"stddev", d.stddev}, {"exponent", d.exponent}};
}

void read_evolution(const json& j, const std::string& path, EvolutionParams& e) {
  Fields f(j, path);
  f.get("crossover_rate", e.crossover_rate);
  f.get("mutation_rate", e.mutation_rate);
  f.get("pop_size_factor", e.pop_size_factor);
  f.get("max_generations", e.max_generations);
  f.get("stall_generations", e.stall_generations);
  f.get("min_population", e.min_population);
  f.get("initial_max_length", e.initial_max_length);
  f.get("stop_at_optimum", e.stop_at_optimum);
  f.finish();
}

json evolution_json(const EvolutionParams& e) {
  return {{"crossover_rate", e.crossover_rate},       {"mutation_rate", e.mutation_rate},
          {"pop_size_factor", e.pop_size_factor},     {"max_generations", e.max_generations},
          {"stall_generations", e.stall_generations}, {"min_population", e.min_population},
          {"initial_max_length", e.initial_max_length}, {"stop_at_optimum", e.stop_at_optimum}};
}

void read_ecosystem(const json& j, const std::string& path, EcosystemParams& p) {
  Fields f(j, path);
  f.get("n_users", p.n_users);
  f.get("initial_agents_per_user", p.initial_agents_per_user);
  f.get("deploy_every_k_requests", p.deploy_every_k_requests);
  f.get("k_init", p.k_init);
  f.get("community_links", p.community_links);
  f.get("p_init", p.p_init);
  f.get("hebbian_alpha", p.hebbian_alpha);
  f.get("connection_floor", p.connection_floor);
  f.get("success_threshold", p.success_threshold);
  f.get("escape_budget", p.escape_budget);
  f.get("unused_threshold", p.unused_threshold);
  f.get("n_communities", p.n_communities);
  f.get("ids_per_community", p.ids_per_community);
  f.get("catalogue_size", p.catalogue_size);
  f.get("templates_per_community", p.templates_per_community);
  f.get("template_delta", p.template_delta);
  f.object("request_parts", [&](const json& v, const std::string& at) { read_distribution(v, at, p.request_parts); });
  f.object("part_size", [&](const json& v, const std::string& at) {
    if (v.is_null()) {
      p.part_size.reset();
      return;
    }
    DistributionSpec d = p.part_size.value_or(DistributionSpec{});
    read_distribution(v, at, d);
    p.part_size = d;
  });
  f.object("evolution", [&](const json& v, const std::string& at) { read_evolution(v, at, p.evolution); });
  f.get("record_events", p.record_events);
  f.finish();
}

json ecosystem_json(const EcosystemParams& p) {
  json j = {{"n_users", p.n_users},
            {"initial_agents_per_user", p.initial_agents_per_user},
            {"deploy_every_k_requests", p.deploy_every_k_requests},
            {"k_init", p.k_init},
            {"community_links", p.community_links},
            {"p_init", p.p_init},
            {"hebbian_alpha", p.hebbian_alpha},
            {"connection_floor", p.connection_floor},
            {"success_threshold", p.success_threshold},
            {"escape_budget", p.escape_budget},
            {"unused_threshold", p.unused_threshold},
            {"n_communities", p.n_communities},
            {"ids_per_community", p.ids_per_community},
            {"catalogue_size", p.catalogue_size},
            {"templates_per_community", p.templates_per_community},
            {"template_delta", p.template_delta},
            {"request_parts", distribution_json(p.request_parts)},
            {"part_size", p.part_size ? distribution_json(*p.part_size) : json(nullptr)},
            {"evolution", evolution_json(p.evolution)},
            {"record_events", p.record_events}};
  return j;
}

void read_mlp(const json& j, const std::string& path, MlpParams& m) {
  Fields f(j, path);
  f.get("learning_rate", m.learning_rate);
  f.get("epochs", m.epochs);
  f.get("online_steps", m.online_steps);
  f.get("balance_classes", m.balance_classes);
  f.get("variants", m.variants.variants);
  f.get("max_delta", m.variants.max_delta);
  f.get("threshold", m.variants.threshold);
  f.finish();
}

void read_targeted(const json& j, const std::string& path, TargetedMigrationConfig& t) {
  Fields f(j, path);
  f.get("enabled", t.enabled);
  f.get_enum("recognizer", t.recognizer, parse_recognizer);
  f.get_enum("mode", t.mode, parse_targeting);
  f.object("mlp", [&](const json& v, const std::string& at) { read_mlp(v, at, t.mlp); });
  f.get("interaction_cap", t.interaction_cap);
  f.get("online_learning", t.online_learning);
  f.finish();
}

void read_catalyst(const json& j, const std::string& path, CatalystConfig& c) {
  Fields f(j, path);
  f.get("enabled", c.enabled);
  f.get_enum("algorithm", c.algorithm, parse_cluster_algorithm);
  f.get("k", c.k);
  f.get("crossover_rate", c.crossover_rate);
  f.finish();
}

void read_grid(const json& j, const std::string& path, GridSpec& g) {
  Fields f(j, path);
  f.get("mutations", g.mutations);
  f.get("crossovers", g.crossovers);
  f.finish();
}

std::vector<double> tenths() {
  std::vector<double> v;
  for (int i = 0; i <= 10; ++i) v.push_back(i / 10.0);
  return v;
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "succession", "species-abundance", "species-area",         "complexity", "stability",
      "stability-grid", "diversity-length", "diversity-modularity", "catalyst", "targeted-migration"};
  return names;
}

bool is_scenario(const std::string& name) {
  const auto& n = scenario_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

RunConfig default_config(const std::string& scenario) {
  if (!is_scenario(scenario)) throw Error(Errc::UnknownScenario, "unknown scenario '" + scenario + "'");
  RunConfig c;
  c.scenario = scenario;
  c.grid = {tenths(), tenths()};
  // Event logs are only needed for inspection, not for the reports.
  c.ecosystem.record_events = false;
  if (scenario == "diversity-length") {
    // One attribute per part, so a request of length n needs n agents.
    c.ecosystem.request_parts = {DistributionKind::Uniform, 1, 17, 9.0, 3.0};
    c.ecosystem.part_size = DistributionSpec{DistributionKind::Uniform, 1, 1};
  } else if (scenario == "diversity-modularity") {
    // Blocks of 12 ids leave room for parts of up to 11 attributes.
    c.ecosystem.n_communities = 8;
    c.ecosystem.ids_per_community = 12;
    c.ecosystem.request_parts = {DistributionKind::Uniform, 1, 1};
    c.ecosystem.part_size = DistributionSpec{DistributionKind::Uniform, 1, 11, 6.0, 2.0};
  } else if (scenario == "catalyst") {
    c.runs = 200;
  } else if (scenario == "targeted-migration") {
    c.targeted.enabled = true;
  }
  return c;
}

void merge_config(RunConfig& c, const json& j) {
  Fields f(j, "");
  std::string scenario = c.scenario;
  f.get("scenario", scenario);
  if (scenario != c.scenario) {
    if (!is_scenario(scenario)) config_error("scenario", "unknown scenario '" + scenario + "'");
    c.scenario = scenario;
  }
  f.get("seed", c.seed);
  f.get("runs", c.runs);
  f.get("runs_per_cell", c.runs_per_cell);
  f.get("workers", c.workers);
  f.get("output_dir", c.output_dir);
  f.get("events", c.events);
  f.get("window", c.window);
  f.get("early_event", c.early_event);
  f.get("generations", c.generations);
  f.get("sample_every", c.sample_every);
  f.get("cluster_keys", c.cluster_keys);
  f.get("catalyst_horizon", c.catalyst_horizon);
  f.object("ecosystem", [&](const json& v, const std::string& at) { read_ecosystem(v, at, c.ecosystem); });
  f.object("evolution", [&](const json& v, const std::string& at) { read_evolution(v, at, c.evolution); });
  f.object("catalyst", [&](const json& v, const std::string& at) { read_catalyst(v, at, c.catalyst); });
  f.object("targeted", [&](const json& v, const std::string& at) { read_targeted(v, at, c.targeted); });
  f.object("grid", [&](const json& v, const std::string& at) { read_grid(v, at, c.grid); });
  f.get("arms", c.arms);
  f.get("mlp_runs", c.mlp_runs);
  f.finish();
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Config, path + ": " + e.what());
  }
}

json to_json(const RunConfig& c) {
  json targeted = {{"enabled", c.targeted.enabled},
                   {"recognizer", recognizer_name(c.targeted.recognizer)},
                   {"mode", targeting_name(c.targeted.mode)},
                   {"mlp",
                    {{"learning_rate", c.targeted.mlp.learning_rate},
                     {"epochs", c.targeted.mlp.epochs},
                     {"online_steps", c.targeted.mlp.online_steps},
                     {"balance_classes", c.targeted.mlp.balance_classes},
                     {"variants", c.targeted.mlp.variants.variants},
                     {"max_delta", c.targeted.mlp.variants.max_delta},
                     {"threshold", c.targeted.mlp.variants.threshold}}},
                   {"interaction_cap", c.targeted.interaction_cap},
                   {"online_learning", c.targeted.online_learning}};
  // output_dir and workers are left out: they never change the results.
  return {{"scenario", c.scenario},
          {"seed", c.seed},
          {"runs", c.runs},
          {"runs_per_cell", c.runs_per_cell},
          {"events", c.events},
          {"window", c.window},
          {"early_event", c.early_event},
          {"generations", c.generations},
          {"sample_every", c.sample_every},
          {"cluster_keys", c.cluster_keys},
          {"catalyst_horizon", c.catalyst_horizon},
          {"ecosystem", ecosystem_json(c.ecosystem)},
          {"evolution", evolution_json(c.evolution)},
          {"catalyst",
           {{"enabled", c.catalyst.enabled},
            {"algorithm", cluster_algorithm_name(c.catalyst.algorithm)},
            {"k", c.catalyst.k},
            {"crossover_rate", c.catalyst.crossover_rate}}},
          {"targeted", targeted},
          {"grid", {{"mutations", c.grid.mutations}, {"crossovers", c.grid.crossovers}}},
          {"arms", c.arms},
          {"mlp_runs", c.mlp_runs}};
}

void RunConfig::validate() const {
  if (!is_scenario(scenario)) config_error("scenario", "unknown scenario '" + scenario + "'");
  if (runs < 1) config_error("runs", "must be at least 1");
  if (runs_per_cell < 1) config_error("runs_per_cell", "must be at least 1");
  if (workers < 0) config_error("workers", "must not be negative");
  if (window < 1) config_error("window", "must be positive");
  if (events < window) config_error("events", "must be at least one window");
  if (early_event < 1 || early_event > events) config_error("early_event", "must be in [1, events]");
  if (generations < 1) config_error("generations", "must be positive");
  if (sample_every < 1) config_error("sample_every", "must be positive");
  if (cluster_keys < 1 || cluster_keys > 6) config_error("cluster_keys", "must be in [1,6]");
  if (catalyst_horizon < 1) config_error("catalyst_horizon", "must be positive");
  for (const auto& [name, e] : {std::pair{"evolution", evolution}, std::pair{"ecosystem.evolution", ecosystem.evolution}}) {
    if (!in_unit(e.crossover_rate)) config_error(std::string(name) + ".crossover_rate", "must be in [0,1]");
    if (!in_unit(e.mutation_rate)) config_error(std::string(name) + ".mutation_rate", "must be in [0,1]");
    if (!(e.pop_size_factor > 0.0)) config_error(std::string(name) + ".pop_size_factor", "must be positive");
    if (e.min_population < 2) config_error(std::string(name) + ".min_population", "must be at least 2");
    if (e.initial_max_length < 1) config_error(std::string(name) + ".initial_max_length", "must be positive");
  }
  if (!in_unit(catalyst.crossover_rate)) config_error("catalyst.crossover_rate", "must be in [0,1]");
  if (catalyst.k < 1) config_error("catalyst.k", "must be positive");
  if (targeted.mlp.epochs < 1) config_error("targeted.mlp.epochs", "must be positive");
  if (targeted.mlp.variants.variants < 1) config_error("targeted.mlp.variants", "must be positive");
  for (double m : grid.mutations)
    if (!in_unit(m)) config_error("grid.mutations", "values must be in [0,1]");
  for (double x : grid.crossovers)
    if (!in_unit(x)) config_error("grid.crossovers", "values must be in [0,1]");
  static const std::set<std::string> known_arms = {"baseline", "targeted", "pr_control", "random_control"};
  for (const auto& a : arms)
    if (!known_arms.count(a)) config_error("arms", "unknown arm '" + a + "'");
  try {
    ecosystem.validate();
  } catch (const Error& e) {
    config_error("ecosystem", e.what());
  }
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(cfg).dump())));
  return buf;
}

}  // namespace digeco
