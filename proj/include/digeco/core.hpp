#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace digeco {

enum class Errc {
  OutOfRange,
  TooShort,
  TooLong,
  UnknownHabitat,
  EmptyPool,
  SiteOutOfRange,
  DegeneratePopulation,
  EmptyCluster,
  NotADistribution,
  ShapeMismatch,
  BinMismatch,
  UnknownScenario,
  InvalidArgument,
  Config,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline constexpr int kMinComponent = 1;
inline constexpr int kMaxComponent = 100;
inline constexpr std::size_t kMinAgentTuples = 3;
inline constexpr std::size_t kMaxAgentTuples = 6;

struct AttributeTuple {
  int id = 1;
  int value = 1;
  auto operator<=>(const AttributeTuple&) const = default;
};

enum class LengthCheck { None, Agent };

// Sorted list of (attribute id, value) tuples. Always canonical.
class SemanticDescription {
 public:
  SemanticDescription() = default;

  // Sorts and validates. Throws Error(OutOfRange|TooShort|TooLong).
  static SemanticDescription canonicalize(std::vector<AttributeTuple> raw,
                                          LengthCheck check = LengthCheck::None);

  const std::vector<AttributeTuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  auto begin() const { return tuples_.begin(); }
  auto end() const { return tuples_.end(); }

  bool operator==(const SemanticDescription&) const = default;
  auto operator<=>(const SemanticDescription&) const = default;

  std::string to_string() const;

 private:
  std::vector<AttributeTuple> tuples_;
};

// Normalised L1 difference in [0,1]. Tuples are paired by attribute id;
// a tuple left without a partner costs 100 on each of its two components.
double description_difference(const SemanticDescription& a, const SemanticDescription& b);

using ServiceId = std::uint64_t;
using AgentId = std::uint64_t;
using HabitatId = std::uint32_t;
using UserId = std::uint32_t;

// A deployed service. Every Agent copy in the ecosystem points at one.
struct Service {
  ServiceId id = 0;
  SemanticDescription description;
  HabitatId owner = 0;
};
using ServicePtr = std::shared_ptr<const Service>;

struct MigrationRecord {
  HabitatId habitat_id = 0;
  std::uint32_t uses = 0;
  bool operator==(const MigrationRecord&) const = default;
};

struct Agent {
  AgentId id = 0;
  ServicePtr service;
  std::vector<MigrationRecord> migration_history;  // first record is the owner habitat
  std::uint32_t escape_remaining = 0;
  std::uint32_t targeted_migrations = 0;
  std::uint32_t unused_requests = 0;

  const SemanticDescription& description() const { return service->description; }
  bool visited(HabitatId h) const;
};

struct AgentSequence {
  std::vector<ServicePtr> agents;       // order matters, repeats allowed
  std::vector<HabitatId> origin_habitats;  // sorted, unique

  std::size_t size() const { return agents.size(); }
  void add_origin(HabitatId h);
};

struct UserRequest {
  std::vector<std::vector<AttributeTuple>> parts;
  std::uint64_t issued_at = 0;

  // Throws InvalidArgument when a part or the part list is empty.
  void validate() const;
  // All required tuples across parts, in part order.
  std::vector<AttributeTuple> flattened() const;
};

}  // namespace digeco
