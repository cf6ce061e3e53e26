#include "digeco/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace digeco {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::TooShort: return "TooShort";
    case Errc::TooLong: return "TooLong";
    case Errc::UnknownHabitat: return "UnknownHabitat";
    case Errc::EmptyPool: return "EmptyPool";
    case Errc::SiteOutOfRange: return "SiteOutOfRange";
    case Errc::DegeneratePopulation: return "DegeneratePopulation";
    case Errc::EmptyCluster: return "EmptyCluster";
    case Errc::NotADistribution: return "NotADistribution";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::BinMismatch: return "BinMismatch";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

SemanticDescription SemanticDescription::canonicalize(std::vector<AttributeTuple> raw,
                                                      LengthCheck check) {
  for (const auto& t : raw) {
    if (t.id < kMinComponent || t.id > kMaxComponent || t.value < kMinComponent ||
        t.value > kMaxComponent) {
      throw Error(Errc::OutOfRange, "tuple (" + std::to_string(t.id) + "," +
                                        std::to_string(t.value) + ") outside [1,100]");
    }
  }
  if (check == LengthCheck::Agent) {
    if (raw.size() < kMinAgentTuples)
      throw Error(Errc::TooShort, "agent description needs at least 3 tuples");
    if (raw.size() > kMaxAgentTuples)
      throw Error(Errc::TooLong, "agent description allows at most 6 tuples");
  }
  std::sort(raw.begin(), raw.end());
  SemanticDescription d;
  d.tuples_ = std::move(raw);
  return d;
}

std::string SemanticDescription::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < tuples_.size(); ++i) {
    if (i) os << ", ";
    os << '(' << tuples_[i].id << ',' << tuples_[i].value << ')';
  }
  os << '}';
  return os.str();
}

double description_difference(const SemanticDescription& a, const SemanticDescription& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  // Both sides are sorted, so a merge pairs the k-th occurrence of an id in a
  // with the k-th occurrence in b.
  long total = 0;
  std::size_t i = 0, j = 0;
  const auto& ta = a.tuples();
  const auto& tb = b.tuples();
  while (i < ta.size() && j < tb.size()) {
    if (ta[i].id == tb[j].id) {
      total += std::abs(ta[i].value - tb[j].value);
      ++i;
      ++j;
    } else if (ta[i].id < tb[j].id) {
      total += kMaxComponent;
      ++i;
    } else {
      total += kMaxComponent;
      ++j;
    }
  }
  total += static_cast<long>((ta.size() - i) + (tb.size() - j)) * kMaxComponent;
  return static_cast<double>(total) / (2.0 * kMaxComponent * static_cast<double>(longest));
}

bool Agent::visited(HabitatId h) const {
  return std::any_of(migration_history.begin(), migration_history.end(),
                     [h](const MigrationRecord& r) { return r.habitat_id == h; });
}

void AgentSequence::add_origin(HabitatId h) {
  auto it = std::lower_bound(origin_habitats.begin(), origin_habitats.end(), h);
  if (it == origin_habitats.end() || *it != h) origin_habitats.insert(it, h);
}

void UserRequest::validate() const {
  if (parts.empty()) throw Error(Errc::InvalidArgument, "request has no parts");
  for (const auto& p : parts)
    if (p.empty()) throw Error(Errc::InvalidArgument, "request part has no tuples");
}

std::vector<AttributeTuple> UserRequest::flattened() const {
  std::vector<AttributeTuple> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace digeco
