#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "beacon/event_set.hpp"
#include "beacon/monitor.hpp"

namespace beacon {

// ---------------------------------------------------------------------------
// CVE database
// ---------------------------------------------------------------------------

struct CveEntry {
  std::string cve_id;
  double cvss = 0.0;   // [0, 10]
  EventSet vector;     // attack-vector events, non-empty
};

using CveDatabase = std::vector<CveEntry>;

// `beacon-cvedb v1` header, then `cve_id<TAB>cvss<TAB>event,event,...`.
// Blank lines and `#` comments are skipped. FormatError on malformed lines,
// ValidationError on a CVSS outside [0, 10] or an empty vector, ConflictError
// on a repeated CVE id.
CveDatabase parse_cvedb(std::string_view document);
CveDatabase load_cvedb_file(const std::string& path);
std::string write_cvedb(const CveDatabase& db);
inline constexpr std::string_view kCvedbHeader = "beacon-cvedb v1";

// Highest CVSS among entries whose vector contains e; 0 when unmapped.
double event_cvss(const Event& e, const CveDatabase& db);

// ---------------------------------------------------------------------------
// Observations
// ---------------------------------------------------------------------------

struct ObservedEnvironment {
  std::string id;
  std::string describe;
  EventSet events;
  std::map<Event, std::uint64_t> counts;
};

struct ObservationStore {
  std::string container;
  std::map<std::string, ObservedEnvironment> environments;  // keyed by id

  bool empty() const { return environments.empty(); }
  std::size_t size() const { return environments.size(); }
  bool has_baseline() const;

  // Adds a run. A second run of the same environment merges into the first
  // (event union, counts summed).
  void record(const std::string& describe, const Observation& obs);
  // Convenience for tests and generators: id is taken as given.
  void add(const std::string& id, EventSet events, const std::string& describe = {});

  EventSet observed_union() const;
};

// `store_version: 1` YAML.
ObservationStore read_store(std::string_view document);
ObservationStore load_store_file(const std::string& path);
std::string write_store(const ObservationStore& store);

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

// 1 - max CVSS(e)/10 over allowed; 1.0 for the empty set.
double security_score(const EventSet& allowed, const CveDatabase& db);
// Fraction of environments whose observed set is covered by allowed.
// ContractError on an empty store.
double functionality_score(const EventSet& allowed, const ObservationStore& obs);

struct ScoreTargets {
  double security_min = 0.0;
  double functionality_min = 1.0;

  void validate() const;  // RangeError outside [0, 1]
  // Highest admissible per-event CVSS, 10 * (1 - security_min).
  double cvss_ceiling() const { return 10.0 * (1.0 - security_min); }
  // True when an event with this CVSS keeps the security score at or above
  // the target.
  bool admissible(double cvss) const { return !(1.0 - cvss / 10.0 < security_min); }
};

struct EventClasses {
  EventSet always;    // in every environment
  EventSet sporadic;  // in some but not all
  std::map<Event, std::size_t> frequency;  // environments containing the event
};

EventClasses classify_events(const ObservationStore& obs);

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

enum class EventClass { AlwaysIn, SporadicIncluded, SporadicExcluded, NeverObserved };
std::string_view to_string(EventClass c);

struct Policy {
  std::string container;
  ScoreTargets targets;
  EventSet allowed;
  double achieved_security = 1.0;
  double achieved_functionality = 0.0;
  // Every observed event, plus database vector events that were never
  // observed.
  std::map<Event, EventClass> classification;
  // Sporadic events over the CVSS ceiling.
  EventSet over_ceiling;
};

struct Infeasible {
  enum class Reason { AlwaysEventOverCeiling, FunctionalityUnreachable };
  Reason reason = Reason::FunctionalityUnreachable;
  ScoreTargets targets;
  EventSet blocking;  // excluded events that stand in the way
  EventSet best_allowed;
  double best_security = 1.0;
  double best_functionality = 0.0;

  std::string describe() const;
};

using SynthesisResult = std::variant<Policy, Infeasible>;

// Always-set first, sporadic events over the ceiling excluded, the rest
// added greedily by descending frequency (then ascending CVSS, then name)
// until the functionality target is met. ContractError on an empty store,
// RangeError on targets outside [0, 1].
SynthesisResult synthesize_policy(const ObservationStore& obs, const CveDatabase& db, const ScoreTargets& targets);

// `policy_version: 1` YAML.
Policy read_policy(std::string_view document);
Policy load_policy_file(const std::string& path);
std::string write_policy(const Policy& policy);

struct MitigationRow {
  std::string cve_id;
  double cvss = 0.0;
  EventSet vector;
  EventSet missing;  // vector events the policy does not allow
  bool blocked() const { return !missing.empty(); }
};

std::vector<MitigationRow> check_mitigation(const Policy& policy, const CveDatabase& db);

struct SweepRow {
  ScoreTargets targets;
  bool feasible = false;
  std::size_t policy_size = 0;  // 0 when infeasible
  double security = 0.0;
  double functionality = 0.0;
};

std::vector<SweepRow> sweep(const ObservationStore& obs, const CveDatabase& db,
                            const std::vector<ScoreTargets>& targets);

}  // namespace beacon
