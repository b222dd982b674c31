#include "beacon/decision.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <yaml-cpp/yaml.h>

#include "beacon/error.hpp"
#include "beacon/hash.hpp"
#include "beacon/text.hpp"
#include "beacon/yaml_io.hpp"

namespace beacon {
namespace {

std::vector<std::string> event_names(const EventSet& s) {
  std::vector<std::string> out;
  for (const auto& e : s.events()) out.push_back(e.name);
  return out;
}

YAML::Node flow_list(const std::vector<std::string>& items) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (const auto& s : items) n.push_back(s);
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

YAML::Node events_node(const EventSet& s) {
  YAML::Node node(YAML::NodeType::Map);
  node["syscalls"] = flow_list({s.syscalls.begin(), s.syscalls.end()});
  node["capabilities"] = flow_list({s.capabilities.begin(), s.capabilities.end()});
  return node;
}

EventSet events_from_node(const YAML::Node& parent, const char* key) {
  const auto node = yaml::require_map(parent, key);
  EventSet s;
  for (const auto& name : yaml::string_list(node, "syscalls")) s.insert(Event::syscall(name));
  for (const auto& name : yaml::string_list(node, "capabilities")) {
    const auto cap = canonical_capability(name);
    if (!is_known_capability(cap)) throw ValidationError("unknown capability '" + name + "'");
    s.insert(Event::capability(cap));
  }
  return s;
}

std::string baseline_id() {
  static const std::string id = fnv1a_128_hex("");
  return id;
}

void require_store(const ObservationStore& obs) {
  if (obs.empty()) throw ContractError("observation store is empty");
}

}  // namespace

// ---------------------------------------------------------------------------

CveDatabase parse_cvedb(std::string_view document) {
  const auto lines = text::split(document, '\n');
  if (lines.empty() || text::trim(lines[0]) != kCvedbHeader)
    throw FormatError("cvedb: missing '" + std::string(kCvedbHeader) + "' header");
  CveDatabase db;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto where = "cvedb line " + std::to_string(i + 1);
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) throw FormatError(where + ": expected 3 tab-separated fields");
    CveEntry e;
    e.cve_id = text::trim(fields[0]);
    if (e.cve_id.empty()) throw FormatError(where + ": empty CVE id");
    const auto cvss = text::parse_double(text::trim(fields[1]));
    if (!cvss) throw FormatError(where + ": CVSS is not a number");
    if (!(*cvss >= 0.0 && *cvss <= 10.0)) throw ValidationError(where + ": CVSS outside [0, 10]");
    e.cvss = *cvss;
    e.vector = EventSet::parse_list(fields[2]);
    if (e.vector.empty()) throw ValidationError(where + ": empty attack vector");
    if (!seen.insert(e.cve_id).second) throw ConflictError(where + ": duplicate " + e.cve_id);
    db.push_back(std::move(e));
  }
  return db;
}

CveDatabase load_cvedb_file(const std::string& path) { return parse_cvedb(text::read_file(path)); }

std::string write_cvedb(const CveDatabase& db) {
  std::string out = std::string(kCvedbHeader) + "\n";
  for (const auto& e : db) out += e.cve_id + "\t" + text::format_double(e.cvss) + "\t" + e.vector.to_list() + "\n";
  return out;
}

double event_cvss(const Event& e, const CveDatabase& db) {
  double worst = 0.0;
  for (const auto& entry : db)
    if (entry.vector.contains(e)) worst = std::max(worst, entry.cvss);
  return worst;
}

// ---------------------------------------------------------------------------

bool ObservationStore::has_baseline() const { return environments.count(baseline_id()) != 0; }

void ObservationStore::record(const std::string& describe, const Observation& obs) {
  auto& slot = environments[obs.environment_id];
  if (slot.id.empty()) {
    slot.id = obs.environment_id;
    slot.describe = describe;
  }
  slot.events |= obs.events;
  for (const auto& [e, n] : obs.counts) slot.counts[e] += n;
}

void ObservationStore::add(const std::string& id, EventSet events, const std::string& describe) {
  environments[id] = ObservedEnvironment{id, describe, std::move(events), {}};
}

EventSet ObservationStore::observed_union() const {
  EventSet u;
  for (const auto& [id, env] : environments) u |= env.events;
  return u;
}

ObservationStore read_store(std::string_view document) {
  const auto root = yaml::load(document, "observation store");
  yaml::require_version(root, "store_version", 1);
  ObservationStore store;
  store.container = yaml::require_scalar(root, "container");
  for (const auto& node : yaml::require_seq(root, "environments")) {
    ObservedEnvironment env;
    env.id = yaml::require_scalar(node, "id");
    if (node["describe"]) env.describe = node["describe"].as<std::string>();
    env.events = events_from_node(node, "events");
    if (node["counts"]) {
      for (const auto& kv : yaml::require_map(node, "counts")) {
        const auto e = Event::parse(kv.first.as<std::string>());
        const auto n = text::parse_u64(kv.second.as<std::string>());
        if (!n) throw FormatError("count for " + e.name + " is not a number");
        env.counts[e] = *n;
      }
    }
    const auto id = env.id;
    if (!store.environments.emplace(id, std::move(env)).second)
      throw FormatError("observation store lists environment " + id + " twice");
  }
  return store;
}

ObservationStore load_store_file(const std::string& path) { return read_store(text::read_file(path)); }

std::string write_store(const ObservationStore& store) {
  YAML::Node root;
  root["store_version"] = 1;
  root["container"] = store.container;
  YAML::Node envs(YAML::NodeType::Sequence);
  for (const auto& [id, env] : store.environments) {
    YAML::Node n;
    n["id"] = id;
    n["describe"] = env.describe;
    n["events"] = events_node(env.events);
    YAML::Node counts(YAML::NodeType::Map);
    for (const auto& [e, c] : env.counts) counts[e.name] = c;
    n["counts"] = counts;
    envs.push_back(n);
  }
  root["environments"] = envs;
  return yaml::emit(root);
}

// ---------------------------------------------------------------------------

double security_score(const EventSet& allowed, const CveDatabase& db) {
  double worst = 0.0;
  for (const auto& e : allowed.events()) worst = std::max(worst, event_cvss(e, db));
  return 1.0 - worst / 10.0;
}

double functionality_score(const EventSet& allowed, const ObservationStore& obs) {
  require_store(obs);
  std::size_t covered = 0;
  for (const auto& [id, env] : obs.environments)
    if (env.events.subset_of(allowed)) ++covered;
  return static_cast<double>(covered) / static_cast<double>(obs.size());
}

void ScoreTargets::validate() const {
  if (!(security_min >= 0.0 && security_min <= 1.0))
    throw RangeError("security target " + text::format_double(security_min) + " outside [0, 1]", "0", "1");
  if (!(functionality_min >= 0.0 && functionality_min <= 1.0))
    throw RangeError("functionality target " + text::format_double(functionality_min) + " outside [0, 1]", "0",
                     "1");
}

EventClasses classify_events(const ObservationStore& obs) {
  EventClasses out;
  for (const auto& [id, env] : obs.environments)
    for (const auto& e : env.events.events()) ++out.frequency[e];
  for (const auto& [e, n] : out.frequency) {
    if (n == obs.size())
      out.always.insert(e);
    else
      out.sporadic.insert(e);
  }
  return out;
}

std::string_view to_string(EventClass c) {
  switch (c) {
    case EventClass::AlwaysIn:
      return "always";
    case EventClass::SporadicIncluded:
      return "sporadic-included";
    case EventClass::SporadicExcluded:
      return "sporadic-excluded";
    case EventClass::NeverObserved:
      return "never-observed";
  }
  return "?";
}

std::string Infeasible::describe() const {
  std::string why = reason == Reason::AlwaysEventOverCeiling
                        ? "events observed in every environment exceed the CVSS ceiling"
                        : "functionality target unreachable with admissible events";
  return why + "; blocking: " + (blocking.empty() ? "-" : blocking.to_list()) +
         "; best security=" + text::format_double(best_security) +
         " functionality=" + text::format_double(best_functionality);
}

SynthesisResult synthesize_policy(const ObservationStore& obs, const CveDatabase& db, const ScoreTargets& targets) {
  require_store(obs);
  targets.validate();
  const auto classes = classify_events(obs);

  EventSet always_blocked;
  for (const auto& e : classes.always.events())
    if (!targets.admissible(event_cvss(e, db))) always_blocked.insert(e);

  struct Candidate {
    Event event;
    std::size_t frequency;
    double cvss;
  };
  std::vector<Candidate> candidates;
  EventSet over_ceiling;
  for (const auto& e : classes.sporadic.events()) {
    const double c = event_cvss(e, db);
    if (targets.admissible(c))
      candidates.push_back({e, classes.frequency.at(e), c});
    else
      over_ceiling.insert(e);
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    if (a.cvss != b.cvss) return a.cvss < b.cvss;
    if (a.event.name != b.event.name) return a.event.name < b.event.name;
    return a.event.kind < b.event.kind;
  });

  auto infeasible = [&](Infeasible::Reason reason, EventSet blocking) {
    Infeasible r;
    r.reason = reason;
    r.targets = targets;
    r.blocking = std::move(blocking);
    r.best_allowed = set_difference(classes.always, always_blocked);
    for (const auto& c : candidates) r.best_allowed.insert(c.event);
    r.best_security = security_score(r.best_allowed, db);
    r.best_functionality = functionality_score(r.best_allowed, obs);
    return r;
  };

  if (!always_blocked.empty()) return infeasible(Infeasible::Reason::AlwaysEventOverCeiling, always_blocked);

  EventSet allowed = classes.always;
  std::size_t taken = 0;
  while (functionality_score(allowed, obs) < targets.functionality_min && taken < candidates.size())
    allowed.insert(candidates[taken++].event);

  const double functionality = functionality_score(allowed, obs);
  if (functionality < targets.functionality_min) {
    // Excluded events standing between some uncovered environment and the
    // policy.
    EventSet blocking;
    for (const auto& [id, env] : obs.environments)
      if (!env.events.subset_of(allowed))
        for (const auto& e : env.events.events())
          if (over_ceiling.contains(e)) blocking.insert(e);
    return infeasible(Infeasible::Reason::FunctionalityUnreachable, blocking);
  }

  Policy p;
  p.container = obs.container;
  p.targets = targets;
  p.allowed = allowed;
  p.achieved_security = security_score(allowed, db);
  p.achieved_functionality = functionality;
  p.over_ceiling = over_ceiling;
  for (const auto& e : classes.always.events()) p.classification[e] = EventClass::AlwaysIn;
  for (const auto& e : classes.sporadic.events())
    p.classification[e] = allowed.contains(e) ? EventClass::SporadicIncluded : EventClass::SporadicExcluded;
  for (const auto& entry : db)
    for (const auto& e : entry.vector.events())
      if (!p.classification.count(e)) p.classification[e] = EventClass::NeverObserved;
  return p;
}

// ---------------------------------------------------------------------------

Policy read_policy(std::string_view document) {
  const auto root = yaml::load(document, "policy");
  yaml::require_version(root, "policy_version", 1);
  Policy p;
  p.container = yaml::require_scalar(root, "container");
  const auto targets = yaml::require_map(root, "targets");
  p.targets.security_min = yaml::require_double(targets, "security_min");
  p.targets.functionality_min = yaml::require_double(targets, "functionality_min");
  p.targets.validate();
  const auto achieved = yaml::require_map(root, "achieved");
  p.achieved_security = yaml::require_double(achieved, "security");
  p.achieved_functionality = yaml::require_double(achieved, "functionality");
  p.allowed = events_from_node(root, "allowed");
  for (const auto& name : p.allowed.capabilities)
    if (!is_known_capability(name)) throw ValidationError("unknown capability '" + name + "'");

  if (root["classification"]) {
    const auto cls = yaml::require_map(root, "classification");
    for (auto c : {EventClass::AlwaysIn, EventClass::SporadicIncluded, EventClass::SporadicExcluded,
                   EventClass::NeverObserved}) {
      const std::string key(to_string(c));
      for (const auto& name : yaml::string_list(cls, key.c_str())) p.classification[Event::parse(name)] = c;
    }
  }
  for (const auto& [e, c] : p.classification) {
    const bool in = p.allowed.contains(e);
    const bool should = c == EventClass::AlwaysIn || c == EventClass::SporadicIncluded;
    if (in != should)
      throw ValidationError("policy classifies " + e.name + " as " + std::string(to_string(c)) + " but " +
                            (in ? "allows" : "does not allow") + " it");
  }
  if (root["over_ceiling"])
    for (const auto& name : yaml::string_list(root, "over_ceiling")) p.over_ceiling.insert(Event::parse(name));
  return p;
}

Policy load_policy_file(const std::string& path) { return read_policy(text::read_file(path)); }

std::string write_policy(const Policy& p) {
  YAML::Node root;
  root["policy_version"] = 1;
  root["container"] = p.container;
  YAML::Node targets;
  targets["security_min"] = text::format_double(p.targets.security_min);
  targets["functionality_min"] = text::format_double(p.targets.functionality_min);
  root["targets"] = targets;
  YAML::Node achieved;
  achieved["security"] = text::format_double(p.achieved_security);
  achieved["functionality"] = text::format_double(p.achieved_functionality);
  root["achieved"] = achieved;
  root["allowed"] = events_node(p.allowed);
  YAML::Node cls(YAML::NodeType::Map);
  for (auto c : {EventClass::AlwaysIn, EventClass::SporadicIncluded, EventClass::SporadicExcluded,
                 EventClass::NeverObserved}) {
    std::vector<std::string> names;
    for (const auto& [e, k] : p.classification)
      if (k == c) names.push_back(e.name);
    cls[std::string(to_string(c))] = flow_list(names);
  }
  root["classification"] = cls;
  root["over_ceiling"] = flow_list(event_names(p.over_ceiling));
  return yaml::emit(root);
}

std::vector<MitigationRow> check_mitigation(const Policy& policy, const CveDatabase& db) {
  std::vector<MitigationRow> rows;
  for (const auto& entry : db) {
    MitigationRow r{entry.cve_id, entry.cvss, entry.vector, set_difference(entry.vector, policy.allowed)};
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRow> sweep(const ObservationStore& obs, const CveDatabase& db,
                            const std::vector<ScoreTargets>& targets) {
  std::vector<SweepRow> rows;
  for (const auto& t : targets) {
    SweepRow row;
    row.targets = t;
    const auto result = synthesize_policy(obs, db, t);
    if (const auto* p = std::get_if<Policy>(&result)) {
      row.feasible = true;
      row.policy_size = p->allowed.size();
      row.security = p->achieved_security;
      row.functionality = p->achieved_functionality;
    } else {
      const auto& inf = std::get<Infeasible>(result);
      row.security = inf.best_security;
      row.functionality = inf.best_functionality;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace beacon
