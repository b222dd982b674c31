#include "beacon/environment.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "beacon/error.hpp"
#include "beacon/hash.hpp"
#include "beacon/text.hpp"
#include "beacon/yaml_io.hpp"

namespace beacon {
namespace {

struct WorkloadField {
  const char* key;
  std::uint64_t WorkloadSpec::*member;
};

constexpr WorkloadField kWorkloadFields[] = {
    {"read", &WorkloadSpec::read_ops},         {"update", &WorkloadSpec::update_ops},
    {"scan", &WorkloadSpec::scan_ops},         {"insert", &WorkloadSpec::insert_ops},
    {"delete", &WorkloadSpec::delete_ops},     {"field_count", &WorkloadSpec::field_count},
    {"field_length", &WorkloadSpec::field_length}, {"threads", &WorkloadSpec::thread_count},
};

WorkloadSpec ycsb(std::uint64_t read, std::uint64_t update, std::uint64_t scan, std::uint64_t insert,
                  std::uint64_t del, std::uint64_t count, std::uint64_t length, std::uint64_t threads) {
  return {read, update, scan, insert, del, count, length, threads};
}

Environment finish(std::vector<OptionValue> options, std::vector<WorkloadSpec> workloads) {
  std::sort(options.begin(), options.end(),
            [](const OptionValue& a, const OptionValue& b) { return a.spec_name() < b.spec_name(); });
  for (std::size_t i = 1; i < options.size(); ++i)
    if (options[i].spec_name() == options[i - 1].spec_name())
      throw ConflictError("option '" + options[i].spec_name() + "' bound twice in one environment");

  for (const auto& w : workloads) w.validate();
  std::sort(workloads.begin(), workloads.end(),
            [](const WorkloadSpec& a, const WorkloadSpec& b) { return a.canonical() < b.canonical(); });
  workloads.erase(std::unique(workloads.begin(), workloads.end()), workloads.end());

  Environment env;
  env.options = std::move(options);
  env.workloads = std::move(workloads);
  env.id = fnv1a_128_hex(env.canonical_text());
  return env;
}

YAML::Node environment_node(const Environment& env) {
  YAML::Node node;
  node["id"] = env.id;
  node["describe"] = env.describe();
  YAML::Node opts(YAML::NodeType::Map);
  for (const auto& o : env.options) opts[o.spec_name()] = o.raw();
  node["options"] = opts;
  YAML::Node wls(YAML::NodeType::Sequence);
  for (const auto& w : env.workloads) wls.push_back(w.canonical());
  node["workloads"] = wls;
  return node;
}

Environment environment_from_node(const YAML::Node& node, const OptionCatalog& catalog) {
  std::vector<OptionValue> options;
  for (const auto& kv : yaml::require_map(node, "options"))
    options.push_back(validate_value(catalog.at(kv.first.as<std::string>()), kv.second.as<std::string>()));
  std::vector<WorkloadSpec> workloads;
  for (const auto& w : yaml::require_seq(node, "workloads"))
    workloads.push_back(WorkloadSpec::parse(w.as<std::string>()));
  auto env = compose_environment(std::move(options), std::move(workloads));
  const auto stored = yaml::require_scalar(node, "id");
  if (stored != env.id)
    throw FormatError("environment id " + stored + " does not match its contents (" + env.id + ")");
  return env;
}

}  // namespace

void WorkloadSpec::validate() const {
  if (read_ops + update_ops + scan_ops + insert_ops + delete_ops == 0)
    throw ValidationError("workload has no operations");
  for (auto ops : {read_ops, update_ops, scan_ops, insert_ops, delete_ops})
    if (ops > kMaxOperationCount)
      throw ValidationError("workload operation count " + std::to_string(ops) + " exceeds " +
                            std::to_string(kMaxOperationCount));
  if (field_count == 0 || field_length == 0 || thread_count == 0)
    throw ValidationError("workload field_count, field_length and threads must be positive");
}

std::string WorkloadSpec::canonical() const {
  std::vector<std::string> parts;
  for (const auto& f : kWorkloadFields) parts.push_back(std::string(f.key) + "=" + std::to_string(this->*f.member));
  return text::join(parts, ",");
}

WorkloadSpec WorkloadSpec::parse(std::string_view s) {
  WorkloadSpec w;
  for (const auto& item : text::split(s, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("workload entry '" + item + "' is not key=value");
    const auto key = text::trim(std::string_view(item).substr(0, eq));
    const auto value = text::parse_u64(text::trim(std::string_view(item).substr(eq + 1)));
    if (!value) throw ParseError("workload entry '" + item + "' has a non-numeric value");
    const auto* field = std::find_if(std::begin(kWorkloadFields), std::end(kWorkloadFields),
                                     [&](const WorkloadField& f) { return key == f.key; });
    if (field == std::end(kWorkloadFields)) throw ParseError("unknown workload key '" + std::string(key) + "'");
    w.*(field->member) = *value;
  }
  w.validate();
  return w;
}

std::optional<std::uint64_t> workload_field(const WorkloadSpec& w, std::string_view key) {
  for (const auto& f : kWorkloadFields)
    if (key == f.key) return w.*(f.member);
  return std::nullopt;
}

bool is_workload_key(std::string_view key) { return workload_field(WorkloadSpec{}, key).has_value(); }

const std::vector<WorkloadSpec>& workload_presets() {
  static const std::vector<WorkloadSpec> presets = {
      ycsb(1000, 0, 0, 1000, 0, 10, 100, 1),    // W1
      ycsb(0, 1000, 0, 1000, 0, 10, 100, 1),    // W2
      ycsb(0, 0, 1000, 1000, 0, 10, 100, 1),    // W3
      ycsb(0, 0, 0, 1000, 0, 10, 100, 1),       // W4
      ycsb(0, 0, 0, 1000, 1000, 10, 100, 1),    // W5
      ycsb(1000, 0, 0, 1000, 0, 500, 100, 1),   // W6
      ycsb(1000, 0, 0, 1000, 0, 10, 10000, 1),  // W7
      ycsb(1000, 0, 0, 1000, 0, 10, 100, 500),  // W8
  };
  return presets;
}

std::optional<WorkloadSpec> workload_preset(std::string_view name) {
  if (name.size() != 2 || (name[0] != 'W' && name[0] != 'w')) return std::nullopt;
  const int idx = name[1] - '1';
  if (idx < 0 || idx >= static_cast<int>(workload_presets().size())) return std::nullopt;
  return workload_presets()[static_cast<std::size_t>(idx)];
}

std::optional<std::string> preset_name(const WorkloadSpec& w) {
  const auto& presets = workload_presets();
  for (std::size_t i = 0; i < presets.size(); ++i)
    if (presets[i] == w) return "W" + std::to_string(i + 1);
  return std::nullopt;
}

const OptionValue* Environment::option(std::string_view name) const {
  for (const auto& o : options)
    if (o.spec_name() == name) return &o;
  return nullptr;
}

std::string Environment::canonical_text() const {
  std::string out;
  for (const auto& o : options) out += "option " + o.spec_name() + "=" + o.raw() + "\n";
  for (const auto& w : workloads) out += "workload " + w.canonical() + "\n";
  return out;
}

std::string Environment::describe() const {
  if (is_baseline()) return "baseline";
  std::vector<std::string> parts;
  for (const auto& o : options) parts.push_back(render_flag(o));
  for (const auto& w : workloads) parts.push_back("workload:" + preset_name(w).value_or(w.canonical()));
  return text::join(parts, " ");
}

Environment compose_environment(std::vector<OptionValue> options, std::optional<WorkloadSpec> workload) {
  std::vector<WorkloadSpec> workloads;
  if (workload) workloads.push_back(*workload);
  return finish(std::move(options), std::move(workloads));
}

Environment compose_environment(std::vector<OptionValue> options, std::vector<WorkloadSpec> workloads) {
  return finish(std::move(options), std::move(workloads));
}

Environment baseline_environment() { return finish({}, {}); }

Environment combine(const Environment& a, const Environment& b) {
  std::vector<OptionValue> options = a.options;
  for (const auto& o : b.options) {
    if (const auto* existing = a.option(o.spec_name())) {
      if (!(*existing == o))
        throw ConflictError("option '" + o.spec_name() + "' bound to different values in combined factors");
      continue;
    }
    options.push_back(o);
  }
  std::vector<WorkloadSpec> workloads = a.workloads;
  workloads.insert(workloads.end(), b.workloads.begin(), b.workloads.end());
  return finish(std::move(options), std::move(workloads));
}

Environment with_option(const Environment& env, OptionValue value) {
  std::vector<OptionValue> options;
  for (const auto& o : env.options)
    if (o.spec_name() != value.spec_name()) options.push_back(o);
  options.push_back(std::move(value));
  return finish(std::move(options), env.workloads);
}

Environment parse_factor(const OptionCatalog& catalog, std::string_view token) {
  token = text::trim(token);
  constexpr std::string_view kWorkload = "workload:";
  if (token.substr(0, kWorkload.size()) == kWorkload) {
    const auto body = token.substr(kWorkload.size());
    if (auto preset = workload_preset(body)) return compose_environment({}, *preset);
    return compose_environment({}, WorkloadSpec::parse(body));
  }
  return compose_environment({parse_flag(catalog, token)});
}

Environment parse_environment(const OptionCatalog& catalog, std::string_view spec) {
  Environment env = baseline_environment();
  std::istringstream in{std::string(spec)};
  std::string token;
  while (in >> token) {
    if (token == "baseline") continue;
    if (token.rfind("--", 0) != 0 && token.rfind("workload:", 0) != 0) token = "--" + token;
    env = combine(env, parse_factor(catalog, token));
  }
  return env;
}

EnvironmentPlan plan_environments(const std::vector<Environment>& factors) {
  EnvironmentPlan plan;
  plan.baseline = baseline_environment();
  std::set<std::string> seen;
  for (const auto& f : factors) {
    if (f.options.size() + f.workloads.size() != 1)
      throw ContractError("factor '" + f.describe() + "' must vary exactly one option or workload");
    if (!seen.insert(f.id).second) throw ContractError("factor '" + f.describe() + "' listed twice");
    plan.singletons.push_back(f);
  }
  for (std::size_t i = 0; i < plan.singletons.size(); ++i)
    for (std::size_t j = i + 1; j < plan.singletons.size(); ++j) {
      // Two values of the same option cannot be applied together.
      const auto& a = plan.singletons[i];
      const auto& b = plan.singletons[j];
      if (!a.options.empty() && !b.options.empty() && a.options[0].spec_name() == b.options[0].spec_name())
        continue;
      plan.composed.push_back({i, j, combine(a, b).id});
    }
  return plan;
}

std::string write_plan(const EnvironmentPlan& plan) {
  YAML::Node root;
  root["plan_version"] = 1;
  root["baseline"] = environment_node(plan.baseline);
  YAML::Node singles(YAML::NodeType::Sequence);
  for (const auto& s : plan.singletons) singles.push_back(environment_node(s));
  root["singletons"] = singles;
  YAML::Node pairs(YAML::NodeType::Sequence);
  for (const auto& p : plan.composed) {
    YAML::Node n;
    n["first"] = plan.singletons[p.first].id;
    n["second"] = plan.singletons[p.second].id;
    n["combined_id"] = p.combined_id;
    pairs.push_back(n);
  }
  root["inferred_pairs"] = pairs;
  return yaml::emit(root);
}

EnvironmentPlan read_plan(std::string_view document, const OptionCatalog& catalog) {
  const auto root = yaml::load(document, "plan");
  yaml::require_version(root, "plan_version", 1);
  EnvironmentPlan plan;
  plan.baseline = environment_from_node(yaml::require(root, "baseline"), catalog);
  if (!plan.baseline.is_baseline()) throw FormatError("plan baseline binds options or workloads");
  for (const auto& n : yaml::require_seq(root, "singletons"))
    plan.singletons.push_back(environment_from_node(n, catalog));

  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < plan.singletons.size(); ++i)
      if (plan.singletons[i].id == id) return i;
    throw FormatError("inferred pair references unknown factor " + id);
  };
  for (const auto& n : yaml::require_seq(root, "inferred_pairs")) {
    EnvironmentPlan::Pair p;
    p.first = index_of(yaml::require_scalar(n, "first"));
    p.second = index_of(yaml::require_scalar(n, "second"));
    if (p.first == p.second) throw FormatError("inferred pair references the same factor twice");
    p.combined_id = yaml::require_scalar(n, "combined_id");
    if (plan.combined(p).id != p.combined_id)
      throw FormatError("combined id " + p.combined_id + " does not match its factors");
    plan.composed.push_back(std::move(p));
  }
  return plan;
}

}  // namespace beacon
