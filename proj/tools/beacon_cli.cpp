// beacon: command-line front end for environment-aware policy synthesis.
//
// Exit status: 0 success, 2 infeasible synthesis, 1 any other error. Errors
// are reported on stderr as one line: `error<TAB>code<TAB>message`.

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "beacon/decision.hpp"
#include "beacon/emitter.hpp"
#include "beacon/environment.hpp"
#include "beacon/error.hpp"
#include "beacon/explorer.hpp"
#include "beacon/monitor.hpp"
#include "beacon/simharness.hpp"
#include "beacon/text.hpp"

namespace {

using namespace beacon;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

bool g_tsv = false;

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\t', ' ');
  return s;
}

int fail(const std::string& code, const std::string& message) {
  std::cerr << "error\t" << code << "\t" << one_line(message) << "\n";
  return kExitError;
}

// Key/value report line.
void kv(std::ostream& out, const std::string& key, const std::string& value) {
  if (g_tsv)
    out << key << "\t" << value << "\n";
  else
    out << key << ": " << value << "\n";
}

std::string num(double v) { return text::format_double(v); }

// Writes to `path`, or to stdout when path is empty or "-".
void emit_to(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    text::write_file(path, content);
}

void print_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  if (g_tsv) {
    std::cout << text::join(header, "\t") << "\n";
    for (const auto& r : rows) std::cout << text::join(r, "\t") << "\n";
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      s += cells[i];
      if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size() + 2, ' ');
    }
    std::cout << s << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string list_or_dash(const EventSet& s) { return s.empty() ? "-" : s.to_list(); }

ScoreTargets parse_target(const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) throw ParseError("target '" + token + "' is not security:functionality");
  const auto s = text::parse_double(text::trim(std::string_view(token).substr(0, colon)));
  const auto f = text::parse_double(text::trim(std::string_view(token).substr(colon + 1)));
  if (!s || !f) throw ParseError("target '" + token + "' is not security:functionality");
  ScoreTargets t{*s, *f};
  t.validate();
  return t;
}

void require_baseline(const ObservationStore& store) {
  if (!store.has_baseline())
    throw ContractError("observation store '" + store.container + "' has no baseline environment");
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string trace;
  std::string store;
  std::string catalog;
  std::string environment;
  std::string container;
  std::uint64_t ns = 0;
  bool ns_given = false;
};

int run_ingest(const IngestArgs& a) {
  const auto results = ingest_trace(parse_trace(text::read_file(a.trace)));
  std::uint64_t ns = a.ns;
  if (!a.ns_given) {
    if (results.size() != 1)
      throw ContractError("trace has " + std::to_string(results.size()) +
                          " tracked namespaces; pass --namespace to pick one");
    ns = results.begin()->first;
  }

  Environment env = baseline_environment();
  if (!text::trim(a.environment).empty() && text::trim(a.environment) != "baseline") {
    if (a.catalog.empty()) throw ContractError("--environment needs --catalog");
    env = parse_environment(load_catalog_file(a.catalog), a.environment);
  }

  ObservationStore store;
  if (std::filesystem::exists(a.store)) store = read_store(text::read_file(a.store));
  if (!a.container.empty()) {
    if (!store.container.empty() && store.container != a.container)
      throw ConflictError("store holds container '" + store.container + "', not '" + a.container + "'");
    store.container = a.container;
  }
  if (store.container.empty()) throw ContractError("new observation store needs --container");

  const auto obs = event_set_for(env.id, results, ns);
  store.record(env.describe(), obs);
  text::write_file(a.store, write_store(store));
  kv(std::cout, "environment", env.id);
  kv(std::cout, "describe", env.describe());
  kv(std::cout, "events", std::to_string(obs.events.size()));
  kv(std::cout, "environments", std::to_string(store.size()));
  return kExitOk;
}

int run_plan(const std::string& catalog_path, const std::vector<std::string>& tokens, const std::string& out) {
  const auto catalog = load_catalog_file(catalog_path);
  std::vector<Environment> factors;
  for (const auto& t : tokens) factors.push_back(parse_environment(catalog, t));
  emit_to(out, write_plan(plan_environments(factors)));
  return kExitOk;
}

struct ExploreArgs {
  std::string target;
  std::string option;
  std::string catalog;
  std::string base;
  std::vector<std::string> config;
  std::string log;
  bool via_trace = false;
};

int run_explore(const ExploreArgs& a) {
  const auto catalog = load_catalog_file(a.catalog);
  const auto& spec = catalog.at(a.option);
  const auto domain = integer_domain(*spec->syntax);
  if (!domain) throw ContractError("option '" + a.option + "' is not integer-typed");

  auto config = MutationConfig::for_domain(domain->lo, domain->hi);
  for (const auto& item : a.config) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("--config expects key=value, got '" + item + "'");
    config.set(text::trim(std::string_view(item).substr(0, eq)), text::trim(std::string_view(item).substr(eq + 1)));
  }

  std::unique_ptr<EventProbe> probe;
  constexpr std::string_view kCommand = "cmd:";
  if (a.target.rfind(kCommand, 0) == 0)
    probe = std::make_unique<CommandProbe>(a.target.substr(kCommand.size()));
  else
    probe = std::make_unique<ModelProbe>(load_model_file(a.target, catalog), a.via_trace, config.seed);

  const Environment base = parse_environment(catalog, a.base);
  ExplorationResult result;
  try {
    result = mutate_option_values(base, spec, config, *probe);
  } catch (const ExplorationAborted& e) {
    if (!a.log.empty()) text::write_file(a.log, e.partial().log.to_text());
    throw;
  }
  if (a.log.empty()) {
    std::cout << result.log.to_text();
  } else {
    text::write_file(a.log, result.log.to_text());
  }
  kv(std::cout, "probes", std::to_string(result.log.steps.size()));
  kv(std::cout, "events", list_or_dash(result.events));
  return kExitOk;
}

int run_validate_inference(const std::string& model_path, const std::string& plan_path,
                           const std::string& catalog_path, bool via_trace) {
  const auto catalog = load_catalog_file(catalog_path);
  const auto plan = read_plan(text::read_file(plan_path), catalog);
  ModelProbe probe(load_model_file(model_path, catalog), via_trace);
  InferenceSummary summary;
  std::vector<std::vector<std::string>> rows;
  for (const auto& pair : plan.composed) {
    const auto& f1 = plan.singletons[pair.first];
    const auto& f2 = plan.singletons[pair.second];
    const auto report = validate_inference(probe, plan.baseline, f1, f2);
    summary.add(report);
    rows.push_back({f1.describe(), f2.describe(), report.exact ? "exact" : "differs", std::to_string(report.delta),
                    std::to_string(report.size_difference)});
  }
  print_table({"factor_1", "factor_2", "result", "delta", "size_difference"}, rows);
  kv(std::cout, "pairs", std::to_string(summary.pairs));
  kv(std::cout, "exact", std::to_string(summary.exact));
  kv(std::cout, "exact_rate", num(summary.exact_rate()));
  for (const auto& [d, n] : summary.delta_histogram) kv(std::cout, "delta." + std::to_string(d), std::to_string(n));
  return kExitOk;
}

int run_score(const std::string& store_path, const std::string& db_path, const std::string& policy_arg) {
  const auto store = load_store_file(store_path);
  const auto db = load_cvedb_file(db_path);
  const EventSet allowed = std::filesystem::is_regular_file(policy_arg) ? load_policy_file(policy_arg).allowed
                                                                        : EventSet::parse_list(policy_arg);
  kv(std::cout, "security", num(security_score(allowed, db)));
  kv(std::cout, "functionality", num(functionality_score(allowed, store)));
  return kExitOk;
}

void print_infeasible(const Infeasible& r) {
  kv(std::cout, "status", "infeasible");
  kv(std::cout, "reason",
     r.reason == Infeasible::Reason::AlwaysEventOverCeiling ? "always-event-over-ceiling" : "functionality-unreachable");
  kv(std::cout, "blocking", list_or_dash(r.blocking));
  kv(std::cout, "best_security", num(r.best_security));
  kv(std::cout, "best_functionality", num(r.best_functionality));
}

int run_synthesize(const std::string& store_path, const std::string& db_path, const ScoreTargets& targets,
                   const std::string& out) {
  const auto store = load_store_file(store_path);
  require_baseline(store);
  const auto db = load_cvedb_file(db_path);
  const auto result = synthesize_policy(store, db, targets);
  if (const auto* inf = std::get_if<Infeasible>(&result)) {
    print_infeasible(*inf);
    return kExitInfeasible;
  }
  const auto& p = std::get<Policy>(result);
  if (out.empty() || out == "-") {
    std::cout << write_policy(p);
  } else {
    text::write_file(out, write_policy(p));
    kv(std::cout, "status", "ok");
    kv(std::cout, "policy_size", std::to_string(p.allowed.size()));
    kv(std::cout, "security", num(p.achieved_security));
    kv(std::cout, "functionality", num(p.achieved_functionality));
  }
  return kExitOk;
}

int run_sweep(const std::string& store_path, const std::string& db_path, const std::string& targets_arg) {
  const auto store = load_store_file(store_path);
  require_baseline(store);
  const auto db = load_cvedb_file(db_path);
  std::vector<ScoreTargets> targets;
  for (const auto& t : text::split(targets_arg, ','))
    if (!text::trim(t).empty()) targets.push_back(parse_target(std::string(text::trim(t))));
  if (targets.empty()) throw ParseError("--targets is empty");
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : sweep(store, db, targets))
    rows.push_back({num(r.targets.security_min), num(r.targets.functionality_min), r.feasible ? "yes" : "no",
                    std::to_string(r.policy_size), num(r.security), num(r.functionality)});
  print_table({"security_min", "functionality_min", "feasible", "policy_size", "security", "functionality"}, rows);
  return kExitOk;
}

int run_emit(const std::string& policy_path, const std::string& seccomp_out, const std::string& caps_out,
             const std::vector<std::string>& arches) {
  const auto policy = load_policy_file(policy_path);
  SeccompOptions options;
  if (!arches.empty()) options.architectures = arches;
  if (seccomp_out.empty() && caps_out.empty()) throw ContractError("emit needs --seccomp and/or --caps");
  if (!seccomp_out.empty()) emit_to(seccomp_out, emit_seccomp_profile(policy, options));
  if (!caps_out.empty()) emit_to(caps_out, text::join(emit_capability_flags(policy), "\n") + "\n");
  return kExitOk;
}

int run_check(const std::string& policy_path, const std::string& db_path) {
  const auto policy = load_policy_file(policy_path);
  const auto db = load_cvedb_file(db_path);
  std::vector<std::vector<std::string>> rows;
  std::size_t blocked = 0;
  for (const auto& r : check_mitigation(policy, db)) {
    blocked += r.blocked();
    rows.push_back({r.cve_id, num(r.cvss), r.vector.to_list(), r.blocked() ? "blocked" : "allowed",
                    list_or_dash(r.missing)});
  }
  print_table({"cve", "cvss", "vector", "status", "missing"}, rows);
  kv(std::cout, "blocked", std::to_string(blocked) + "/" + std::to_string(rows.size()));
  return kExitOk;
}

struct SimulateArgs {
  std::string model;
  std::string catalog;
  std::string environment;
  std::uint64_t ns = 4026532000;
  std::uint64_t seed = 0;
  bool noise = false;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const auto catalog = load_catalog_file(a.catalog);
  const auto model = load_model_file(a.model, catalog);
  TraceOptions options;
  options.runtime_noise = a.noise;
  emit_to(a.out, emit_trace(model, parse_environment(catalog, a.environment), a.ns, a.seed, options));
  return kExitOk;
}

int run_observe(const std::string& model_path, const std::string& plan_path, const std::string& catalog_path,
                std::uint64_t seed, const std::string& out) {
  const auto catalog = load_catalog_file(catalog_path);
  const auto model = load_model_file(model_path, catalog);
  const auto plan = read_plan(text::read_file(plan_path), catalog);
  ObservationStore store;
  store.container = model.name;
  std::vector<Environment> envs = {plan.baseline};
  envs.insert(envs.end(), plan.singletons.begin(), plan.singletons.end());
  for (std::size_t i = 0; i < envs.size(); ++i) store.record(envs[i].describe(), observe(model, envs[i], seed + i));
  emit_to(out, write_store(store));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Environment-aware seccomp and capability policy synthesis"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "tsv"}));

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Add a trace's observation to an observation store");
  c_ingest->add_option("trace", ingest.trace, "beacon-trace v1 file")->required();
  c_ingest->add_option("--store", ingest.store, "Observation store file (created if missing)")->required();
  c_ingest->add_option("--catalog", ingest.catalog, "Option catalog");
  c_ingest->add_option("--environment", ingest.environment, "Factor tokens the trace ran under");
  c_ingest->add_option("--container", ingest.container, "Container name");
  auto* ns_opt = c_ingest->add_option("--namespace", ingest.ns, "Namespace id to take");

  std::string plan_catalog, plan_out;
  std::vector<std::string> plan_factors;
  auto* c_plan = app.add_subcommand("plan", "Plan baseline, singleton and inferred environments");
  c_plan->add_option("catalog", plan_catalog, "Option catalog")->required();
  c_plan->add_option("factors", plan_factors, "Factors, e.g. init network=host workload:W1")->required();
  c_plan->add_option("-o,--output", plan_out, "Plan file (default stdout)");

  ExploreArgs explore;
  auto* c_explore = app.add_subcommand("explore", "Adaptive value search over one integer option");
  c_explore->add_option("target", explore.target, "Model file, or cmd:<command> for an external probe")->required();
  c_explore->add_option("option", explore.option, "Integer-typed option name")->required();
  c_explore->add_option("--catalog", explore.catalog, "Option catalog")->required();
  c_explore->add_option("--base", explore.base, "Environment the option is varied in");
  c_explore->add_option("--config", explore.config, "Mutation parameter key=value");
  c_explore->add_option("--log", explore.log, "Exploration log file (default stdout)");
  c_explore->add_flag("--via-trace", explore.via_trace, "Route model probes through the trace monitor");

  std::string vi_model, vi_plan, vi_catalog;
  bool vi_trace = false;
  auto* c_vi = app.add_subcommand("validate-inference", "Compare inferred and observed combined event sets");
  c_vi->add_option("model", vi_model, "Model file")->required();
  c_vi->add_option("plan", vi_plan, "Plan file")->required();
  c_vi->add_option("--catalog", vi_catalog, "Option catalog")->required();
  c_vi->add_flag("--via-trace", vi_trace, "Route probes through the trace monitor");

  std::string sc_store, sc_db, sc_policy;
  auto* c_score = app.add_subcommand("score", "Security and functionality scores of an event set");
  c_score->add_option("observations", sc_store, "Observation store")->required();
  c_score->add_option("cvedb", sc_db, "CVE database")->required();
  c_score->add_option("--policy", sc_policy, "Comma-separated events, or a policy file")->required();

  std::string sy_store, sy_db, sy_out;
  ScoreTargets sy_targets;
  auto* c_syn = app.add_subcommand("synthesize", "Synthesize a policy under score targets");
  c_syn->add_option("observations", sy_store, "Observation store")->required();
  c_syn->add_option("cvedb", sy_db, "CVE database")->required();
  c_syn->add_option("--security-min", sy_targets.security_min, "Security target in [0,1]")->required();
  c_syn->add_option("--functionality-min", sy_targets.functionality_min, "Functionality target in [0,1]")->required();
  c_syn->add_option("-o,--output", sy_out, "Policy file (default stdout)");

  std::string sw_store, sw_db, sw_targets;
  auto* c_sweep = app.add_subcommand("sweep", "Synthesize across several target pairs");
  c_sweep->add_option("observations", sw_store, "Observation store")->required();
  c_sweep->add_option("cvedb", sw_db, "CVE database")->required();
  c_sweep->add_option("--targets", sw_targets, "Comma-separated security:functionality pairs")->required();

  std::string em_policy, em_seccomp, em_caps;
  std::vector<std::string> em_arches;
  auto* c_emit = app.add_subcommand("emit", "Write seccomp profile and capability flags");
  c_emit->add_option("policy", em_policy, "Policy file")->required();
  c_emit->add_option("--seccomp", em_seccomp, "Seccomp profile output (- for stdout)");
  c_emit->add_option("--caps", em_caps, "Capability flag output (- for stdout)");
  c_emit->add_option("--arch", em_arches, "Architecture tags (default x86_64 with compat tags)");

  std::string ck_policy, ck_db;
  auto* c_check = app.add_subcommand("check", "Report which CVE attack vectors a policy blocks");
  c_check->add_option("policy", ck_policy, "Policy file")->required();
  c_check->add_option("cvedb", ck_db, "CVE database")->required();

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Emit the trace a synthetic model produces");
  c_sim->add_option("model", sim.model, "Model file")->required();
  c_sim->add_option("--catalog", sim.catalog, "Option catalog")->required();
  c_sim->add_option("--environment", sim.environment, "Factor tokens");
  c_sim->add_option("--namespace", sim.ns, "Namespace id");
  c_sim->add_option("--seed", sim.seed, "Shuffle seed");
  c_sim->add_flag("--runtime-noise", sim.noise, "Include pre-confinement runtime activity");
  c_sim->add_option("-o,--output", sim.out, "Trace file (default stdout)");

  std::string ob_model, ob_plan, ob_catalog, ob_out;
  std::uint64_t ob_seed = 0;
  auto* c_obs = app.add_subcommand("observe", "Build an observation store from a model and a plan");
  c_obs->add_option("model", ob_model, "Model file")->required();
  c_obs->add_option("plan", ob_plan, "Plan file")->required();
  c_obs->add_option("--catalog", ob_catalog, "Option catalog")->required();
  c_obs->add_option("--seed", ob_seed, "Trace seed");
  c_obs->add_option("-o,--output", ob_out, "Store file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }
  g_tsv = format == "tsv";

  try {
    if (*c_ingest) {
      ingest.ns_given = ns_opt->count() > 0;
      return run_ingest(ingest);
    }
    if (*c_plan) return run_plan(plan_catalog, plan_factors, plan_out);
    if (*c_explore) return run_explore(explore);
    if (*c_vi) return run_validate_inference(vi_model, vi_plan, vi_catalog, vi_trace);
    if (*c_score) return run_score(sc_store, sc_db, sc_policy);
    if (*c_syn) return run_synthesize(sy_store, sy_db, sy_targets, sy_out);
    if (*c_sweep) return run_sweep(sw_store, sw_db, sw_targets);
    if (*c_emit) return run_emit(em_policy, em_seccomp, em_caps, em_arches);
    if (*c_check) return run_check(ck_policy, ck_db);
    if (*c_sim) return run_simulate(sim);
    if (*c_obs) return run_observe(ob_model, ob_plan, ob_catalog, ob_seed, ob_out);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return fail("usage", "no subcommand");
}
