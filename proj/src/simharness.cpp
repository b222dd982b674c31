#include "beacon/simharness.hpp"

#include <algorithm>
#include <set>

#include <yaml-cpp/yaml.h>

#include "beacon/error.hpp"
#include "beacon/rng.hpp"
#include "beacon/text.hpp"
#include "beacon/yaml_io.hpp"

namespace beacon {
namespace {

constexpr std::uint64_t kMaxTimestampGap = 500;
constexpr std::uint64_t kSimulatedNamespace = 4026532000;

const std::vector<std::string> kRuntimeSyscalls = {"execve", "mount", "pivot_root", "sethostname", "setgroups",
                                                    "chdir"};

std::optional<std::uint64_t> parse_bound(const YAML::Node& node, const char* key, const std::string& field) {
  if (!node[key]) return std::nullopt;
  const auto s = node[key].as<std::string>();
  const auto v = text::parse_u64(s);
  if (!v) throw FormatError("workload bound " + field + "." + key + " is not a count: " + s);
  return v;
}

long double parse_real(const YAML::Node& node, const char* key) {
  return static_cast<long double>(yaml::require_double(node, key));
}

Trigger trigger_from_node(const YAML::Node& node, const OptionCatalog& catalog) {
  if (!node.IsMap()) throw FormatError("trigger must be a map");
  if (node["workload"]) {
    const auto w = node["workload"];
    if (!w.IsMap()) throw FormatError("workload trigger must be a map of field bounds");
    std::vector<WorkloadBound> bounds;
    for (const auto& kv : w) {
      WorkloadBound b;
      b.field = kv.first.as<std::string>();
      if (!is_workload_key(b.field)) throw FormatError("unknown workload field '" + b.field + "'");
      if (!kv.second.IsMap()) throw FormatError("bound for '" + b.field + "' must be a map with min/max");
      b.min = parse_bound(kv.second, "min", b.field);
      b.max = parse_bound(kv.second, "max", b.field);
      bounds.push_back(std::move(b));
    }
    return Trigger::workload(std::move(bounds));
  }
  const auto option = yaml::require_scalar(node, "option");
  if (!catalog.contains(option)) throw LookupError("model trigger names unknown option '" + option + "'");
  if (node["equals"]) return Trigger::value(option, node["equals"].as<std::string>());
  if (node["min"] || node["max"]) return Trigger::range(option, parse_real(node, "min"), parse_real(node, "max"));
  return Trigger::present(option);
}

YAML::Node trigger_node(const Trigger& t) {
  YAML::Node node;
  switch (t.kind) {
    case Trigger::Kind::OptionPresent:
      node["option"] = t.option;
      break;
    case Trigger::Kind::OptionEquals:
      node["option"] = t.option;
      node["equals"] = t.equals;
      break;
    case Trigger::Kind::OptionInRange:
      node["option"] = t.option;
      node["min"] = text::format_double(static_cast<double>(t.lo));
      node["max"] = text::format_double(static_cast<double>(t.hi));
      break;
    case Trigger::Kind::Workload: {
      YAML::Node w(YAML::NodeType::Map);
      for (const auto& b : t.bounds) {
        YAML::Node bound(YAML::NodeType::Map);
        if (b.min) bound["min"] = *b.min;
        if (b.max) bound["max"] = *b.max;
        w[b.field] = bound;
      }
      node["workload"] = w;
      break;
    }
  }
  return node;
}

EventSet events_from_node(const YAML::Node& node) {
  if (!node) return {};
  if (!node.IsMap()) throw FormatError("event set must be a map with syscalls/capabilities lists");
  EventSet s;
  for (const auto& name : yaml::string_list(node, "syscalls")) s.insert(Event::syscall(name));
  for (const auto& name : yaml::string_list(node, "capabilities")) {
    const auto cap = canonical_capability(name);
    if (!is_known_capability(cap)) throw ValidationError("unknown capability '" + name + "'");
    s.insert(Event::capability(cap));
  }
  return s;
}

YAML::Node events_node(const EventSet& s) {
  YAML::Node node(YAML::NodeType::Map);
  YAML::Node sys(YAML::NodeType::Sequence);
  YAML::Node caps(YAML::NodeType::Sequence);
  for (const auto& name : s.syscalls) sys.push_back(name);
  for (const auto& name : s.capabilities) caps.push_back(name);
  sys.SetStyle(YAML::EmitterStyle::Flow);
  caps.SetStyle(YAML::EmitterStyle::Flow);
  node["syscalls"] = sys;
  node["capabilities"] = caps;
  return node;
}

std::string pick_fresh_syscall(const std::set<std::string>& used, Rng& rng) {
  std::vector<std::string> free;
  for (const auto& s : syscall_vocabulary())
    if (!used.count(s)) free.push_back(s);
  if (free.empty()) throw ValidationError("syscall vocabulary exhausted");
  return free[rng.index(free.size())];
}

std::set<std::string> all_model_syscalls(const SyntheticContainerModel& m) {
  std::set<std::string> used(m.base.syscalls.begin(), m.base.syscalls.end());
  for (const auto& r : m.rules) used.insert(r.added.syscalls.begin(), r.added.syscalls.end());
  for (const auto& r : m.interactions) used.insert(r.added.syscalls.begin(), r.added.syscalls.end());
  return used;
}

}  // namespace

Trigger Trigger::present(std::string option) {
  Trigger t;
  t.kind = Kind::OptionPresent;
  t.option = std::move(option);
  return t;
}

Trigger Trigger::value(std::string option, std::string raw) {
  Trigger t;
  t.kind = Kind::OptionEquals;
  t.option = std::move(option);
  t.equals = std::move(raw);
  return t;
}

Trigger Trigger::range(std::string option, long double lo, long double hi) {
  Trigger t;
  t.kind = Kind::OptionInRange;
  t.option = std::move(option);
  t.lo = lo;
  t.hi = hi;
  return t;
}

Trigger Trigger::workload(std::vector<WorkloadBound> bounds) {
  Trigger t;
  t.kind = Kind::Workload;
  t.bounds = std::move(bounds);
  return t;
}

bool Trigger::matches(const Environment& env) const {
  if (kind == Kind::Workload) {
    return std::any_of(env.workloads.begin(), env.workloads.end(), [&](const WorkloadSpec& w) {
      return std::all_of(bounds.begin(), bounds.end(), [&](const WorkloadBound& b) {
        const auto v = workload_field(w, b.field);
        return v && (!b.min || *v >= *b.min) && (!b.max || *v <= *b.max);
      });
    });
  }
  const OptionValue* bound = env.option(option);
  if (!bound) return false;
  switch (kind) {
    case Kind::OptionPresent:
      if (const auto* flag = std::get_if<bool>(&bound->payload.data)) return *flag;
      return true;
    case Kind::OptionEquals:
      return bound->raw() == equals;
    case Kind::OptionInRange: {
      const auto v = numeric_payload(*bound);
      return v && *v >= lo && *v <= hi;
    }
    case Kind::Workload:
      break;
  }
  return false;
}

std::string Trigger::describe() const {
  switch (kind) {
    case Kind::OptionPresent:
      return "--" + option;
    case Kind::OptionEquals:
      return "--" + option + "=" + equals;
    case Kind::OptionInRange:
      return "--" + option + " in [" + text::format_double(static_cast<double>(lo)) + ", " +
             text::format_double(static_cast<double>(hi)) + "]";
    case Kind::Workload: {
      std::vector<std::string> parts;
      for (const auto& b : bounds) {
        std::string s = b.field;
        if (b.min) s += ">=" + std::to_string(*b.min);
        if (b.max) s += (b.min ? "," : "") + std::string("<=") + std::to_string(*b.max);
        parts.push_back(s);
      }
      return "workload{" + text::join(parts, " ") + "}";
    }
  }
  return {};
}

EventSet evaluate(const SyntheticContainerModel& model, const Environment& env) {
  EventSet out = model.base;
  for (const auto& rule : model.rules)
    if (rule.trigger.matches(env)) out |= rule.added;
  for (const auto& rule : model.interactions)
    if (rule.first.matches(env) && rule.second.matches(env)) out |= rule.added;
  return out;
}

std::vector<TraceRecord> emit_records(const SyntheticContainerModel& model, const Environment& env,
                                      std::uint64_t namespace_id, std::uint64_t seed, const TraceOptions& options) {
  Rng rng(seed);
  std::vector<TraceRecord> out;
  std::uint64_t ts = options.start_timestamp;
  auto push = [&](Event e) {
    out.push_back({ts, namespace_id, std::move(e)});
    ts += rng.uniform_u64(1, kMaxTimestampGap);
  };

  push(Event::syscall("unshare"));
  if (options.runtime_noise) {
    for (const auto& s : kRuntimeSyscalls) push(Event::syscall(s));
    push(Event::capability("CAP_SYS_ADMIN"));
  }
  push(Event::syscall("capset"));
  push(Event::syscall("prctl"));

  std::vector<Event> body;
  for (const auto& e : evaluate(model, env).events()) {
    const auto repeats = rng.uniform_u64(1, 3);
    for (std::uint64_t i = 0; i < repeats; ++i) body.push_back(e);
  }
  rng.shuffle(body);
  for (auto& e : body) push(std::move(e));
  return out;
}

std::string emit_trace(const SyntheticContainerModel& model, const Environment& env, std::uint64_t namespace_id,
                       std::uint64_t seed, const TraceOptions& options) {
  return write_trace(emit_records(model, env, namespace_id, seed, options));
}

SyntheticContainerModel read_model(std::string_view document, const OptionCatalog& catalog) {
  const auto root = yaml::load(document, "model");
  yaml::require_version(root, "model_version", 1);
  SyntheticContainerModel m;
  m.name = yaml::require_scalar(root, "name");
  m.base = events_from_node(root["base"]);
  if (root["rules"]) {
    for (const auto& r : yaml::require_seq(root, "rules"))
      m.rules.push_back({trigger_from_node(yaml::require(r, "when"), catalog), events_from_node(r["add"])});
  }
  if (root["interactions"]) {
    for (const auto& r : yaml::require_seq(root, "interactions")) {
      const auto when = yaml::require_seq(r, "when");
      if (when.size() != 2) throw FormatError("interaction rule needs exactly two triggers");
      m.interactions.push_back(
          {trigger_from_node(when[0], catalog), trigger_from_node(when[1], catalog), events_from_node(r["add"])});
    }
  }
  return m;
}

SyntheticContainerModel load_model_file(const std::string& path, const OptionCatalog& catalog) {
  return read_model(text::read_file(path), catalog);
}

std::string write_model(const SyntheticContainerModel& model) {
  YAML::Node root;
  root["model_version"] = 1;
  root["name"] = model.name;
  root["base"] = events_node(model.base);
  YAML::Node rules(YAML::NodeType::Sequence);
  for (const auto& r : model.rules) {
    YAML::Node n;
    n["when"] = trigger_node(r.trigger);
    n["add"] = events_node(r.added);
    rules.push_back(n);
  }
  root["rules"] = rules;
  YAML::Node inter(YAML::NodeType::Sequence);
  for (const auto& r : model.interactions) {
    YAML::Node n;
    YAML::Node when(YAML::NodeType::Sequence);
    when.push_back(trigger_node(r.first));
    when.push_back(trigger_node(r.second));
    n["when"] = when;
    n["add"] = events_node(r.added);
    inter.push_back(n);
  }
  root["interactions"] = inter;
  return yaml::emit(root);
}

Observation observe(const SyntheticContainerModel& model, const Environment& env, std::uint64_t seed) {
  TraceOptions options;
  options.runtime_noise = true;
  const auto results = ingest_trace(parse_trace(emit_trace(model, env, kSimulatedNamespace, seed, options)));
  return event_set_for(env.id, results, kSimulatedNamespace);
}

EventSet ModelProbe::evaluate(const Environment& env) {
  if (!via_trace_) return beacon::evaluate(model_, env);
  return observe(model_, env, seed_).events;
}

const std::vector<std::string>& syscall_vocabulary() {
  static const std::vector<std::string> names = {
      "accept",          "accept4",        "access",         "alarm",          "arch_prctl",
      "bind",            "brk",            "chmod",          "chown",          "clock_gettime",
      "clock_nanosleep", "clone",          "clone3",         "close",          "connect",
      "copy_file_range", "creat",          "dup",            "dup2",           "dup3",
      "epoll_create",    "epoll_create1",  "epoll_ctl",      "epoll_pwait",    "epoll_wait",
      "eventfd2",        "exit",           "exit_group",     "faccessat",      "fadvise64",
      "fallocate",       "fchdir",         "fchmod",         "fchown",         "fcntl",
      "fdatasync",       "flock",          "fork",           "fstat",          "fstatfs",
      "fsync",           "ftruncate",      "futex",          "getcwd",         "getdents64",
      "getegid",         "geteuid",        "getgid",         "getpeername",    "getpgrp",
      "getpid",          "getppid",        "getpriority",    "getrandom",      "getrlimit",
      "getrusage",       "getsockname",    "getsockopt",     "gettid",         "gettimeofday",
      "getuid",          "inotify_add_watch", "inotify_init1", "ioctl",         "kill",
      "lchown",          "link",           "listen",         "lseek",          "lstat",
      "madvise",         "memfd_create",   "mincore",        "mkdir",          "mlock",
      "mmap",            "mprotect",       "mremap",         "msync",          "munlock",
      "munmap",          "nanosleep",      "newfstatat",     "open",           "openat",
      "pipe",            "pipe2",          "poll",           "ppoll",          "pread64",
      "preadv",          "prlimit64",      "pselect6",       "pwrite64",       "pwritev",
      "read",            "readlink",       "readv",          "recvfrom",       "recvmmsg",
      "recvmsg",         "rename",         "renameat2",      "rmdir",          "rt_sigaction",
      "rt_sigprocmask",  "rt_sigreturn",   "rt_sigtimedwait", "sched_getaffinity", "sched_yield",
      "select",          "sendfile",       "sendmmsg",       "sendmsg",        "sendto",
      "set_robust_list", "set_tid_address", "setitimer",     "setpgid",        "setsid",
      "setsockopt",      "shutdown",       "sigaltstack",    "socket",         "socketpair",
      "splice",          "stat",           "statfs",         "statx",          "symlink",
      "sync_file_range", "sysinfo",        "tgkill",         "timerfd_create", "timerfd_settime",
      "truncate",        "umask",          "uname",          "unlink",         "unlinkat",
      "utimensat",       "vfork",          "wait4",          "waitid",         "write",
      "writev",
  };
  return names;
}

Trigger trigger_for_factor(const Environment& factor) {
  if (factor.options.size() + factor.workloads.size() != 1)
    throw ContractError("factor '" + factor.describe() + "' must vary exactly one option or workload");
  if (!factor.workloads.empty()) {
    std::vector<WorkloadBound> bounds;
    const auto& w = factor.workloads.front();
    for (const auto& key : {"read", "update", "scan", "insert", "delete", "field_count", "field_length", "threads"}) {
      const auto v = workload_field(w, key);
      bounds.push_back({key, v, v});
    }
    return Trigger::workload(std::move(bounds));
  }
  const auto& o = factor.options.front();
  if (std::holds_alternative<bool>(o.payload.data)) {
    if (!std::get<bool>(o.payload.data))
      throw ContractError("factor '" + factor.describe() + "' binds a boolean option to false");
    return Trigger::present(o.spec_name());
  }
  return Trigger::value(o.spec_name(), o.raw());
}

SyntheticContainerModel random_model(const std::string& name, const std::vector<Environment>& factors,
                                     std::uint64_t seed, const CorpusParams& params) {
  if (params.added_min == 0 || params.added_min > params.added_max)
    throw ValidationError("corpus params: need 1 <= added_min <= added_max");
  Rng rng(seed);
  SyntheticContainerModel m;
  m.name = name;

  std::vector<std::string> pool = syscall_vocabulary();
  rng.shuffle(pool);
  if (params.base_size >= pool.size()) throw ValidationError("corpus params: base_size exceeds vocabulary");
  for (std::size_t i = 0; i < params.base_size; ++i) m.base.insert_syscall(pool[i]);
  const std::vector<std::string> rest(pool.begin() + static_cast<std::ptrdiff_t>(params.base_size), pool.end());

  const auto& caps = known_capabilities();
  for (const auto& f : factors) {
    ModelRule rule{trigger_for_factor(f), {}};
    const auto n = rng.uniform_u64(params.added_min, params.added_max);
    for (std::uint64_t i = 0; i < n; ++i) rule.added.insert_syscall(rest[rng.index(rest.size())]);
    if (rng.uniform01() < params.capability_rate) rule.added.insert_capability(caps[rng.index(caps.size())]);
    m.rules.push_back(std::move(rule));
  }
  return m;
}

void add_interaction(SyntheticContainerModel& model, const Environment& a, const Environment& b,
                     std::uint64_t seed) {
  Rng rng(seed);
  EventSet added;
  added.insert_syscall(pick_fresh_syscall(all_model_syscalls(model), rng));
  model.interactions.push_back({trigger_for_factor(a), trigger_for_factor(b), std::move(added)});
}

}  // namespace beacon
