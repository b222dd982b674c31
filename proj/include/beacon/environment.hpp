#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beacon/option_syntax.hpp"

namespace beacon {

// YCSB-style workload descriptor.
struct WorkloadSpec {
  std::uint64_t read_ops = 0;
  std::uint64_t update_ops = 0;
  std::uint64_t scan_ops = 0;
  std::uint64_t insert_ops = 0;
  std::uint64_t delete_ops = 0;
  std::uint64_t field_count = 10;
  std::uint64_t field_length = 100;
  std::uint64_t thread_count = 1;

  // Throws ValidationError: all counts zero, a count above
  // kMaxOperationCount, or a non-positive field/thread setting.
  void validate() const;

  // `read=1000,update=0,...,threads=1`; parse() accepts any subset of the
  // keys (missing ones keep their defaults) and validates.
  std::string canonical() const;
  static WorkloadSpec parse(std::string_view text);

  bool operator==(const WorkloadSpec&) const = default;
};

inline constexpr std::uint64_t kMaxOperationCount = 100000;

// Field by canonical key (`read`, `field_length`, `threads`, ...).
std::optional<std::uint64_t> workload_field(const WorkloadSpec& w, std::string_view key);
bool is_workload_key(std::string_view key);

// W1..W8.
const std::vector<WorkloadSpec>& workload_presets();
// "W1".."W8" -> preset; nullopt otherwise.
std::optional<WorkloadSpec> workload_preset(std::string_view name);
// Preset name of a workload, if it equals one.
std::optional<std::string> preset_name(const WorkloadSpec& w);

// One emulated environment: launch options plus applied workloads. A
// combined environment (two factors applied together) may carry more than
// one workload.
struct Environment {
  std::string id;
  std::vector<OptionValue> options;     // sorted by spec name, names unique
  std::vector<WorkloadSpec> workloads;  // sorted by canonical text, unique

  bool is_baseline() const { return options.empty() && workloads.empty(); }
  const OptionValue* option(std::string_view name) const;

  // One line per option/workload; the id is its digest.
  std::string canonical_text() const;
  // Human-readable summary, e.g. `--init workload:W1`, or `baseline`.
  std::string describe() const;

  bool operator==(const Environment& other) const { return id == other.id; }
};

Environment compose_environment(std::vector<OptionValue> options,
                                std::optional<WorkloadSpec> workload = std::nullopt);
Environment compose_environment(std::vector<OptionValue> options, std::vector<WorkloadSpec> workloads);
Environment baseline_environment();

// Both factors applied together. ConflictError if the same option is bound
// to different values.
Environment combine(const Environment& a, const Environment& b);
// Copy of env with `value` bound (replacing any existing binding).
Environment with_option(const Environment& env, OptionValue value);

// Parses one factor token: `--name[=value]` or `workload:W3` or
// `workload:read=1000,insert=1000`.
Environment parse_factor(const OptionCatalog& catalog, std::string_view token);
// Whitespace-separated factor tokens combined into one environment. Empty
// text or `baseline` gives the baseline; the leading `--` may be omitted.
Environment parse_environment(const OptionCatalog& catalog, std::string_view spec);

struct EnvironmentPlan {
  struct Pair {
    std::size_t first = 0;   // index into singletons
    std::size_t second = 0;  // index into singletons, > first
    std::string combined_id;
  };

  Environment baseline;
  std::vector<Environment> singletons;
  std::vector<Pair> composed;  // inferred by union, never executed

  std::size_t executed_count() const { return singletons.size() + 1; }
  Environment combined(const Pair& p) const { return combine(singletons[p.first], singletons[p.second]); }
};

// Every factor must differ from baseline in exactly one option or one
// workload (ContractError otherwise, or on a repeated factor).
EnvironmentPlan plan_environments(const std::vector<Environment>& factors);

// Plan file (YAML, `plan_version: 1`).
std::string write_plan(const EnvironmentPlan& plan);
EnvironmentPlan read_plan(std::string_view document, const OptionCatalog& catalog);

}  // namespace beacon
