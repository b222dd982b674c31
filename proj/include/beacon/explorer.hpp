#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "beacon/environment.hpp"
#include "beacon/error.hpp"
#include "beacon/event_set.hpp"

namespace beacon {

// ---------------------------------------------------------------------------
// Probes
// ---------------------------------------------------------------------------

// Something that can run a container under an environment and report the
// system events it produced. Results are memoized per environment id for the
// lifetime of the probe; concurrent calls for distinct environments are safe.
class EventProbe {
 public:
  virtual ~EventProbe() = default;

  EventSet probe(const Environment& env);

  // Calls to probe(), and how many of them reached evaluate().
  std::size_t invocations() const;
  std::size_t evaluations() const;

 protected:
  virtual EventSet evaluate(const Environment& env) = 0;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, EventSet> cache_;
  std::size_t invocations_ = 0;
  std::size_t evaluations_ = 0;
};

class FunctionProbe final : public EventProbe {
 public:
  explicit FunctionProbe(std::function<EventSet(const Environment&)> fn) : fn_(std::move(fn)) {}

 protected:
  EventSet evaluate(const Environment& env) override { return fn_(env); }

 private:
  std::function<EventSet(const Environment&)> fn_;
};

// Runs an external command once per environment. The environment's option
// flags (and `workload:<canonical>` tokens) are appended to the command line;
// the command must print a beacon-trace v1 stream with exactly one tracked
// namespace on standard output.
class CommandProbe final : public EventProbe {
 public:
  explicit CommandProbe(std::string command) : command_(std::move(command)) {}

 protected:
  EventSet evaluate(const Environment& env) override;

 private:
  std::string command_;
};

// ---------------------------------------------------------------------------
// Option value mutation
// ---------------------------------------------------------------------------

struct MutationConfig {
  std::int64_t v_min = 0;
  std::int64_t v_max = 0;
  double r = 2.0;            // step scaling factor, > 1
  double step_init = 1.0;    // > 0
  std::size_t it_max = 100;  // probe budget
  double p = 0.05;           // reset probability
  double t_base_lower = 5.0;
  double t_base_upper = 10.0;
  double lambda = 0.03;      // threshold decay rate
  double mu = 0.0;           // Gaussian perturbation of the growth factor
  double sigma = 0.1;
  std::uint64_t seed = 0;

  // Defaults for an integer interval: step_init = max(1, (hi - lo) / 64).
  static MutationConfig for_domain(std::int64_t lo, std::int64_t hi);

  void validate() const;  // ValidationError
  // Sets one field from `key=value` text (CLI --config). ValidationError on
  // unknown keys or bad numbers.
  void set(std::string_view key, std::string_view value);
  std::string describe() const;  // `v_min=0 v_max=... seed=...`
};

// Decayed thresholds at iteration `it`.
double lower_threshold(const MutationConfig& c, std::size_t it);
double upper_threshold(const MutationConfig& c, std::size_t it);

struct ExplorationStep {
  std::size_t it = 0;
  std::int64_t v = 0;         // value probed in this iteration
  double step = 0.0;          // step after this iteration's update
  std::size_t new_events = 0; // |E' \ E|
  bool reset = false;         // value was re-drawn at the end of the iteration
};

struct ExplorationLog {
  MutationConfig config;
  std::vector<ExplorationStep> steps;
  std::vector<std::string> warnings;

  // `beacon-explore v1` text: header, config line, one record per iteration.
  std::string to_text() const;
};

struct ExplorationResult {
  EventSet events;
  ExplorationLog log;
};

// The probe failed mid-run; carries what was gathered so far.
class ExplorationAborted : public Error {
 public:
  ExplorationAborted(const std::string& message, ExplorationResult partial)
      : Error("probe", message), partial_(std::move(partial)) {}
  const ExplorationResult& partial() const { return partial_; }

 private:
  ExplorationResult partial_;
};

using ValueMonitor = std::function<EventSet(std::int64_t)>;

// Adaptive step-size search over one integer option. Each iteration probes
// the current value, decays the thresholds, grows the step when few new
// events appeared and shrinks it when many did, advances, and with
// probability p jumps to a uniformly drawn value. Stops when the value
// leaves [v_min, v_max] or after it_max probes.
ExplorationResult mutate_values(const MutationConfig& config, const ValueMonitor& monitor);

// Binds each probed value to `option` in `env` and evaluates it with `probe`.
ExplorationResult mutate_option_values(const Environment& env, const OptionSpecPtr& option,
                                       const MutationConfig& config, EventProbe& probe);

// ---------------------------------------------------------------------------
// Union inference
// ---------------------------------------------------------------------------

EventSet infer_combined_events(const EventSet& a, const EventSet& b);

struct InferenceReport {
  bool exact = false;
  std::size_t delta = 0;              // |inferred xor observed|
  std::int64_t size_difference = 0;   // |inferred| - |observed|
  EventSet inferred;
  EventSet observed;
};

// Compares E(f1) u E(f2) from singleton probes with E(f1, f2) from probing
// the combined environment. f1 and f2 must each vary one factor relative to
// `baseline` (ContractError otherwise).
InferenceReport validate_inference(EventProbe& probe, const Environment& baseline, const Environment& f1,
                                   const Environment& f2);

struct InferenceSummary {
  std::size_t pairs = 0;
  std::size_t exact = 0;
  std::map<std::size_t, std::size_t> delta_histogram;  // delta -> count
  std::map<std::int64_t, std::size_t> size_difference_histogram;

  void add(const InferenceReport& r);
  double exact_rate() const { return pairs ? static_cast<double>(exact) / static_cast<double>(pairs) : 0.0; }
};

}  // namespace beacon
