#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beacon/environment.hpp"
#include "beacon/event_set.hpp"
#include "beacon/explorer.hpp"
#include "beacon/monitor.hpp"

namespace beacon {

// Inclusive bounds on one workload field (`read`, `field_length`, ...).
struct WorkloadBound {
  std::string field;
  std::optional<std::uint64_t> min;
  std::optional<std::uint64_t> max;
};

struct Trigger {
  enum class Kind {
    OptionPresent,  // option bound; a boolean option must be true
    OptionEquals,   // option bound with this exact raw value
    OptionInRange,  // numeric option value within [lo, hi]
    Workload,       // some applied workload satisfies every bound
  };

  Kind kind = Kind::OptionPresent;
  std::string option;
  std::string equals;
  long double lo = 0;
  long double hi = 0;
  std::vector<WorkloadBound> bounds;

  bool matches(const Environment& env) const;
  std::string describe() const;

  static Trigger present(std::string option);
  static Trigger value(std::string option, std::string raw);
  static Trigger range(std::string option, long double lo, long double hi);
  static Trigger workload(std::vector<WorkloadBound> bounds);
};

struct ModelRule {
  Trigger trigger;
  EventSet added;
};

// Fires only when both triggers match the same environment.
struct InteractionRule {
  Trigger first;
  Trigger second;
  EventSet added;
};

struct SyntheticContainerModel {
  std::string name;
  EventSet base;
  std::vector<ModelRule> rules;
  std::vector<InteractionRule> interactions;
};

EventSet evaluate(const SyntheticContainerModel& model, const Environment& env);

struct TraceOptions {
  // Adds container-runtime activity before the confinement markers (and a
  // capability check before capset) that the monitor must discard.
  bool runtime_noise = false;
  std::uint64_t start_timestamp = 1000;
};

std::vector<TraceRecord> emit_records(const SyntheticContainerModel& model, const Environment& env,
                                      std::uint64_t namespace_id, std::uint64_t seed,
                                      const TraceOptions& options = {});
// beacon-trace v1 text.
std::string emit_trace(const SyntheticContainerModel& model, const Environment& env, std::uint64_t namespace_id,
                       std::uint64_t seed, const TraceOptions& options = {});

// Runs the model under env through a trace (with runtime noise) and the
// monitor, as a collector would.
Observation observe(const SyntheticContainerModel& model, const Environment& env, std::uint64_t seed);

// Model fixture file (YAML, `model_version: 1`). Option names in triggers
// are checked against the catalog.
SyntheticContainerModel read_model(std::string_view document, const OptionCatalog& catalog);
SyntheticContainerModel load_model_file(const std::string& path, const OptionCatalog& catalog);
std::string write_model(const SyntheticContainerModel& model);

// Evaluates a model, either directly or by emitting a trace and running it
// through the monitor.
class ModelProbe final : public EventProbe {
 public:
  explicit ModelProbe(SyntheticContainerModel model, bool via_trace = false, std::uint64_t seed = 0)
      : model_(std::move(model)), via_trace_(via_trace), seed_(seed) {}
  const SyntheticContainerModel& model() const { return model_; }

 protected:
  EventSet evaluate(const Environment& env) override;

 private:
  SyntheticContainerModel model_;
  bool via_trace_;
  std::uint64_t seed_;
};

// x86_64 syscall names used when generating models.
const std::vector<std::string>& syscall_vocabulary();

struct CorpusParams {
  std::size_t base_size = 40;
  std::size_t added_min = 1;
  std::size_t added_max = 6;
  double capability_rate = 0.25;  // chance a factor rule also adds a capability
};

// Random model with one rule per factor (each factor must vary exactly one
// option or workload). Every rule adds events outside the base set.
SyntheticContainerModel random_model(const std::string& name, const std::vector<Environment>& factors,
                                     std::uint64_t seed, const CorpusParams& params = {});

// Trigger matching exactly the factor's single option or workload.
Trigger trigger_for_factor(const Environment& factor);

// Adds an interaction rule for factors a and b whose single syscall is in no
// other set the model can produce.
void add_interaction(SyntheticContainerModel& model, const Environment& a, const Environment& b,
                     std::uint64_t seed);

}  // namespace beacon
