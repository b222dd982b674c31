#include "beacon/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "beacon/rng.hpp"
#include "beacon/text.hpp"

namespace beacon {

EventSet EventProbe::probe(const Environment& env) {
  {
    std::lock_guard lock(mu_);
    ++invocations_;
    if (auto it = cache_.find(env.id); it != cache_.end()) return it->second;
  }
  EventSet result = evaluate(env);
  std::lock_guard lock(mu_);
  ++evaluations_;
  return cache_.try_emplace(env.id, std::move(result)).first->second;
}

std::size_t EventProbe::invocations() const {
  std::lock_guard lock(mu_);
  return invocations_;
}

std::size_t EventProbe::evaluations() const {
  std::lock_guard lock(mu_);
  return evaluations_;
}

// ---------------------------------------------------------------------------

MutationConfig MutationConfig::for_domain(std::int64_t lo, std::int64_t hi) {
  MutationConfig c;
  c.v_min = lo;
  c.v_max = hi;
  c.step_init = std::max(1.0, std::floor((static_cast<double>(hi) - static_cast<double>(lo)) / 64.0));
  return c;
}

void MutationConfig::validate() const {
  if (v_min > v_max) throw ValidationError("mutation config: v_min > v_max");
  if (!(r > 1.0)) throw ValidationError("mutation config: r must exceed 1");
  if (!(step_init > 0.0) || !std::isfinite(step_init)) throw ValidationError("mutation config: step_init must be positive");
  if (it_max == 0) throw ValidationError("mutation config: it_max must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("mutation config: p must lie in [0, 1]");
  if (!(t_base_lower < t_base_upper)) throw ValidationError("mutation config: t_base_lower must be below t_base_upper");
  if (!(sigma >= 0.0)) throw ValidationError("mutation config: sigma must be non-negative");
  if (!std::isfinite(lambda) || !std::isfinite(mu)) throw ValidationError("mutation config: non-finite parameter");
}

void MutationConfig::set(std::string_view key, std::string_view value) {
  auto real = [&](double& field) {
    auto v = text::parse_double(value);
    if (!v) throw ValidationError("config " + std::string(key) + ": not a number '" + std::string(value) + "'");
    field = *v;
  };
  auto integer = [&](std::int64_t& field) {
    auto v = text::parse_i64(value);
    if (!v) throw ValidationError("config " + std::string(key) + ": not an integer '" + std::string(value) + "'");
    field = *v;
  };
  auto count = [&](auto& field) {
    auto v = text::parse_u64(value);
    if (!v) throw ValidationError("config " + std::string(key) + ": not a count '" + std::string(value) + "'");
    field = static_cast<std::remove_reference_t<decltype(field)>>(*v);
  };
  if (key == "v_min") integer(v_min);
  else if (key == "v_max") integer(v_max);
  else if (key == "r") real(r);
  else if (key == "step_init") real(step_init);
  else if (key == "it_max") count(it_max);
  else if (key == "p") real(p);
  else if (key == "t_base_lower") real(t_base_lower);
  else if (key == "t_base_upper") real(t_base_upper);
  else if (key == "lambda") real(lambda);
  else if (key == "mu") real(mu);
  else if (key == "sigma") real(sigma);
  else if (key == "seed") count(seed);
  else throw ValidationError("unknown mutation config key '" + std::string(key) + "'");
}

std::string MutationConfig::describe() const {
  std::ostringstream out;
  out << "v_min=" << v_min << " v_max=" << v_max << " r=" << text::format_double(r)
      << " step_init=" << text::format_double(step_init) << " it_max=" << it_max
      << " p=" << text::format_double(p) << " t_base_lower=" << text::format_double(t_base_lower)
      << " t_base_upper=" << text::format_double(t_base_upper) << " lambda=" << text::format_double(lambda)
      << " mu=" << text::format_double(mu) << " sigma=" << text::format_double(sigma) << " seed=" << seed;
  return out.str();
}

double lower_threshold(const MutationConfig& c, std::size_t it) {
  return c.t_base_lower * std::exp(-c.lambda * static_cast<double>(it));
}

double upper_threshold(const MutationConfig& c, std::size_t it) {
  return c.t_base_upper * std::exp(-c.lambda * static_cast<double>(it));
}

std::string ExplorationLog::to_text() const {
  std::string out = "beacon-explore v1\nconfig " + config.describe() + "\n";
  for (const auto& s : steps)
    out += std::to_string(s.it) + " " + std::to_string(s.v) + " " + text::format_double(s.step) + " " +
           std::to_string(s.new_events) + "\n";
  for (const auto& w : warnings) out += "warning " + w + "\n";
  return out;
}

ExplorationResult mutate_values(const MutationConfig& config, const ValueMonitor& monitor) {
  config.validate();
  Rng rng(config.seed);
  ExplorationResult result;
  result.log.config = config;

  // Integer probe value plus a real-valued shadow that carries fractional
  // steps between iterations.
  std::int64_t v = rng.uniform_i64(config.v_min, config.v_max);
  double shadow = static_cast<double>(v);
  double step = config.step_init;
  bool in_range = true;
  constexpr double kMinGrowth = 1.1;

  for (std::size_t it = 0; in_range && it < config.it_max; ++it) {
    EventSet observed;
    try {
      observed = monitor(v);
    } catch (const std::exception& e) {
      throw ExplorationAborted("probe failed at it=" + std::to_string(it) + " v=" + std::to_string(v) + ": " +
                                   e.what(),
                               std::move(result));
    }

    const double t_lower = lower_threshold(config, it);
    const double t_upper = upper_threshold(config, it);
    const std::size_t n = set_difference(observed, result.events).size();
    const auto fresh = static_cast<double>(n);

    if (fresh < t_lower) {
      const double growth = std::max(kMinGrowth, config.r * (1.0 + rng.normal(config.mu, config.sigma)));
      step *= growth;
    } else if (fresh >= t_upper) {
      step /= config.r;
    }
    if (!std::isfinite(step) || step <= 0.0) {
      result.log.warnings.push_back("it=" + std::to_string(it) + " step " + text::format_double(step) +
                                    " clamped to 1");
      step = 1.0;
    }

    ExplorationStep record{it, v, step, n, false};

    shadow += step;
    if (shadow > static_cast<double>(config.v_max)) {
      in_range = false;
    } else {
      v = std::llround(shadow);
    }
    if (rng.uniform01() < config.p) {
      v = rng.uniform_i64(config.v_min, config.v_max);
      shadow = static_cast<double>(v);
      in_range = true;
      record.reset = true;
    }

    result.events |= observed;
    result.log.steps.push_back(record);
  }
  return result;
}

ExplorationResult mutate_option_values(const Environment& env, const OptionSpecPtr& option,
                                       const MutationConfig& config, EventProbe& probe) {
  const auto domain = integer_domain(*option->syntax);
  if (!domain) throw ContractError("option '" + option->name + "' is not integer-typed");
  if (config.v_min < domain->lo || config.v_max > domain->hi)
    throw RangeError("mutation bounds exceed option '" + option->name + "'", std::to_string(domain->lo),
                     std::to_string(domain->hi));
  return mutate_values(config, [&](std::int64_t v) { return probe.probe(with_option(env, integer_value(option, v))); });
}

// ---------------------------------------------------------------------------

EventSet infer_combined_events(const EventSet& a, const EventSet& b) { return set_union(a, b); }

InferenceReport validate_inference(EventProbe& probe, const Environment& baseline, const Environment& f1,
                                   const Environment& f2) {
  if (!baseline.is_baseline()) throw ContractError("validate_inference: baseline binds options or workloads");
  for (const auto* f : {&f1, &f2})
    if (f->options.size() + f->workloads.size() != 1)
      throw ContractError("validate_inference: factor '" + f->describe() + "' must vary exactly one factor");
  if (f1.id == f2.id) throw ContractError("validate_inference: factors are identical");

  const Environment both = combine(f1, f2);
  InferenceReport r;
  try {
    r.inferred = infer_combined_events(probe.probe(f1), probe.probe(f2));
    r.observed = probe.probe(both);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ProbeError(std::string("probe failed: ") + e.what());
  }
  r.delta = symmetric_difference_size(r.inferred, r.observed);
  r.exact = r.delta == 0;
  r.size_difference = static_cast<std::int64_t>(r.inferred.size()) - static_cast<std::int64_t>(r.observed.size());
  return r;
}

void InferenceSummary::add(const InferenceReport& r) {
  ++pairs;
  if (r.exact) ++exact;
  ++delta_histogram[r.delta];
  ++size_difference_histogram[r.size_difference];
}

}  // namespace beacon
