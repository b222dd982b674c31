#include <doctest.h>

#include <cmath>
#include <fstream>

#include "beacon/error.hpp"
#include "beacon/explorer.hpp"
#include "beacon/simharness.hpp"
#include "beacon/text.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace beacon;
using testing::catalog;

namespace {

EventSet set_of(std::initializer_list<const char*> names) {
  EventSet s;
  for (const char* n : names) s.insert(Event::parse(n));
  return s;
}

MutationConfig config_for(std::int64_t lo, std::int64_t hi, std::uint64_t seed) {
  auto c = MutationConfig::for_domain(lo, hi);
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("explorer") {

TEST_CASE("thresholds decay exponentially") {
  MutationConfig c;
  CHECK(lower_threshold(c, 0) == 5.0);
  CHECK(upper_threshold(c, 0) == 10.0);
  const double e = 2.718281828459045;
  CHECK(lower_threshold(c, 23) == doctest::Approx(5.0 * std::pow(e, -0.69)).epsilon(1e-12));
  CHECK(lower_threshold(c, 23) == doctest::Approx(2.5079).epsilon(1e-4));
  CHECK(upper_threshold(c, 100) == doctest::Approx(10.0 * std::pow(e, -3.0)).epsilon(1e-12));
}

TEST_CASE("defaults") {
  const auto c = MutationConfig::for_domain(0, 262143);
  CHECK(c.r == 2.0);
  CHECK(c.it_max == 100);
  CHECK(c.p == 0.05);
  CHECK(c.mu == 0.0);
  CHECK(c.sigma == 0.1);
  CHECK(c.t_base_lower == 5.0);
  CHECK(c.t_base_upper == 10.0);
  CHECK(c.lambda == 0.03);
  CHECK(c.step_init == 4095.0);
  CHECK(MutationConfig::for_domain(0, 10).step_init == 1.0);
}

TEST_CASE("config validation and key=value setting") {
  auto c = MutationConfig::for_domain(0, 100);
  CHECK_NOTHROW(c.validate());
  c.set("r", "3.5");
  CHECK(c.r == 3.5);
  c.set("it_max", "7");
  CHECK(c.it_max == 7);
  c.set("seed", "42");
  CHECK(c.seed == 42);
  CHECK_THROWS_AS(c.set("nope", "1"), ValidationError);
  CHECK_THROWS_AS(c.set("r", "fast"), ValidationError);
  c.set("r", "1");
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.r = 2;
  c.p = 1.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.p = 0.05;
  c.v_min = 10;
  c.v_max = 5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.v_max = 50;
  c.t_base_lower = 20;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("constant probe: one event set, step grows every iteration") {
  const auto s = set_of({"read"});
  const auto r = mutate_values(config_for(0, 1000000, 3), [&](std::int64_t) { return s; });
  CHECK(r.events == s);
  REQUIRE(r.log.steps.size() >= 2);
  for (std::size_t i = 1; i < r.log.steps.size(); ++i) CHECK(r.log.steps[i].step > r.log.steps[i - 1].step);
  CHECK(r.log.steps[0].new_events == 1);
  for (std::size_t i = 1; i < r.log.steps.size(); ++i) CHECK(r.log.steps[i].new_events == 0);
}

TEST_CASE("piecewise probe over [0, 100] recovers both segments") {
  const auto a = set_of({"read"});
  const auto ab = set_of({"read", "write"});
  auto probe = [&](std::int64_t v) { return v < 50 ? a : ab; };
  // Ground truth by enumeration.
  EventSet truth;
  for (std::int64_t v = 0; v <= 100; ++v) truth |= probe(v);
  REQUIRE(truth == ab);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto c = config_for(0, 100, seed);
    c.p = 0.1;
    CHECK_MESSAGE(mutate_values(c, probe).events == truth, "seed " << seed);
  }
}

TEST_CASE("determinism, coverage and budget") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pw = oracle::random_piecewise(rng, 0, 1 << 18, 5);
    auto c = config_for(0, 1 << 18, rng.next());
    EventSet probed_union;
    std::size_t calls = 0;
    auto monitor = [&](std::int64_t v) {
      ++calls;
      const auto e = pw.at(v);
      probed_union |= e;
      return e;
    };
    const auto r1 = mutate_values(c, monitor);
    CHECK(r1.events == probed_union);
    CHECK(calls <= c.it_max);
    CHECK(calls == r1.log.steps.size());
    for (const auto& s : r1.log.steps) {
      CHECK(s.v >= c.v_min);
      CHECK(s.v <= c.v_max);
    }
    const auto r2 = mutate_values(c, [&](std::int64_t v) { return pw.at(v); });
    CHECK(r1.log.to_text() == r2.log.to_text());
    CHECK(r1.events == r2.events);
  }
}

TEST_CASE("step dynamics: growth on n = 0 over many seeded runs") {
  // Each run probes a constant set, so every iteration after the first
  // sees n = 0.
  const auto s = set_of({"read"});
  std::size_t grew = 0, total = 0;
  double log_ratio_sum = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto c = config_for(0, std::int64_t{1} << 40, seed);
    c.step_init = 1.0;
    c.p = 0.0;
    const auto r = mutate_values(c, [&](std::int64_t) { return s; });
    for (std::size_t i = 1; i < r.log.steps.size(); ++i) {
      ++total;
      const double ratio = r.log.steps[i].step / r.log.steps[i - 1].step;
      grew += ratio > 1.0;
      log_ratio_sum += std::log(ratio);
      CHECK(ratio >= 1.1 - 1e-12);
    }
  }
  REQUIRE(total > 10000);
  CHECK(static_cast<double>(grew) / static_cast<double>(total) > 0.5);
  // With mu = 0 and sigma = 0.1 the factor is r(1 + N) ~ 2 on average.
  const double mean_log = log_ratio_sum / static_cast<double>(total);
  CHECK(mean_log == doctest::Approx(std::log(2.0)).epsilon(0.02));
}

TEST_CASE("step shrinks when many new events appear") {
  // Every probe returns 20 fresh events, above the upper threshold.
  int k = 0;
  auto c = config_for(0, 1000000, 9);
  c.p = 0.0;
  const auto r = mutate_values(c, [&](std::int64_t) {
    EventSet e;
    for (int i = 0; i < 20; ++i) e.insert_syscall("s" + std::to_string(k++));
    return e;
  });
  REQUIRE(r.log.steps.size() > 3);
  CHECK(r.log.steps[0].step == doctest::Approx(c.step_init / 2));
  CHECK(r.log.steps[1].step == doctest::Approx(c.step_init / 4));
}

TEST_CASE("non-finite step is clamped with a warning") {
  auto c = config_for(0, std::int64_t{1} << 50, 4);
  c.step_init = 1.7e308;
  c.p = 1.0;  // keep the value in range so the loop continues
  c.it_max = 5;
  const auto r = mutate_values(c, [](std::int64_t) { return EventSet{}; });
  REQUIRE_FALSE(r.log.warnings.empty());
  CHECK(r.log.warnings[0].find("clamped to 1") != std::string::npos);
  CHECK(r.log.steps[0].step == 1.0);
  CHECK(r.log.to_text().find("warning it=0") != std::string::npos);
}

TEST_CASE("probe failure aborts with the partial log") {
  int calls = 0;
  auto c = config_for(0, 1 << 20, 1);
  c.p = 1.0;
  try {
    mutate_values(c, [&](std::int64_t) -> EventSet {
      if (++calls == 4) throw std::runtime_error("container crashed");
      return set_of({"read"});
    });
    FAIL("expected ExplorationAborted");
  } catch (const ExplorationAborted& e) {
    CHECK(e.partial().log.steps.size() == 3);
    CHECK(e.partial().events == set_of({"read"}));
    CHECK(std::string(e.what()).find("container crashed") != std::string::npos);
    CHECK(e.code() == "probe");
  }
}

TEST_CASE("exploration log text") {
  auto c = config_for(0, 1000, 2);
  c.it_max = 3;
  c.p = 1.0;
  const auto r = mutate_values(c, [](std::int64_t) { return set_of({"read"}); });
  const auto lines = text::split(r.log.to_text(), '\n');
  CHECK(lines[0] == "beacon-explore v1");
  CHECK(lines[1].rfind("config v_min=0 v_max=1000 ", 0) == 0);
  CHECK(lines[1].find("seed=2") != std::string::npos);
  CHECK(lines[2].rfind("0 ", 0) == 0);
  CHECK(text::split(lines[2], ' ').size() == 4);
}

TEST_CASE("mutate_option_values binds the option") {
  SyntheticContainerModel m;
  m.base = set_of({"read"});
  m.rules.push_back({Trigger::range("cpu-shares", 100000, 262143), set_of({"sched_yield"})});
  ModelProbe probe(m);
  const auto& spec = catalog().at("cpu-shares");
  auto c = config_for(0, 262143, 11);
  const auto r = mutate_option_values(baseline_environment(), spec, c, probe);
  CHECK(r.events.contains(Event::syscall("read")));
  CHECK(probe.invocations() == r.log.steps.size());

  CHECK_THROWS_AS(mutate_option_values(baseline_environment(), catalog().at("detach"), c, probe), ContractError);
  c.v_max = 262144;
  CHECK_THROWS_AS(mutate_option_values(baseline_environment(), spec, c, probe), RangeError);
}

TEST_CASE("property: union algebra") {
  Rng rng(3);
  auto random_set = [&] {
    EventSet s;
    for (const char* n : {"read", "write", "open", "close", "CAP_NET_RAW", "CAP_CHOWN", "mmap"})
      if (rng.coin()) s.insert(Event::parse(n));
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    const auto a = random_set(), b = random_set(), c = random_set();
    CHECK(infer_combined_events(a, b) == infer_combined_events(b, a));
    CHECK(infer_combined_events(infer_combined_events(a, b), c) == infer_combined_events(a, infer_combined_events(b, c)));
    CHECK(infer_combined_events(a, a) == a);
    CHECK(infer_combined_events(a, EventSet{}) == a);
  }
  CHECK(infer_combined_events(set_of({"read"}), {}) == set_of({"read"}));
  CHECK(infer_combined_events(set_of({"socket"}), set_of({"socket", "setsockopt"})) == set_of({"socket", "setsockopt"}));
}

TEST_CASE("validate_inference") {
  const auto f1 = parse_factor(catalog(), "--init");
  const auto f2 = parse_factor(catalog(), "workload:W1");
  SyntheticContainerModel m;
  m.base = set_of({"read"});
  m.rules.push_back({trigger_for_factor(f1), set_of({"setpgid"})});
  m.rules.push_back({trigger_for_factor(f2), set_of({"fsync"})});

  ModelProbe plain(m);
  auto r = validate_inference(plain, baseline_environment(), f1, f2);
  CHECK(r.exact);
  CHECK(r.delta == 0);
  CHECK(r.size_difference == 0);

  m.interactions.push_back({trigger_for_factor(f1), trigger_for_factor(f2), set_of({"futex"})});
  ModelProbe interacting(m);
  r = validate_inference(interacting, baseline_environment(), f1, f2);
  CHECK_FALSE(r.exact);
  CHECK(r.delta == 1);
  CHECK(r.size_difference == -1);

  CHECK_THROWS_AS(validate_inference(plain, f1, f1, f2), ContractError);
  CHECK_THROWS_AS(validate_inference(plain, baseline_environment(), combine(f1, f2), f2), ContractError);
  CHECK_THROWS_AS(validate_inference(plain, baseline_environment(), f1, f1), ContractError);

  FunctionProbe broken([](const Environment&) -> EventSet { throw std::runtime_error("boom"); });
  CHECK_THROWS_AS(validate_inference(broken, baseline_environment(), f1, f2), ProbeError);

  InferenceSummary s;
  s.add(validate_inference(plain, baseline_environment(), f1, f2));
  s.add(r);
  CHECK(s.pairs == 2);
  CHECK(s.exact_rate() == 0.5);
  CHECK(s.delta_histogram.at(1) == 1);
}

TEST_CASE("probes memoize by environment id") {
  int evals = 0;
  FunctionProbe p([&](const Environment&) {
    ++evals;
    return set_of({"read"});
  });
  const auto env = parse_factor(catalog(), "--init");
  p.probe(env);
  p.probe(env);
  p.probe(baseline_environment());
  CHECK(evals == 2);
  CHECK(p.invocations() == 3);
  CHECK(p.evaluations() == 2);
}

TEST_CASE("command probe runs an external collector") {
  const auto dir = testing::scratch_dir("cmdprobe");
  const auto script = dir / "collector.sh";
  {
    std::ofstream f(script);
    f << "#!/bin/sh\n"
         "echo 'beacon-trace v1'\n"
         "echo '1 7 SYS unshare'\n"
         "echo '2 7 SYS prctl'\n"
         "echo '3 7 SYS read'\n"
         "echo '3 8 SYS write'\n"
         "for a in \"$@\"; do [ \"$a\" = --init ] && echo '4 7 SYS setpgid'; done\n"
         "exit 0\n";
  }
  CommandProbe probe("sh " + script.string());
  CHECK(probe.probe(baseline_environment()) == set_of({"read"}));
  CHECK(probe.probe(parse_factor(catalog(), "--init")) == set_of({"read", "setpgid"}));

  CommandProbe failing("sh -c 'exit 3'");
  CHECK_THROWS_AS(failing.probe(baseline_environment()), ProbeError);
  CommandProbe garbage("echo nonsense");
  CHECK_THROWS_AS(garbage.probe(baseline_environment()), FormatError);
}

}  // TEST_SUITE
