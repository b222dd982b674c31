#include <doctest.h>

#include "beacon/error.hpp"
#include "beacon/rng.hpp"
#include "beacon/simharness.hpp"
#include "beacon/text.hpp"
#include "support.hpp"

using namespace beacon;
using testing::catalog;
using testing::fixture;

namespace {

const SyntheticContainerModel& redis() {
  static const auto m = load_model_file(fixture("redis.model.yaml"), catalog());
  return m;
}

const SyntheticContainerModel& nginx() {
  static const auto m = load_model_file(fixture("nginx.model.yaml"), catalog());
  return m;
}

EventSet set_of(std::initializer_list<const char*> names) {
  EventSet s;
  for (const char* n : names) s.insert(Event::parse(n));
  return s;
}

Environment env(const std::string& spec) { return parse_environment(catalog(), spec); }

EventSet round_trip(const SyntheticContainerModel& m, const Environment& e, std::uint64_t seed, bool noise) {
  TraceOptions o;
  o.runtime_noise = noise;
  const std::uint64_t ns = 4026532200;
  return event_set_for(e.id, ingest_trace(parse_trace(emit_trace(m, e, ns, seed, o))), ns).events;
}

}  // namespace

TEST_SUITE("simharness") {

TEST_CASE("fixture rows") {
  const auto base_r = evaluate(redis(), baseline_environment());
  const auto base_n = evaluate(nginx(), baseline_environment());
  CHECK(base_r == redis().base);

  CHECK(set_difference(evaluate(redis(), env("init")), base_r) == set_of({"rt_sigtimedwait", "setpgid"}));
  CHECK(set_difference(evaluate(nginx(), env("network=host")), base_n) == set_of({"CAP_NET_BIND_SERVICE"}));
  CHECK(set_difference(evaluate(redis(), env("workload:W1")), base_r) == set_of({"fsync", "fdatasync", "fadvise64"}));
  CHECK(set_difference(evaluate(redis(), env("workload:W7")), base_r) ==
        set_of({"writev", "shutdown", "sync_file_range"}));

  // Options the fixtures do not react to leave the base set alone.
  CHECK(evaluate(nginx(), env("network=bridge")) == base_n);
  CHECK(evaluate(redis(), env("workload:W3")) == base_r);
  CHECK(evaluate(redis(), env("init=false")) == base_r);

  for (const auto* m : {&redis(), &nginx()}) {
    for (const auto& e : {baseline_environment(), env("init"), env("network=host"), env("workload:W1"),
                          env("workload:W7")})
      CHECK_FALSE(evaluate(*m, e).contains(Event::syscall("madvise")));
  }
}

TEST_CASE("trigger kinds") {
  SyntheticContainerModel m;
  m.rules.push_back({Trigger::range("memory", 0, 1048576), set_of({"mlock"})});
  m.rules.push_back({Trigger::value("network", "host"), set_of({"bind"})});
  m.rules.push_back({Trigger::workload({{"threads", 100, std::nullopt}}), set_of({"clone"})});
  m.rules.push_back({Trigger::workload({}), set_of({"recvfrom"})});

  CHECK(evaluate(m, env("memory=1m")) == set_of({"mlock"}));
  CHECK(evaluate(m, env("memory=2m")).empty());
  CHECK(evaluate(m, env("memory=1048576")) == set_of({"mlock"}));
  CHECK(evaluate(m, env("network=host")) == set_of({"bind"}));
  CHECK(evaluate(m, env("workload:W8")) == set_of({"clone", "recvfrom"}));
  CHECK(evaluate(m, env("workload:W1")) == set_of({"recvfrom"}));
  CHECK(evaluate(m, baseline_environment()).empty());

  // A workload trigger must be satisfied by one workload, not by two halves.
  SyntheticContainerModel both;
  both.rules.push_back({Trigger::workload({{"read", 1, std::nullopt}, {"delete", 1, std::nullopt}}), set_of({"x"})});
  CHECK(evaluate(both, env("workload:W1 workload:W5")).empty());
  CHECK(evaluate(both, env("workload:read=1,delete=1")) == set_of({"x"}));
}

TEST_CASE("interaction rules fire only on the pair") {
  SyntheticContainerModel m;
  m.base = set_of({"read"});
  m.interactions.push_back({Trigger::present("init"), Trigger::present("tty"), set_of({"futex"})});
  CHECK(evaluate(m, env("init")) == m.base);
  CHECK(evaluate(m, env("tty")) == m.base);
  CHECK(evaluate(m, env("init tty")) == set_of({"read", "futex"}));
}

TEST_CASE("emit_trace") {
  SyntheticContainerModel empty;
  const auto recs = emit_records(empty, baseline_environment(), 5, 1);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].event.name == "unshare");
  CHECK(round_trip(empty, baseline_environment(), 1, false).empty());

  CHECK(round_trip(redis(), env("init"), 7, false) == evaluate(redis(), env("init")));
  CHECK(emit_trace(redis(), env("init"), 5, 99) == emit_trace(redis(), env("init"), 5, 99));
  CHECK(emit_trace(redis(), env("init"), 5, 99) != emit_trace(redis(), env("init"), 5, 100));

  const auto many = emit_records(redis(), env("workload:W7"), 5, 3);
  for (std::size_t i = 1; i < many.size(); ++i) CHECK(many[i].timestamp > many[i - 1].timestamp);
}

TEST_CASE("property: round-trip law over fixtures, environments and seeds") {
  const std::vector<std::string> specs = {"baseline",     "init",        "network=host", "workload:W1",
                                          "workload:W7",  "init tty",    "init workload:W7",
                                          "workload:W1 workload:W7"};
  for (const auto* m : {&redis(), &nginx()})
    for (const auto& s : specs)
      for (std::uint64_t seed = 0; seed < 25; ++seed)
        for (bool noise : {false, true}) CHECK(round_trip(*m, env(s), seed, noise) == evaluate(*m, env(s)));
}

TEST_CASE("property: union law without interaction rules") {
  const std::vector<std::string> factors = {"init", "tty", "network=host", "workload:W1", "workload:W7",
                                            "workload:W5"};
  for (const auto* m : {&redis(), &nginx()})
    for (std::size_t i = 0; i < factors.size(); ++i)
      for (std::size_t j = i + 1; j < factors.size(); ++j) {
        const auto a = env(factors[i]), b = env(factors[j]);
        CHECK(evaluate(*m, combine(a, b)) == set_union(evaluate(*m, a), evaluate(*m, b)));
      }
}

TEST_CASE("model file round-trip and errors") {
  for (const auto* m : {&redis(), &nginx()}) {
    const auto text = write_model(*m);
    const auto back = read_model(text, catalog());
    CHECK(write_model(back) == text);
    for (const auto& s : {"baseline", "init", "network=host", "workload:W1", "workload:W7"})
      CHECK(evaluate(back, env(s)) == evaluate(*m, env(s)));
  }
  SyntheticContainerModel m;
  m.name = "x";
  m.rules.push_back({Trigger::range("cpu-shares", 10, 20.5), set_of({"a", "CAP_CHOWN"})});
  m.interactions.push_back({Trigger::present("init"), Trigger::workload({{"read", 1, 5}}), set_of({"b"})});
  const auto back = read_model(write_model(m), catalog());
  CHECK(back.rules[0].trigger.hi == 20.5L);
  CHECK(back.interactions.size() == 1);
  CHECK(back.interactions[0].second.bounds[0].max == 5u);

  CHECK_THROWS_AS(read_model("model_version: 2\nname: x\n", catalog()), FormatError);
  CHECK_THROWS_AS(read_model("model_version: 1\n", catalog()), FormatError);
  CHECK_THROWS_AS(read_model("model_version: 1\nname: x\nrules:\n  - when: {option: bogus}\n", catalog()),
                  LookupError);
  CHECK_THROWS_AS(
      read_model("model_version: 1\nname: x\nrules:\n  - when: {workload: {colour: {min: 1}}}\n", catalog()),
      FormatError);
  CHECK_THROWS_AS(read_model("model_version: 1\nname: x\nbase: {capabilities: [CAP_BOGUS]}\n", catalog()),
                  ValidationError);
}

TEST_CASE("via-trace probe matches direct evaluation") {
  ModelProbe direct(redis());
  ModelProbe traced(redis(), true, 17);
  for (const auto& s : {"baseline", "init", "workload:W1", "workload:W7"})
    CHECK(direct.probe(env(s)) == traced.probe(env(s)));
  const auto obs = observe(redis(), env("init"), 3);
  CHECK(obs.environment_id == env("init").id);
  CHECK(obs.events == evaluate(redis(), env("init")));
  CHECK_FALSE(obs.counts.empty());
}

TEST_CASE("random corpus models") {
  const std::vector<Environment> factors = {env("interactive"), env("publish-all"), env("workload:W1"),
                                            env("workload:W2")};
  const auto a = random_model("m", factors, 5);
  const auto b = random_model("m", factors, 5);
  CHECK(write_model(a) == write_model(b));
  CHECK(a.rules.size() == 4);
  for (const auto& r : a.rules) {
    CHECK_FALSE(r.added.empty());
    CHECK(set_difference(r.added, a.base) == r.added);
  }
  auto m = a;
  add_interaction(m, factors[0], factors[2], 1);
  REQUIRE(m.interactions.size() == 1);
  const auto& extra = m.interactions[0].added;
  CHECK(extra.size() == 1);
  CHECK(set_difference(extra, evaluate(a, combine(factors[0], factors[2]))) == extra);
  CHECK(evaluate(m, combine(factors[0], factors[1])) == evaluate(a, combine(factors[0], factors[1])));
  CHECK_THROWS_AS(trigger_for_factor(env("init tty")), ContractError);
  CHECK_THROWS_AS(trigger_for_factor(env("init=false")), ContractError);
}

}  // TEST_SUITE
