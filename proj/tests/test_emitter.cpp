#include <doctest.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "beacon/emitter.hpp"
#include "beacon/error.hpp"
#include "beacon/rng.hpp"
#include "support.hpp"

using namespace beacon;
using testing::fixture;

namespace {

Policy policy_of(std::initializer_list<const char*> names) {
  Policy p;
  for (const char* n : names) p.allowed.insert(Event::parse(n));
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("emitter") {

TEST_CASE("seccomp profile shape") {
  const auto text = emit_seccomp_profile(policy_of({"write", "read", "CAP_NET_RAW"}));
  const auto j = nlohmann::json::parse(text);
  CHECK(j["defaultAction"] == "SCMP_ACT_ERRNO");
  CHECK(j["architectures"].size() == 3);
  REQUIRE(j["syscalls"].size() == 1);
  CHECK(j["syscalls"][0]["action"] == "SCMP_ACT_ALLOW");
  CHECK(j["syscalls"][0]["names"] == nlohmann::json::array({"read", "write"}));
  CHECK(text.back() == '\n');
  // Keys keep their documented order.
  CHECK(text.find("defaultAction") < text.find("architectures"));
  CHECK(text.find("architectures") < text.find("syscalls"));
}

TEST_CASE("empty policy denies everything") {
  const auto j = nlohmann::json::parse(emit_seccomp_profile(Policy{}));
  CHECK(j["syscalls"].empty());
  CHECK(parse_seccomp_profile(emit_seccomp_profile(Policy{})).allowed.empty());
}

TEST_CASE("custom architectures") {
  SeccompOptions o;
  o.architectures = {"SCMP_ARCH_AARCH64"};
  const auto prof = parse_seccomp_profile(emit_seccomp_profile(policy_of({"read"}), o));
  CHECK(prof.architectures == std::vector<std::string>{"SCMP_ARCH_AARCH64"});
}

TEST_CASE("property: profile round-trip recovers the syscall set") {
  Rng rng(4);
  const std::vector<const char*> pool = {"read", "write", "openat", "close", "futex", "epoll_wait", "madvise",
                                         "socket", "CAP_CHOWN", "CAP_NET_RAW", "clone", "exit_group"};
  for (int i = 0; i < 200; ++i) {
    Policy p;
    for (const char* n : pool)
      if (rng.coin()) p.allowed.insert(Event::parse(n));
    const auto prof = parse_seccomp_profile(emit_seccomp_profile(p));
    CHECK(std::set<std::string>(prof.allowed.begin(), prof.allowed.end()) == p.allowed.syscalls);
    CHECK(prof.default_action == "SCMP_ACT_ERRNO");
  }
}

TEST_CASE("profile parse errors") {
  CHECK_THROWS_AS(parse_seccomp_profile("{"), FormatError);
  CHECK_THROWS_AS(parse_seccomp_profile(R"({"defaultAction":"SCMP_ACT_ALLOW","architectures":[],"syscalls":[]})"),
                  FormatError);
  CHECK_THROWS_AS(
      parse_seccomp_profile(
          R"({"defaultAction":"SCMP_ACT_ERRNO","architectures":[],"syscalls":[{"names":["read"],"action":"SCMP_ACT_KILL"}]})"),
      FormatError);
  CHECK_THROWS_AS(
      parse_seccomp_profile(
          R"({"defaultAction":"SCMP_ACT_ERRNO","architectures":[],"syscalls":[{"names":["read","read"],"action":"SCMP_ACT_ALLOW"}]})"),
      FormatError);
}

TEST_CASE("golden profiles") {
  for (const char* name : {"worker-open", "worker-balanced", "worker-strict"}) {
    CAPTURE(name);
    const auto policy = load_policy_file(fixture(std::string("golden/") + name + ".policy.yaml"));
    const auto profile = emit_seccomp_profile(policy);
    CHECK(profile == slurp(fixture(std::string("golden/") + name + ".seccomp.json")));
    const auto j = nlohmann::json::parse(profile);
    std::set<std::string> names;
    for (const auto& rule : j["syscalls"])
      for (const auto& n : rule["names"]) names.insert(n.get<std::string>());
    CHECK(names == policy.allowed.syscalls);
    std::string caps;
    for (const auto& f : emit_capability_flags(policy)) caps += f + "\n";
    CHECK(caps == slurp(fixture(std::string("golden/") + name + ".caps.txt")));
  }
}

TEST_CASE("capability flags") {
  CHECK(emit_capability_flags(policy_of({"read"})) == std::vector<std::string>{"--cap-drop=ALL"});
  CHECK(emit_capability_flags(policy_of({"CAP_NET_RAW", "CAP_CHOWN", "read"})) ==
        std::vector<std::string>{"--cap-drop=ALL", "--cap-add=CHOWN", "--cap-add=NET_RAW"});
  Policy bogus;
  bogus.allowed.capabilities.insert("CAP_FLY");
  CHECK_THROWS_AS(emit_capability_flags(bogus), ValidationError);
}

}  // TEST_SUITE
