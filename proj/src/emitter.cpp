#include "beacon/emitter.hpp"

#include <algorithm>

#include <json.hpp>

#include "beacon/error.hpp"

namespace beacon {

using ordered_json = nlohmann::ordered_json;

std::string emit_seccomp_profile(const Policy& policy, const SeccompOptions& options) {
  ordered_json doc;
  doc["defaultAction"] = "SCMP_ACT_ERRNO";
  doc["architectures"] = options.architectures;
  ordered_json syscalls = ordered_json::array();
  if (!policy.allowed.syscalls.empty()) {
    ordered_json rule;
    rule["names"] = std::vector<std::string>(policy.allowed.syscalls.begin(), policy.allowed.syscalls.end());
    rule["action"] = "SCMP_ACT_ALLOW";
    syscalls.push_back(rule);
  }
  doc["syscalls"] = syscalls;
  return doc.dump(2) + "\n";
}

SeccompProfile parse_seccomp_profile(std::string_view document) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("seccomp profile: ") + e.what());
  }
  try {
    SeccompProfile p;
    if (!doc.is_object()) throw FormatError("seccomp profile is not a JSON object");
    p.default_action = doc.at("defaultAction").get<std::string>();
    if (p.default_action != "SCMP_ACT_ERRNO")
      throw FormatError("seccomp profile: unsupported defaultAction " + p.default_action);
    p.architectures = doc.at("architectures").get<std::vector<std::string>>();
    for (const auto& rule : doc.at("syscalls")) {
      const auto action = rule.at("action").get<std::string>();
      if (action != "SCMP_ACT_ALLOW") throw FormatError("seccomp profile: unsupported rule action " + action);
      for (const auto& name : rule.at("names")) p.allowed.push_back(name.get<std::string>());
    }
    std::sort(p.allowed.begin(), p.allowed.end());
    if (std::adjacent_find(p.allowed.begin(), p.allowed.end()) != p.allowed.end())
      throw FormatError("seccomp profile: syscall listed twice");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("seccomp profile: ") + e.what());
  }
}

std::vector<std::string> emit_capability_flags(const Policy& policy) {
  std::vector<std::string> out = {"--cap-drop=ALL"};
  for (const auto& cap : policy.allowed.capabilities) {
    if (!is_known_capability(cap)) throw ValidationError("unknown capability '" + cap + "'");
    out.push_back("--cap-add=" + cap.substr(4));
  }
  return out;
}

}  // namespace beacon
