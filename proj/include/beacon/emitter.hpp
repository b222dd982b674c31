#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "beacon/decision.hpp"

namespace beacon {

struct SeccompOptions {
  std::vector<std::string> architectures = {"SCMP_ARCH_X86_64", "SCMP_ARCH_X86", "SCMP_ARCH_X32"};
};

struct SeccompProfile {
  std::string default_action = "SCMP_ACT_ERRNO";
  std::vector<std::string> architectures;
  std::vector<std::string> allowed;  // sorted, unique
};

// Docker/OCI profile JSON: fixed key order, two-space indent, LF endings,
// trailing newline.
std::string emit_seccomp_profile(const Policy& policy, const SeccompOptions& options = {});
// FormatError on anything that is not an allowlist profile of this shape.
SeccompProfile parse_seccomp_profile(std::string_view document);

// `--cap-drop=ALL` then one sorted `--cap-add=NAME` per allowed capability.
// ValidationError on a capability outside the known 38.
std::vector<std::string> emit_capability_flags(const Policy& policy);

}  // namespace beacon
