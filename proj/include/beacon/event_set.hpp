#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace beacon {

enum class EventKind { Syscall, Capability };

// One system event: a syscall name (lower case) or a capability name
// (upper case, CAP_ prefix).
struct Event {
  EventKind kind = EventKind::Syscall;
  std::string name;

  static Event syscall(std::string_view name);
  static Event capability(std::string_view name);
  // Classifies by prefix: CAP_* (any case) is a capability, anything else a
  // syscall. Throws ValidationError on empty or malformed names.
  static Event parse(std::string_view name);

  auto operator<=>(const Event&) const = default;
};

std::string canonical_syscall(std::string_view name);
// Accepts "NET_RAW", "cap_net_raw" or "CAP_NET_RAW"; returns "CAP_NET_RAW".
std::string canonical_capability(std::string_view name);

// The 38 capabilities of the Linux kernels this tool targets (CAP_CHOWN
// through CAP_AUDIT_READ).
const std::array<std::string_view, 38>& known_capabilities();
bool is_known_capability(std::string_view canonical_name);

struct EventSet {
  std::set<std::string> syscalls;
  std::set<std::string> capabilities;

  void insert(const Event& e);
  void insert_syscall(std::string_view name) { syscalls.insert(canonical_syscall(name)); }
  void insert_capability(std::string_view name) { capabilities.insert(canonical_capability(name)); }

  bool contains(const Event& e) const;
  bool empty() const { return syscalls.empty() && capabilities.empty(); }
  std::size_t size() const { return syscalls.size() + capabilities.size(); }

  // Componentwise subset.
  bool subset_of(const EventSet& other) const;

  EventSet& operator|=(const EventSet& other);

  // Syscalls first, then capabilities, each in lexicographic order.
  std::vector<Event> events() const;

  static EventSet from_events(const std::vector<Event>& events);
  // Comma-separated names, mixed kinds. Empty string gives the empty set.
  static EventSet parse_list(std::string_view text);
  std::string to_list() const;

  bool operator==(const EventSet&) const = default;
};

EventSet set_union(const EventSet& a, const EventSet& b);
EventSet set_difference(const EventSet& a, const EventSet& b);
std::size_t symmetric_difference_size(const EventSet& a, const EventSet& b);

}  // namespace beacon
