#include "beacon/event_set.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>

#include "beacon/error.hpp"
#include "beacon/text.hpp"

namespace beacon {
namespace {

bool valid_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

void check_name(std::string_view name) {
  if (name.empty()) throw ValidationError("empty event name");
  if (!std::all_of(name.begin(), name.end(), valid_name_char))
    throw ValidationError("malformed event name '" + std::string(name) + "'");
}

bool has_cap_prefix(std::string_view name) {
  return name.size() > 4 && text::to_upper(name.substr(0, 4)) == "CAP_";
}

}  // namespace

std::string canonical_syscall(std::string_view name) {
  check_name(name);
  return text::to_lower(name);
}

std::string canonical_capability(std::string_view name) {
  check_name(name);
  std::string upper = text::to_upper(name);
  if (upper.rfind("CAP_", 0) != 0) upper.insert(0, "CAP_");
  return upper;
}

const std::array<std::string_view, 38>& known_capabilities() {
  static const std::array<std::string_view, 38> caps = {
      "CAP_CHOWN",          "CAP_DAC_OVERRIDE",  "CAP_DAC_READ_SEARCH", "CAP_FOWNER",
      "CAP_FSETID",         "CAP_KILL",          "CAP_SETGID",          "CAP_SETUID",
      "CAP_SETPCAP",        "CAP_LINUX_IMMUTABLE", "CAP_NET_BIND_SERVICE", "CAP_NET_BROADCAST",
      "CAP_NET_ADMIN",      "CAP_NET_RAW",       "CAP_IPC_LOCK",        "CAP_IPC_OWNER",
      "CAP_SYS_MODULE",     "CAP_SYS_RAWIO",     "CAP_SYS_CHROOT",      "CAP_SYS_PTRACE",
      "CAP_SYS_PACCT",      "CAP_SYS_ADMIN",     "CAP_SYS_BOOT",        "CAP_SYS_NICE",
      "CAP_SYS_RESOURCE",   "CAP_SYS_TIME",      "CAP_SYS_TTY_CONFIG",  "CAP_MKNOD",
      "CAP_LEASE",          "CAP_AUDIT_WRITE",   "CAP_AUDIT_CONTROL",   "CAP_SETFCAP",
      "CAP_MAC_OVERRIDE",   "CAP_MAC_ADMIN",     "CAP_SYSLOG",          "CAP_WAKE_ALARM",
      "CAP_BLOCK_SUSPEND",  "CAP_AUDIT_READ",
  };
  return caps;
}

bool is_known_capability(std::string_view canonical_name) {
  const auto& caps = known_capabilities();
  return std::find(caps.begin(), caps.end(), canonical_name) != caps.end();
}

Event Event::syscall(std::string_view name) { return {EventKind::Syscall, canonical_syscall(name)}; }

Event Event::capability(std::string_view name) {
  return {EventKind::Capability, canonical_capability(name)};
}

Event Event::parse(std::string_view name) {
  name = text::trim(name);
  return has_cap_prefix(name) ? capability(name) : syscall(name);
}

void EventSet::insert(const Event& e) {
  if (e.kind == EventKind::Syscall)
    syscalls.insert(e.name);
  else
    capabilities.insert(e.name);
}

bool EventSet::contains(const Event& e) const {
  return e.kind == EventKind::Syscall ? syscalls.count(e.name) != 0
                                      : capabilities.count(e.name) != 0;
}

bool EventSet::subset_of(const EventSet& other) const {
  return std::includes(other.syscalls.begin(), other.syscalls.end(), syscalls.begin(),
                       syscalls.end()) &&
         std::includes(other.capabilities.begin(), other.capabilities.end(),
                       capabilities.begin(), capabilities.end());
}

EventSet& EventSet::operator|=(const EventSet& other) {
  syscalls.insert(other.syscalls.begin(), other.syscalls.end());
  capabilities.insert(other.capabilities.begin(), other.capabilities.end());
  return *this;
}

std::vector<Event> EventSet::events() const {
  std::vector<Event> out;
  out.reserve(size());
  for (const auto& s : syscalls) out.push_back({EventKind::Syscall, s});
  for (const auto& c : capabilities) out.push_back({EventKind::Capability, c});
  return out;
}

EventSet EventSet::from_events(const std::vector<Event>& events) {
  EventSet out;
  for (const auto& e : events) out.insert(e);
  return out;
}

EventSet EventSet::parse_list(std::string_view list) {
  EventSet out;
  if (text::trim(list).empty()) return out;
  for (const auto& item : text::split(list, ',')) out.insert(Event::parse(item));
  return out;
}

std::string EventSet::to_list() const {
  std::string out;
  for (const auto& e : events()) {
    if (!out.empty()) out += ',';
    out += e.name;
  }
  return out;
}

EventSet set_union(const EventSet& a, const EventSet& b) {
  EventSet out = a;
  out |= b;
  return out;
}

EventSet set_difference(const EventSet& a, const EventSet& b) {
  EventSet out;
  std::set_difference(a.syscalls.begin(), a.syscalls.end(), b.syscalls.begin(), b.syscalls.end(),
                      std::inserter(out.syscalls, out.syscalls.end()));
  std::set_difference(a.capabilities.begin(), a.capabilities.end(), b.capabilities.begin(),
                      b.capabilities.end(), std::inserter(out.capabilities, out.capabilities.end()));
  return out;
}

std::size_t symmetric_difference_size(const EventSet& a, const EventSet& b) {
  return set_difference(a, b).size() + set_difference(b, a).size();
}

}  // namespace beacon
