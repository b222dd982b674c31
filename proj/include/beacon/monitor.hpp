#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "beacon/event_set.hpp"

namespace beacon {

// One raw event from a collector. The confinement markers (unshare, prctl,
// seccomp, capset) arrive as ordinary syscall records.
struct TraceRecord {
  std::uint64_t timestamp = 0;  // monotonic nanoseconds
  std::uint64_t namespace_id = 0;
  Event event;

  bool operator==(const TraceRecord&) const = default;
};

// Per-namespace monitor entry. Created by `unshare`; seccomp_flag is raised
// by `prctl` or `seccomp`, capability_flag by `capset`. Flags never fall.
struct NamespaceState {
  bool seccomp_flag = false;
  bool capability_flag = false;
  EventSet events;
  std::map<Event, std::uint64_t> counts;  // occurrences of each recorded event
};

using IngestResult = std::map<std::uint64_t, NamespaceState>;

// Streaming replay of a trace through the confinement state machine.
class Monitor {
 public:
  // Throws OrderingError if the record's timestamp precedes the previous
  // record of the same namespace.
  void feed(const TraceRecord& record);

  const IngestResult& state() const { return tracked_; }
  std::size_t records_seen() const { return index_; }

 private:
  IngestResult tracked_;
  std::map<std::uint64_t, std::uint64_t> last_timestamp_;
  std::size_t index_ = 0;
};

IngestResult ingest_trace(const std::vector<TraceRecord>& records);

// `beacon-trace v1` text format. parse_trace throws FormatError naming the
// offending line.
std::vector<TraceRecord> parse_trace(std::string_view document);
std::string write_trace(const std::vector<TraceRecord>& records);
inline constexpr std::string_view kTraceHeader = "beacon-trace v1";

// A trace run bound to the environment it was collected under.
struct Observation {
  std::string environment_id;
  EventSet events;
  std::map<Event, std::uint64_t> counts;
};

// LookupError if the namespace was never tracked.
Observation event_set_for(const std::string& environment_id, const IngestResult& results,
                          std::uint64_t namespace_id);

}  // namespace beacon
