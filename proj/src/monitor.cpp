#include "beacon/monitor.hpp"

#include "beacon/error.hpp"
#include "beacon/text.hpp"

namespace beacon {

void Monitor::feed(const TraceRecord& r) {
  const std::size_t index = index_++;
  auto [last, inserted] = last_timestamp_.try_emplace(r.namespace_id, r.timestamp);
  if (!inserted) {
    if (r.timestamp < last->second)
      throw OrderingError("timestamp " + std::to_string(r.timestamp) + " precedes " +
                              std::to_string(last->second) + " in namespace " + std::to_string(r.namespace_id),
                          index);
    last->second = r.timestamp;
  }

  const bool is_syscall = r.event.kind == EventKind::Syscall;
  auto it = tracked_.find(r.namespace_id);
  if (it == tracked_.end()) {
    // Only unshare opens an entry; everything else from unknown namespaces
    // belongs to the host or to another container.
    if (is_syscall && r.event.name == "unshare") tracked_.emplace(r.namespace_id, NamespaceState{});
    return;
  }

  NamespaceState& ns = it->second;
  if (is_syscall) {
    if (ns.seccomp_flag) {
      ns.events.insert(r.event);
      ++ns.counts[r.event];
    }
    // A repeated marker after confinement was recorded above like any other
    // syscall; the flags only ever move from false to true.
    if (r.event.name == "prctl" || r.event.name == "seccomp") ns.seccomp_flag = true;
    if (r.event.name == "capset") ns.capability_flag = true;
  } else if (ns.capability_flag) {
    ns.events.insert(r.event);
    ++ns.counts[r.event];
  }
}

IngestResult ingest_trace(const std::vector<TraceRecord>& records) {
  Monitor m;
  for (const auto& r : records) m.feed(r);
  return m.state();
}

std::vector<TraceRecord> parse_trace(std::string_view document) {
  std::vector<TraceRecord> out;
  const auto lines = text::split(document, '\n');
  std::size_t line_no = 0;
  bool header_seen = false;
  for (auto line : lines) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kTraceHeader) throw FormatError("trace line 1: expected header '" + std::string(kTraceHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) {
      if (line_no == lines.size()) break;  // trailing newline
      throw FormatError("trace line " + std::to_string(line_no) + ": empty record");
    }
    const auto fields = text::split(line, ' ');
    const auto where = "trace line " + std::to_string(line_no) + ": ";
    if (fields.size() != 4) throw FormatError(where + "expected '<timestamp_ns> <namespace_id> <kind> <name>'");
    const auto ts = text::parse_u64(fields[0]);
    const auto ns = text::parse_u64(fields[1]);
    if (!ts) throw FormatError(where + "bad timestamp '" + fields[0] + "'");
    if (!ns) throw FormatError(where + "bad namespace id '" + fields[1] + "'");
    TraceRecord rec{*ts, *ns, {}};
    try {
      if (fields[2] == "SYS")
        rec.event = Event::syscall(fields[3]);
      else if (fields[2] == "CAP")
        rec.event = Event::capability(fields[3]);
      else
        throw FormatError(where + "unknown record kind '" + fields[2] + "'");
    } catch (const ValidationError& e) {
      throw FormatError(where + e.what());
    }
    out.push_back(std::move(rec));
  }
  if (!header_seen) throw FormatError("trace is empty (missing header)");
  return out;
}

std::string write_trace(const std::vector<TraceRecord>& records) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.timestamp);
    out += ' ';
    out += std::to_string(r.namespace_id);
    out += r.event.kind == EventKind::Syscall ? " SYS " : " CAP ";
    out += r.event.name;
    out += '\n';
  }
  return out;
}

Observation event_set_for(const std::string& environment_id, const IngestResult& results,
                          std::uint64_t namespace_id) {
  const auto it = results.find(namespace_id);
  if (it == results.end())
    throw LookupError("namespace " + std::to_string(namespace_id) + " not present in trace results");
  return {environment_id, it->second.events, it->second.counts};
}

}  // namespace beacon
