#include <cstdio>
#include <memory>

#include <sys/wait.h>

#include "beacon/explorer.hpp"
#include "beacon/monitor.hpp"

namespace beacon {
namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

}  // namespace

EventSet CommandProbe::evaluate(const Environment& env) {
  std::string cmd = command_;
  for (const auto& o : env.options) cmd += " " + shell_quote(render_flag(o));
  for (const auto& w : env.workloads) cmd += " " + shell_quote("workload:" + w.canonical());

  struct Closer {
    void operator()(FILE* f) const {
      if (f) pclose(f);
    }
  };
  FILE* raw = popen(cmd.c_str(), "r");
  if (!raw) throw ProbeError("cannot start probe command: " + command_);
  std::unique_ptr<FILE, Closer> pipe(raw);

  std::string output;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe.get())) output.append(buf, n);
  const int status = pclose(pipe.release());
  if (status != 0)
    throw ProbeError("probe command exited with status " + std::to_string(WEXITSTATUS(status)) + ": " + command_);

  const auto results = ingest_trace(parse_trace(output));
  if (results.size() != 1)
    throw ProbeError("probe command produced " + std::to_string(results.size()) +
                     " tracked namespaces; expected exactly one");
  return results.begin()->second.events;
}

}  // namespace beacon
