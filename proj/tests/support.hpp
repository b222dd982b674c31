#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>

#include <sys/wait.h>

#include "beacon/option_syntax.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(BEACON_FIXTURE_DIR) + "/" + name; }

inline const beacon::OptionCatalog& catalog() {
  static const beacon::OptionCatalog c = beacon::load_catalog_file(fixture("options.catalog"));
  return c;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("beacon-test-" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct RunResult {
  int status = -1;
  std::string out;
};

// Runs a shell command, capturing stdout; stderr is folded in with 2>&1 by
// the caller when needed.
inline RunResult run(const std::string& command) {
  RunResult r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

inline std::string cli() { return BEACON_CLI_PATH; }

}  // namespace testing
