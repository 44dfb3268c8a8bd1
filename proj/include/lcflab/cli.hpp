#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lcf::cli {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
  std::string command;  // calibrate | check-metric | cspace-scan | ricci-scan | classify
  std::string spec_path;
  int dim = 4;
  int l_max = -1;
  double tol = 1e-5;
  double h = 0.01;
  int steps = 100;
  int geodesics = 20;
  int points = 20;
  std::uint64_t seed = 0;
  std::string out_path;  // empty = stdout
};

struct ParseResult {
  int exit_code = 0;
  bool should_run = false;
  RunConfig config;
  std::string message;  // diagnostic on errors, help text otherwise
};

// Flags override config-file values; unknown flags/keys are rejected with
// exit code 2.
ParseResult parse_config(const std::vector<std::string>& args);

// Exit code 0 on success, 1 on verdict-level failure, 2 on usage error.
int run(const RunConfig& config);

int run_cli(int argc, const char* const* argv);

}  // namespace lcf::cli
