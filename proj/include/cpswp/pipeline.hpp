#pragma once

// The three end-to-end commands behind the command-line tool. Each returns a
// report instead of printing or exiting, so tests can drive them directly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cpswp {

enum ExitCode : int { kExitOk = 0, kExitFails = 1, kExitInput = 2, kExitSignature = 3, kExitUnknown = 4 };

struct PipelineOptions {
  std::string program_path;
  std::string signature_path;  // empty: the builtin signature of the command
  std::string dfa_path;        // check-trace
  std::string instance;        // cps: "", "trace" or "cost"
  bool unsafe_constants = false;
  bool json_ast = false;
  bool typed = false;
  // numeric policy
  int moments = 1;
  double epsilon = 1e-9;
  std::uint64_t max_unfold = 1000000;
  int quad_points = 1024;
  // oracle cross-check
  bool oracle = false;
  std::optional<int> oracle_depth;
  bool dump_oracle = false;
  std::vector<std::string> argv;  // echoed into the report
};

struct RunReport {
  nlohmann::json json;
  std::string text;  // human-readable form
  int exit_code = kExitOk;
};

RunReport cmd_cps(const PipelineOptions& opts);
RunReport cmd_check_trace(const PipelineOptions& opts);
RunReport cmd_expected_cost(const PipelineOptions& opts);

inline constexpr int kDefaultTraceOracleDepth = 20;
inline constexpr int kDefaultCostOracleDepth = 60;

}  // namespace cpswp
