#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dirfuzz/callgraph.hpp"

namespace dirfuzz {

struct AnalysisConfig {
  int k = 3;              // bounded-path length cap: keep paths of length < k
  int d = 2;              // close range: predecessors within d edges
  int max_paths = 10000;  // enumeration cap per job
  int fanout_limit = 5;   // max direct predecessors on a path function

  void validate() const {
    if (k < 1 || d < 1 || max_paths < 1 || fanout_limit < 1)
      throw ConfigError("analysis config values must be >= 1");
  }
};

// A simple path through the call graph; the last node is the target.
using CallPath = std::vector<FunctionId>;

struct PathQueryResult {
  std::vector<CallPath> paths;  // sorted lexicographically by node names
  bool truncated = false;       // enumeration cap was hit
};

// Job 1: all simple paths from a syscall entry to the target, at least one
// edge long. Throws TargetUnknownError; PathExplosionError in strict mode.
PathQueryResult syscall_paths(const CallGraph& g, const FunctionId& target,
                              const AnalysisConfig& cfg, bool strict = false);

// Job 2: all simple paths ending at the target with edge count l, 1 <= l < k,
// starting anywhere.
PathQueryResult bounded_paths(const CallGraph& g, const FunctionId& target,
                              const AnalysisConfig& cfg, bool strict = false);

// Job 3: every function that reaches the target within d edges, plus the
// target itself. Sorted by name.
std::vector<FunctionId> close_area(const CallGraph& g, const FunctionId& target,
                                   const AnalysisConfig& cfg);

struct FanoutVerdict {
  bool accepted = true;
  FunctionId offender;         // set when rejected
  int predecessor_count = 0;   // offender's in-degree
};

// Rejects the target if any function on the given paths has more than
// cfg.fanout_limit direct predecessors. The offender reported is the first
// in name order.
FanoutVerdict check_fanout(const CallGraph& g,
                           const std::vector<CallPath>& paths,
                           const AnalysisConfig& cfg);

// Shortest call-path length from any syscall to the target (in edges),
// nullopt when no syscall reaches it.
std::optional<int> min_call_distance(const CallGraph& g,
                                     const FunctionId& target);

struct TargetSpec {
  FunctionId target;
  AnalysisConfig config;
  PathQueryResult syscall_paths;
  PathQueryResult bounded_paths;
  std::vector<FunctionId> close_area;
  std::optional<int> min_distance;
  FanoutVerdict fanout;

  // Distinct functions appearing on any analyzed path, sorted by name.
  std::vector<FunctionId> path_functions() const;
};

TargetSpec analyze_target(const CallGraph& g, const FunctionId& target,
                          const AnalysisConfig& cfg, bool strict = false);

// JSON report used by the analyze subcommand.
std::string target_spec_to_json(const TargetSpec& spec, int indent = 2);

}  // namespace dirfuzz
