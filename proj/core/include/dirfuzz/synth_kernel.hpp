#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirfuzz/callgraph.hpp"
#include "dirfuzz/pcmap.hpp"
#include "dirfuzz/program.hpp"

namespace dirfuzz {

// A call edge that only fires when a prerequisite syscall appeared earlier
// in the program. This is what makes pairwise syscall ordering matter to
// the executor.
struct EdgeGate {
  FunctionId caller;
  FunctionId callee;
  FunctionId prerequisite;  // must be a declared syscall

  bool operator==(const EdgeGate&) const = default;
};

// Deterministic stand-in for the kernel under test. Executing a program
// walks the call graph from each syscall in sequence; gated edges are
// crossed only when their prerequisite was called strictly earlier.
// Immutable after construction; execute() is safe to call concurrently.
class SyntheticKernel {
public:
  SyntheticKernel(CallGraph graph, std::vector<EdgeGate> gates);

  // Parses CGF extended with `gate <caller> <callee> <prereq>` lines.
  static SyntheticKernel load(std::istream& in);
  static SyntheticKernel load(const std::string& text);
  static SyntheticKernel load_file(const std::string& path);

  const CallGraph& graph() const { return graph_; }
  const PcMap& pc_map() const { return pc_map_; }
  const std::vector<EdgeGate>& gates() const { return gates_; }

  // Coverage of one program run: the pc ranges of every visited function.
  // Throws UnknownSyscallError when a call is not a declared syscall.
  PcSet execute(const Program& p) const;

  // CGF plus gate directives; deterministic.
  std::string serialize() const;

private:
  struct Edge {
    NodeId callee;
    int32_t prereq = -1;  // syscall node id, -1 when ungated
  };

  CallGraph graph_;
  std::vector<EdgeGate> gates_;
  PcMap pc_map_;
  std::vector<std::vector<Edge>> adj_;  // by caller node id
};

struct BenchmarkSpec {
  int syscall_count = 40;
  // One entry per target; mirrors the graduated minimum-distance spread of
  // the evaluation benchmark.
  std::vector<int> target_distances = {1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 4,
                                       4, 5, 5, 5, 5, 6, 6, 6, 7, 7, 7, 8, 8,
                                       8};
  int noise_funcs_per_syscall = 2;
  uint64_t pc_base = 0x1000;
  uint64_t pc_width = 16;
  int fanout_limit = 5;
  int max_functions = 500;
};

// Golden ground truth for one benchmark target: the planted gated path's
// entry syscall and gate prerequisite.
struct BenchmarkTarget {
  FunctionId target;
  int distance = 0;
  FunctionId entry;
  FunctionId prerequisite;
};

struct Benchmark {
  SyntheticKernel kernel;
  std::vector<BenchmarkTarget> targets;
};

// Seeded, reproducible synthetic kernel with one golden gated path per
// target. Throws SpecError when the spec is out of bounds.
Benchmark make_benchmark(uint64_t seed, const BenchmarkSpec& spec = {});

std::string benchmark_targets_to_json(const std::vector<BenchmarkTarget>& ts,
                                      int indent = 2);

}  // namespace dirfuzz
