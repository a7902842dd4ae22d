#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "dirfuzz/analysis.hpp"
#include "dirfuzz/rng.hpp"
#include "dirfuzz/synth_kernel.hpp"

namespace dirfuzz {

namespace {

std::string two_digits(int n) {
  std::string s = std::to_string(n);
  return s.size() < 2 ? "0" + s : s;
}

// Small C-ish body so prompts built against the benchmark carry plausible
// calling code. Callee names are embedded because that is what a model (or
// the oracle) has to work from.
std::string make_source(const std::string& name,
                        const std::vector<std::string>& callees) {
  std::string body = "static int " + name + "(struct kctx *ctx)\n{\n";
  body += "\tif (!ctx || !ctx->live)\n\t\treturn -EINVAL;\n";
  for (const auto& c : callees) body += "\tctx->rc = " + c + "(ctx);\n";
  body += "\treturn ctx->rc;\n}";
  return body;
}

}  // namespace

Benchmark make_benchmark(uint64_t seed, const BenchmarkSpec& spec) {
  int n_targets = static_cast<int>(spec.target_distances.size());
  if (spec.syscall_count < n_targets + 1)
    throw SpecError("need more syscalls than targets (one entry each plus "
                    "prerequisite pool)");
  if (spec.noise_funcs_per_syscall < 0 || spec.pc_width == 0)
    throw SpecError("bad noise or pc width setting");
  for (int d : spec.target_distances)
    if (d < 1) throw SpecError("target distance must be >= 1");

  Rng rng(seed);
  CallGraph::Builder b;
  std::vector<std::string> syscalls;
  std::map<std::string, std::vector<std::string>> callees;

  for (int i = 0; i < spec.syscall_count; ++i) {
    std::string name = "sys_call_" + two_digits(i);
    syscalls.push_back(name);
    b.add_syscall(name);
  }

  int function_count = spec.syscall_count;
  auto add_func = [&](const std::string& name) {
    b.add_internal(name);
    if (++function_count > spec.max_functions)
      throw SpecError("benchmark exceeds " +
                      std::to_string(spec.max_functions) + " functions");
  };

  std::vector<BenchmarkTarget> targets;
  std::vector<EdgeGate> gates;

  // One golden chain per target: entry -> hop1 -> ... -> target, with the
  // final edge gated on a prerequisite syscall drawn from the non-entry
  // pool. Everything before the gate is reachable unconditionally, so an
  // unguided fuzzer still produces close-area hits at a modest rate.
  for (int i = 0; i < n_targets; ++i) {
    int dist = spec.target_distances[i];
    std::string tag = two_digits(i);
    std::string entry = syscalls[i];
    std::string prereq = syscalls[n_targets + static_cast<int>(rng.uniform_index(
                                        spec.syscall_count - n_targets))];
    std::string target = "target_fn_" + tag;

    std::string prev = entry;
    for (int hop = 1; hop < dist; ++hop) {
      std::string node = "t" + tag + "_hop" + std::to_string(hop);
      add_func(node);
      b.add_edge(prev, node);
      callees[prev].push_back(node);
      prev = node;
    }
    add_func(target);
    b.add_edge(prev, target);
    callees[prev].push_back(target);
    gates.push_back({prev, target, prereq});

    targets.push_back({target, dist, entry, prereq});
  }

  // Private helpers per syscall keep the corpus growing on unguided runs.
  for (int i = 0; i < spec.syscall_count; ++i) {
    for (int j = 0; j < spec.noise_funcs_per_syscall; ++j) {
      std::string node = "util_" + two_digits(i) + "_" + std::to_string(j);
      add_func(node);
      b.add_edge(syscalls[i], node);
      callees[syscalls[i]].push_back(node);
    }
  }

  // Collect every declared name for pc assignment and sources. Assignment
  // is by sorted name so the output is independent of construction order.
  std::set<std::string> all_names(syscalls.begin(), syscalls.end());
  for (int i = 0; i < n_targets; ++i) {
    int dist = spec.target_distances[i];
    std::string tag = two_digits(i);
    for (int hop = 1; hop < dist; ++hop)
      all_names.insert("t" + tag + "_hop" + std::to_string(hop));
    all_names.insert("target_fn_" + tag);
  }
  for (int i = 0; i < spec.syscall_count; ++i)
    for (int j = 0; j < spec.noise_funcs_per_syscall; ++j)
      all_names.insert("util_" + two_digits(i) + "_" + std::to_string(j));

  uint64_t pc = spec.pc_base;
  for (const auto& name : all_names) {
    b.set_pc_range(name, pc, pc + spec.pc_width);
    pc += spec.pc_width;
    b.set_source(name, make_source(name, callees[name]));
  }

  SyntheticKernel kernel(std::move(b).build(), std::move(gates));

  // The construction gives every on-path function in-degree <= 1, but the
  // contract is on the analyzed graph, so verify it there.
  AnalysisConfig cfg;
  cfg.fanout_limit = spec.fanout_limit;
  for (auto& t : targets) {
    auto spec_t = analyze_target(kernel.graph(), t.target, cfg);
    if (!spec_t.fanout.accepted)
      throw SpecError("generated target " + t.target +
                      " fails the fanout check at " + spec_t.fanout.offender);
    if (!spec_t.min_distance || *spec_t.min_distance != t.distance)
      throw SpecError("generated target " + t.target +
                      " has wrong minimum distance");
  }

  return Benchmark{std::move(kernel), std::move(targets)};
}

std::string benchmark_targets_to_json(const std::vector<BenchmarkTarget>& ts,
                                      int indent) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : ts) {
    arr.push_back({{"target", t.target},
                   {"distance", t.distance},
                   {"entry", t.entry},
                   {"prerequisite", t.prerequisite}});
  }
  return arr.dump(indent);
}

}  // namespace dirfuzz
