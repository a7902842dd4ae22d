#include "dirfuzz/synth_kernel.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dirfuzz {

namespace {

class GateCollector : public CgfDirectiveHandler {
public:
  bool handle(const std::string& directive, const std::vector<std::string>& args,
              int line) override {
    if (directive != "gate") return false;
    if (args.size() != 4)
      throw ParseError(line, "gate takes caller, callee, prereq");
    for (size_t i = 1; i < 4; ++i)
      if (!valid_function_name(args[i]))
        throw ParseError(line, "invalid function name '" + args[i] + "'");
    gates.push_back({args[1], args[2], args[3]});
    return true;
  }

  std::vector<EdgeGate> gates;
};

}  // namespace

SyntheticKernel::SyntheticKernel(CallGraph graph, std::vector<EdgeGate> gates)
    : graph_(std::move(graph)), gates_(std::move(gates)), pc_map_(PcMap::build(graph_)) {
  adj_.assign(graph_.node_count(), {});
  for (NodeId u = 0; u < graph_.node_count(); ++u) {
    adj_[u].reserve(graph_.successors(u).size());
    for (NodeId v : graph_.successors(u)) adj_[u].push_back({v, -1});
  }

  std::set<std::pair<NodeId, NodeId>> gated;
  for (const auto& g : gates_) {
    auto cu = graph_.find(g.caller);
    auto cv = graph_.find(g.callee);
    auto cp = graph_.find(g.prerequisite);
    if (!cu || !cv)
      throw ValidationError("gate on undeclared edge " + g.caller + " -> " +
                            g.callee);
    if (!cp || !graph_.is_syscall(*cp))
      throw ValidationError("gate prerequisite '" + g.prerequisite +
                            "' is not a declared syscall");
    if (!gated.insert({*cu, *cv}).second)
      throw ValidationError("duplicate gate on edge " + g.caller + " -> " +
                            g.callee);
    bool found = false;
    for (auto& e : adj_[*cu]) {
      if (e.callee == *cv) {
        e.prereq = static_cast<int32_t>(*cp);
        found = true;
        break;
      }
    }
    if (!found)
      throw ValidationError("gate references missing edge " + g.caller +
                            " -> " + g.callee);
  }

  // Canonical order for serialization.
  std::sort(gates_.begin(), gates_.end(), [](const EdgeGate& a, const EdgeGate& b) {
    return std::tie(a.caller, a.callee) < std::tie(b.caller, b.callee);
  });
}

SyntheticKernel SyntheticKernel::load(std::istream& in) {
  GateCollector gc;
  CallGraph g = load_cgf(in, &gc);
  return SyntheticKernel(std::move(g), std::move(gc.gates));
}

SyntheticKernel SyntheticKernel::load(const std::string& text) {
  std::istringstream in(text);
  return load(in);
}

SyntheticKernel SyntheticKernel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open kernel file: " + path);
  return load(in);
}

PcSet SyntheticKernel::execute(const Program& p) const {
  std::vector<NodeId> entries;
  entries.reserve(p.calls.size());
  for (const auto& call : p.calls) {
    auto id = graph_.find(call);
    if (!id || !graph_.is_syscall(*id)) throw UnknownSyscallError(call);
    entries.push_back(*id);
  }

  PcSet coverage;
  std::vector<bool> called_before(graph_.node_count(), false);
  std::vector<uint32_t> visit_mark(graph_.node_count(), 0);
  uint32_t epoch = 0;
  std::vector<NodeId> stack;
  std::vector<NodeId> covered_nodes;
  std::vector<bool> covered(graph_.node_count(), false);

  for (size_t i = 0; i < entries.size(); ++i) {
    // Gates see only syscalls strictly before this position.
    ++epoch;
    stack.clear();
    stack.push_back(entries[i]);
    visit_mark[entries[i]] = epoch;
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      if (!covered[n]) {
        covered[n] = true;
        covered_nodes.push_back(n);
      }
      for (const auto& e : adj_[n]) {
        if (visit_mark[e.callee] == epoch) continue;
        if (e.prereq >= 0 && !called_before[static_cast<NodeId>(e.prereq)])
          continue;
        visit_mark[e.callee] = epoch;
        stack.push_back(e.callee);
      }
    }
    called_before[entries[i]] = true;
  }

  std::sort(covered_nodes.begin(), covered_nodes.end());
  for (NodeId n : covered_nodes) {
    const auto& inf = graph_.info(n);
    if (inf.pc_range) coverage.add_range(inf.pc_range->start, inf.pc_range->end);
  }
  return coverage;
}

std::string SyntheticKernel::serialize() const {
  std::string out = serialize_cgf(graph_);
  for (const auto& g : gates_)
    out += "gate " + g.caller + " " + g.callee + " " + g.prerequisite + "\n";
  return out;
}

}  // namespace dirfuzz
