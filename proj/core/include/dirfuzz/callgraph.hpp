#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/program.hpp"

namespace dirfuzz {

using NodeId = uint32_t;

enum class FunctionKind { Syscall, Internal };

struct PcRange {
  uint64_t start = 0;
  uint64_t end = 0;  // exclusive

  bool operator==(const PcRange&) const = default;
};

struct FunctionInfo {
  FunctionId id;
  FunctionKind kind = FunctionKind::Internal;
  std::optional<std::string> source;
  std::optional<PcRange> pc_range;
  // Position in the input, used when concatenating calling code.
  uint32_t decl_index = 0;
};

// Immutable kernel call graph G = (C u F, E). Node ids are dense indices in
// name-sorted order, so every traversal that walks adjacency lists is
// deterministic. Safe to share across threads once built.
class CallGraph {
public:
  class Builder {
  public:
    Builder& add_syscall(const FunctionId& name);
    Builder& add_internal(const FunctionId& name);
    Builder& add_edge(const FunctionId& caller, const FunctionId& callee);
    Builder& set_pc_range(const FunctionId& name, uint64_t start, uint64_t end);
    Builder& set_source(const FunctionId& name, std::string source);

    // Validates everything and produces the graph. Throws ValidationError.
    CallGraph build() &&;

  private:
    friend class CallGraph;
    struct Decl {
      FunctionId name;
      FunctionKind kind;
    };
    std::vector<Decl> decls_;
    std::set<FunctionId> declared_;
    std::vector<std::pair<FunctionId, FunctionId>> edges_;
    std::map<FunctionId, PcRange> pc_ranges_;
    std::map<FunctionId, std::string> sources_;
  };

  CallGraph() = default;

  size_t node_count() const { return infos_.size(); }
  size_t syscall_count() const { return syscall_ids_.size(); }
  size_t internal_count() const { return infos_.size() - syscall_ids_.size(); }
  size_t edge_count() const { return edge_count_; }

  bool contains(const FunctionId& name) const;
  std::optional<NodeId> find(const FunctionId& name) const;
  // Throws TargetUnknownError when absent.
  NodeId require(const FunctionId& name) const;

  const FunctionInfo& info(NodeId id) const { return infos_[id]; }
  const FunctionInfo& info(const FunctionId& name) const {
    return infos_[require(name)];
  }
  const FunctionId& name(NodeId id) const { return infos_[id].id; }
  bool is_syscall(NodeId id) const {
    return infos_[id].kind == FunctionKind::Syscall;
  }

  // Name-sorted.
  std::vector<FunctionId> syscall_names() const;
  const std::vector<NodeId>& syscall_ids() const { return syscall_ids_; }

  // Adjacency, sorted by node id (= name order).
  const std::vector<NodeId>& successors(NodeId id) const { return succ_[id]; }
  const std::vector<NodeId>& predecessors(NodeId id) const { return pred_[id]; }

  // All edges as (caller, callee) node pairs, sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

private:
  friend class Builder;
  std::vector<FunctionInfo> infos_;           // indexed by NodeId
  std::map<FunctionId, NodeId> index_;        // name -> id
  std::vector<NodeId> syscall_ids_;
  std::vector<std::vector<NodeId>> succ_;
  std::vector<std::vector<NodeId>> pred_;
  size_t edge_count_ = 0;
};

// Hook for directives the base format does not know (e.g. the synthetic
// kernel's gate lines). Return true if consumed; false falls through to a
// ParseError.
class CgfDirectiveHandler {
public:
  virtual ~CgfDirectiveHandler() = default;
  virtual bool handle(const std::string& directive,
                      const std::vector<std::string>& args, int line) = 0;
};

// Parses the CGF interchange format. Throws ParseError / ValidationError.
CallGraph load_cgf(std::istream& in, CgfDirectiveHandler* extensions = nullptr);
CallGraph load_cgf(const std::string& text,
                   CgfDirectiveHandler* extensions = nullptr);
CallGraph load_cgf_file(const std::string& path,
                        CgfDirectiveHandler* extensions = nullptr);

// Deterministic serialization; load_cgf(serialize_cgf(g)) == g.
std::string serialize_cgf(const CallGraph& g);

bool graph_equal(const CallGraph& a, const CallGraph& b);

// callee -> set of callers, over function names.
using AdjacencyMap = std::map<FunctionId, std::set<FunctionId>>;
AdjacencyMap forward_view(const CallGraph& g);
AdjacencyMap reverse_view(const CallGraph& g);
AdjacencyMap reverse_adjacency(const AdjacencyMap& adj);

bool valid_function_name(const std::string& name);

}  // namespace dirfuzz
