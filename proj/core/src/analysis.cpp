#include "dirfuzz/analysis.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include <nlohmann/json.hpp>

namespace dirfuzz {

namespace {

// Nodes reachable from some syscall entry (including the entries).
std::vector<bool> reachable_from_syscalls(const CallGraph& g) {
  std::vector<bool> seen(g.node_count(), false);
  std::deque<NodeId> q;
  for (NodeId s : g.syscall_ids()) {
    seen[s] = true;
    q.push_back(s);
  }
  while (!q.empty()) {
    NodeId n = q.front();
    q.pop_front();
    for (NodeId v : g.successors(n)) {
      if (!seen[v]) {
        seen[v] = true;
        q.push_back(v);
      }
    }
  }
  return seen;
}

CallPath to_names(const CallGraph& g, const std::vector<NodeId>& nodes) {
  CallPath p;
  p.reserve(nodes.size());
  for (NodeId n : nodes) p.push_back(g.name(n));
  return p;
}

// Backward DFS from the target, extending the path head with predecessors.
// Predecessor lists are sorted, so enumeration order is deterministic.
// `truncated` is set only when a path beyond max_paths exists or the visit
// budget runs out, never when the result is merely full.
class BackwardEnumerator {
public:
  BackwardEnumerator(const CallGraph& g, NodeId target, size_t max_paths)
      : g_(g),
        max_paths_(max_paths),
        visit_budget_(std::max<size_t>(1'000'000, max_paths * 100)),
        on_path_(g.node_count(), false) {
    path_.push_back(target);
    on_path_[target] = true;
  }

  // keep(head): emit the current path (>= 1 edge) when true.
  // extend(pred, depth): allow `pred` to join a path that currently has
  // `depth` edges.
  template <typename Keep, typename Extend>
  void run(std::vector<CallPath>& out, bool& truncated, Keep keep,
           Extend extend) {
    walk(out, truncated, keep, extend, 0);
    std::sort(out.begin(), out.end());
  }

private:
  template <typename Keep, typename Extend>
  void walk(std::vector<CallPath>& out, bool& truncated, Keep keep,
            Extend extend, int depth) {
    NodeId head = path_.back();
    if (depth >= 1 && keep(head)) {
      if (out.size() >= max_paths_) {
        truncated = true;
        return;
      }
      std::vector<NodeId> fwd(path_.rbegin(), path_.rend());
      out.push_back(to_names(g_, fwd));
    }
    for (NodeId p : g_.predecessors(head)) {
      if (on_path_[p]) continue;  // simple paths only
      if (!extend(p, depth)) continue;
      if (visit_budget_ == 0) {
        truncated = true;
        return;
      }
      --visit_budget_;
      path_.push_back(p);
      on_path_[p] = true;
      walk(out, truncated, keep, extend, depth + 1);
      on_path_[p] = false;
      path_.pop_back();
      if (truncated) return;
    }
  }

  const CallGraph& g_;
  size_t max_paths_;
  size_t visit_budget_;
  std::vector<bool> on_path_;
  std::vector<NodeId> path_;  // reversed: target first
};

}  // namespace

PathQueryResult syscall_paths(const CallGraph& g, const FunctionId& target,
                              const AnalysisConfig& cfg, bool strict) {
  cfg.validate();
  NodeId t = g.require(target);
  PathQueryResult res;

  // A predecessor that no syscall reaches can never head or relay a
  // completed path.
  auto from_sys = reachable_from_syscalls(g);

  BackwardEnumerator en(g, t, static_cast<size_t>(cfg.max_paths));
  en.run(
      res.paths, res.truncated,
      [&](NodeId head) { return g.is_syscall(head); },
      [&](NodeId pred, int) { return from_sys[pred]; });

  if (res.truncated && strict)
    throw PathExplosionError("syscall path enumeration exceeded cap for '" +
                             target + "'");
  return res;
}

PathQueryResult bounded_paths(const CallGraph& g, const FunctionId& target,
                              const AnalysisConfig& cfg, bool strict) {
  cfg.validate();
  NodeId t = g.require(target);
  PathQueryResult res;

  BackwardEnumerator en(g, t, static_cast<size_t>(cfg.max_paths));
  en.run(
      res.paths, res.truncated, [&](NodeId) { return true; },
      [&](NodeId, int depth) { return depth + 1 < cfg.k; });

  if (res.truncated && strict)
    throw PathExplosionError("bounded path enumeration exceeded cap for '" +
                             target + "'");
  return res;
}

std::vector<FunctionId> close_area(const CallGraph& g, const FunctionId& target,
                                   const AnalysisConfig& cfg) {
  cfg.validate();
  NodeId t = g.require(target);

  std::vector<int> dist(g.node_count(), -1);
  std::deque<NodeId> q;
  dist[t] = 0;
  q.push_back(t);
  while (!q.empty()) {
    NodeId n = q.front();
    q.pop_front();
    if (dist[n] >= cfg.d) continue;
    for (NodeId p : g.predecessors(n)) {
      if (dist[p] < 0) {
        dist[p] = dist[n] + 1;
        q.push_back(p);
      }
    }
  }

  std::vector<FunctionId> out;
  for (NodeId n = 0; n < g.node_count(); ++n)
    if (dist[n] >= 0) out.push_back(g.name(n));
  std::sort(out.begin(), out.end());
  return out;
}

FanoutVerdict check_fanout(const CallGraph& g,
                           const std::vector<CallPath>& paths,
                           const AnalysisConfig& cfg) {
  cfg.validate();
  std::set<FunctionId> on_paths;
  for (const auto& p : paths) on_paths.insert(p.begin(), p.end());

  for (const auto& name : on_paths) {  // name order = deterministic offender
    NodeId id = g.require(name);
    int preds = static_cast<int>(g.predecessors(id).size());
    if (preds > cfg.fanout_limit)
      return FanoutVerdict{false, name, preds};
  }
  return FanoutVerdict{};
}

std::optional<int> min_call_distance(const CallGraph& g,
                                     const FunctionId& target) {
  NodeId t = g.require(target);
  std::vector<int> dist(g.node_count(), -1);
  std::deque<NodeId> q;
  dist[t] = 0;
  q.push_back(t);
  while (!q.empty()) {
    NodeId n = q.front();
    q.pop_front();
    for (NodeId p : g.predecessors(n)) {
      if (dist[p] < 0) {
        dist[p] = dist[n] + 1;
        if (g.is_syscall(p)) return dist[p];
        q.push_back(p);
      }
    }
  }
  return std::nullopt;
}

std::vector<FunctionId> TargetSpec::path_functions() const {
  std::set<FunctionId> s;
  for (const auto& p : syscall_paths.paths) s.insert(p.begin(), p.end());
  for (const auto& p : bounded_paths.paths) s.insert(p.begin(), p.end());
  return {s.begin(), s.end()};
}

TargetSpec analyze_target(const CallGraph& g, const FunctionId& target,
                          const AnalysisConfig& cfg, bool strict) {
  TargetSpec spec;
  spec.target = target;
  spec.config = cfg;
  spec.syscall_paths = syscall_paths(g, target, cfg, strict);
  spec.bounded_paths = bounded_paths(g, target, cfg, strict);
  spec.close_area = close_area(g, target, cfg);
  spec.min_distance = min_call_distance(g, target);

  std::vector<CallPath> all = spec.syscall_paths.paths;
  all.insert(all.end(), spec.bounded_paths.paths.begin(),
             spec.bounded_paths.paths.end());
  spec.fanout = check_fanout(g, all, cfg);
  return spec;
}

std::string target_spec_to_json(const TargetSpec& spec, int indent) {
  nlohmann::json j;
  j["target"] = spec.target;
  j["config"] = {{"k", spec.config.k},
                 {"d", spec.config.d},
                 {"max_paths", spec.config.max_paths},
                 {"fanout_limit", spec.config.fanout_limit}};
  j["syscall_paths"] = spec.syscall_paths.paths;
  j["syscall_paths_truncated"] = spec.syscall_paths.truncated;
  j["bounded_paths"] = spec.bounded_paths.paths;
  j["bounded_paths_truncated"] = spec.bounded_paths.truncated;
  j["close_area"] = spec.close_area;
  if (spec.min_distance)
    j["min_distance"] = *spec.min_distance;
  else
    j["min_distance"] = nullptr;
  nlohmann::json f;
  f["accepted"] = spec.fanout.accepted;
  if (!spec.fanout.accepted) {
    f["offender"] = spec.fanout.offender;
    f["predecessors"] = spec.fanout.predecessor_count;
  }
  j["fanout"] = f;
  return j.dump(indent);
}

}  // namespace dirfuzz
