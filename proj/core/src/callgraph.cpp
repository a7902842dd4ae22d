#include "dirfuzz/callgraph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace dirfuzz {

bool valid_function_name(const std::string& name) {
  if (name.empty()) return false;
  char c0 = name[0];
  if (!(std::isalpha(static_cast<unsigned char>(c0)) || c0 == '_')) return false;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
        c == '$')
      continue;
    return false;
  }
  return true;
}

CallGraph::Builder& CallGraph::Builder::add_syscall(const FunctionId& name) {
  if (!declared_.insert(name).second)
    throw ValidationError("duplicate declaration of '" + name + "'");
  decls_.push_back({name, FunctionKind::Syscall});
  return *this;
}

CallGraph::Builder& CallGraph::Builder::add_internal(const FunctionId& name) {
  if (!declared_.insert(name).second)
    throw ValidationError("duplicate declaration of '" + name + "'");
  decls_.push_back({name, FunctionKind::Internal});
  return *this;
}

CallGraph::Builder& CallGraph::Builder::add_edge(const FunctionId& caller,
                                                 const FunctionId& callee) {
  if (caller == callee)
    throw ValidationError("self-loop on '" + caller + "'");
  edges_.emplace_back(caller, callee);
  return *this;
}

CallGraph::Builder& CallGraph::Builder::set_pc_range(const FunctionId& name,
                                                     uint64_t start,
                                                     uint64_t end) {
  if (start >= end)
    throw ValidationError("empty pc range for '" + name + "'");
  if (pc_ranges_.count(name))
    throw ValidationError("duplicate pc range for '" + name + "'");
  pc_ranges_[name] = PcRange{start, end};
  return *this;
}

CallGraph::Builder& CallGraph::Builder::set_source(const FunctionId& name,
                                                   std::string source) {
  if (sources_.count(name))
    throw ValidationError("duplicate source for '" + name + "'");
  sources_[name] = std::move(source);
  return *this;
}

CallGraph CallGraph::Builder::build() && {
  CallGraph g;

  // NodeId = rank in name order; declaration order kept separately.
  std::vector<Decl> sorted = decls_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Decl& a, const Decl& b) { return a.name < b.name; });

  std::map<FunctionId, uint32_t> decl_order;
  for (uint32_t i = 0; i < decls_.size(); ++i) decl_order[decls_[i].name] = i;

  g.infos_.reserve(sorted.size());
  for (NodeId id = 0; id < sorted.size(); ++id) {
    FunctionInfo inf;
    inf.id = sorted[id].name;
    inf.kind = sorted[id].kind;
    inf.decl_index = decl_order[inf.id];
    g.index_[inf.id] = id;
    if (inf.kind == FunctionKind::Syscall) g.syscall_ids_.push_back(id);
    g.infos_.push_back(std::move(inf));
  }

  for (auto& [name, range] : pc_ranges_) {
    auto it = g.index_.find(name);
    if (it == g.index_.end())
      throw ValidationError("pc range for undeclared function '" + name + "'");
    g.infos_[it->second].pc_range = range;
  }
  for (auto& [name, src] : sources_) {
    auto it = g.index_.find(name);
    if (it == g.index_.end())
      throw ValidationError("source for undeclared function '" + name + "'");
    g.infos_[it->second].source = std::move(src);
  }

  // Disjointness over all declared ranges.
  std::vector<std::pair<PcRange, FunctionId>> ranges;
  for (const auto& inf : g.infos_)
    if (inf.pc_range) ranges.emplace_back(*inf.pc_range, inf.id);
  std::sort(ranges.begin(), ranges.end(), [](const auto& a, const auto& b) {
    return a.first.start < b.first.start;
  });
  for (size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first.start < ranges[i - 1].first.end)
      throw ValidationError("pc ranges of '" + ranges[i - 1].second + "' and '" +
                            ranges[i].second + "' overlap");
  }

  g.succ_.assign(g.infos_.size(), {});
  g.pred_.assign(g.infos_.size(), {});
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& [caller, callee] : edges_) {
    auto ci = g.index_.find(caller);
    if (ci == g.index_.end())
      throw ValidationError("edge references undeclared function '" + caller +
                            "'");
    auto ce = g.index_.find(callee);
    if (ce == g.index_.end())
      throw ValidationError("edge references undeclared function '" + callee +
                            "'");
    if (!seen.insert({ci->second, ce->second}).second) continue;  // set of edges
    g.succ_[ci->second].push_back(ce->second);
    g.pred_[ce->second].push_back(ci->second);
  }
  g.edge_count_ = seen.size();
  for (auto& v : g.succ_) std::sort(v.begin(), v.end());
  for (auto& v : g.pred_) std::sort(v.begin(), v.end());

  return g;
}

bool CallGraph::contains(const FunctionId& name) const {
  return index_.count(name) != 0;
}

std::optional<NodeId> CallGraph::find(const FunctionId& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId CallGraph::require(const FunctionId& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw TargetUnknownError(name);
  return it->second;
}

std::vector<FunctionId> CallGraph::syscall_names() const {
  std::vector<FunctionId> out;
  out.reserve(syscall_ids_.size());
  for (NodeId id : syscall_ids_) out.push_back(infos_[id].id);
  return out;
}

std::vector<std::pair<NodeId, NodeId>> CallGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < succ_.size(); ++u)
    for (NodeId v : succ_[u]) out.emplace_back(u, v);
  return out;
}

namespace {

// Splits on spaces/tabs; never returns empty tokens.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

uint64_t parse_pc_value(const std::string& tok, int line) {
  try {
    size_t pos = 0;
    uint64_t v;
    if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X'))
      v = std::stoull(tok.substr(2), &pos, 16), pos += 2;
    else
      v = std::stoull(tok, &pos, 10);
    if (pos != tok.size()) throw ParseError(line, "bad pc value '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(line, "bad pc value '" + tok + "'");
  }
}

std::string checked_name(const std::string& tok, int line) {
  if (!valid_function_name(tok))
    throw ParseError(line, "invalid function name '" + tok + "'");
  return tok;
}

}  // namespace

CallGraph load_cgf(std::istream& in, CgfDirectiveHandler* extensions) {
  CallGraph::Builder b;
  std::string line;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0][0] == '#') continue;

    const std::string& d = toks[0];
    if (d == "syscall") {
      if (toks.size() != 2) throw ParseError(lineno, "syscall takes one name");
      b.add_syscall(checked_name(toks[1], lineno));
    } else if (d == "func") {
      if (toks.size() != 2) throw ParseError(lineno, "func takes one name");
      b.add_internal(checked_name(toks[1], lineno));
    } else if (d == "edge") {
      if (toks.size() != 3)
        throw ParseError(lineno, "edge takes caller and callee");
      b.add_edge(checked_name(toks[1], lineno), checked_name(toks[2], lineno));
    } else if (d == "pc") {
      if (toks.size() != 4)
        throw ParseError(lineno, "pc takes name, start, end");
      b.set_pc_range(checked_name(toks[1], lineno),
                     parse_pc_value(toks[2], lineno),
                     parse_pc_value(toks[3], lineno));
    } else if (d == "source") {
      if (toks.size() != 3 || toks[2] != "<<<")
        throw ParseError(lineno, "source takes a name followed by <<<");
      std::string name = checked_name(toks[1], lineno);
      int start_line = lineno;
      std::string body;
      bool closed = false;
      bool first = true;
      while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == ">>>") {
          closed = true;
          break;
        }
        if (!first) body += '\n';
        body += line;
        first = false;
      }
      if (!closed)
        throw ParseError(start_line, "unterminated source block for '" + name +
                                         "'");
      b.set_source(name, std::move(body));
    } else {
      if (extensions && extensions->handle(d, toks, lineno)) continue;
      throw ParseError(lineno, "unknown directive '" + d + "'");
    }
  }

  return std::move(b).build();
}

CallGraph load_cgf(const std::string& text, CgfDirectiveHandler* extensions) {
  std::istringstream in(text);
  return load_cgf(in, extensions);
}

CallGraph load_cgf_file(const std::string& path,
                        CgfDirectiveHandler* extensions) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open callgraph file: " + path);
  return load_cgf(in, extensions);
}

std::string serialize_cgf(const CallGraph& g) {
  std::ostringstream out;
  // Nodes are already in name order.
  for (NodeId id = 0; id < g.node_count(); ++id)
    if (g.is_syscall(id)) out << "syscall " << g.name(id) << '\n';
  for (NodeId id = 0; id < g.node_count(); ++id)
    if (!g.is_syscall(id)) out << "func " << g.name(id) << '\n';
  for (const auto& [u, v] : g.edges())
    out << "edge " << g.name(u) << ' ' << g.name(v) << '\n';
  for (NodeId id = 0; id < g.node_count(); ++id) {
    const auto& inf = g.info(id);
    if (inf.pc_range)
      out << "pc " << inf.id << ' ' << inf.pc_range->start << ' '
          << inf.pc_range->end << '\n';
  }
  for (NodeId id = 0; id < g.node_count(); ++id) {
    const auto& inf = g.info(id);
    if (inf.source) {
      out << "source " << inf.id << " <<<\n";
      if (!inf.source->empty()) out << *inf.source << '\n';
      out << ">>>\n";
    }
  }
  return out.str();
}

bool graph_equal(const CallGraph& a, const CallGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count())
    return false;
  for (NodeId id = 0; id < a.node_count(); ++id) {
    const auto& ia = a.info(id);
    const auto& ib = b.info(id);
    if (ia.id != ib.id || ia.kind != ib.kind || ia.source != ib.source ||
        ia.pc_range != ib.pc_range)
      return false;
  }
  return a.edges() == b.edges();
}

AdjacencyMap forward_view(const CallGraph& g) {
  AdjacencyMap out;
  for (const auto& [u, v] : g.edges()) out[g.name(u)].insert(g.name(v));
  return out;
}

AdjacencyMap reverse_view(const CallGraph& g) {
  AdjacencyMap out;
  for (const auto& [u, v] : g.edges()) out[g.name(v)].insert(g.name(u));
  return out;
}

AdjacencyMap reverse_adjacency(const AdjacencyMap& adj) {
  AdjacencyMap out;
  for (const auto& [node, nbrs] : adj)
    for (const auto& n : nbrs) out[n].insert(node);
  return out;
}

}  // namespace dirfuzz
