#include "dirfuzz/fuzz_engine.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace dirfuzz {

const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::Generation: return "generation";
    case TaskKind::Mutation: return "mutation";
    case TaskKind::Triage: return "triage";
  }
  return "unknown";
}

void WorkQueue::push(Task t) {
  if (t.kind == TaskKind::Triage)
    triage_.push_back(std::move(t));
  else
    other_.push_back(std::move(t));
}

std::optional<Task> WorkQueue::pop() {
  if (!triage_.empty()) {
    Task t = std::move(triage_.front());
    triage_.pop_front();
    return t;
  }
  if (!other_.empty()) {
    Task t = std::move(other_.front());
    other_.pop_front();
    return t;
  }
  return std::nullopt;
}

void FuzzConfig::validate() const {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  if (template_prob < 0 || template_prob > 1 || mutation_prob < 0 ||
      mutation_prob > 1 || random_insert_prob < 0 || random_insert_prob > 1)
    throw ConfigError("probabilities must lie in [0, 1]");
}

FuzzEngine::FuzzEngine(const SyntheticKernel& kernel, FuzzConfig cfg,
                       uint64_t seed)
    : kernel_(kernel), cfg_(cfg), rng_(seed) {
  cfg_.validate();
}

size_t FuzzEngine::column_of(const ChoiceTable& ct, const FunctionId& name) {
  if (ct.syscalls() != cached_syscalls_) {
    cached_syscalls_ = ct.syscalls();
    name_to_col_.clear();
    for (size_t i = 0; i < cached_syscalls_.size(); ++i)
      name_to_col_[cached_syscalls_[i]] = i;
  }
  auto it = name_to_col_.find(name);
  if (it == name_to_col_.end()) throw UnknownSyscallError(name);
  return it->second;
}

void FuzzEngine::validate_templates(
    const std::vector<Program>& templates) const {
  for (const auto& t : templates) {
    if (t.empty() || t.size() > cfg_.max_len)
      throw ConfigError("template length out of bounds");
    for (const auto& call : t.calls) {
      auto id = kernel_.graph().find(call);
      if (!id || !kernel_.graph().is_syscall(*id))
        throw UnknownSyscallError(call);
    }
  }
}

Program FuzzEngine::table_walk(const ChoiceTable& ct, size_t len) {
  Program p;
  p.calls.reserve(len);
  std::optional<size_t> prev;
  for (size_t i = 0; i < len; ++i) {
    size_t next = ct.sample_next(prev, rng_);
    p.calls.push_back(ct.syscalls()[next]);
    prev = next;
  }
  return p;
}

Program FuzzEngine::generate(const ChoiceTable& ct,
                             const std::vector<Program>& templates) {
  if (!templates.empty() && rng_.chance(cfg_.template_prob))
    return templates[rng_.uniform_index(templates.size())];
  size_t len = static_cast<size_t>(rng_.uniform_range(1, cfg_.max_len));
  return table_walk(ct, len);
}

Program FuzzEngine::mutate(const CorpusEntry& entry, const ChoiceTable& ct) {
  Program p = entry.program;

  enum Op { Insert, Remove, Replace };
  Op op = static_cast<Op>(rng_.uniform_index(3));
  if (op == Remove && p.size() == 1) op = Replace;   // never empty
  if (op == Insert && p.size() >= cfg_.max_len) op = Replace;

  switch (op) {
    case Insert: {
      size_t pos = rng_.uniform_index(p.size() + 1);
      std::optional<size_t> prev;
      if (pos > 0) prev = column_of(ct, p.calls[pos - 1]);
      size_t next = ct.sample_next(prev, rng_);
      p.calls.insert(p.calls.begin() + pos, ct.syscalls()[next]);
      break;
    }
    case Remove: {
      size_t pos = rng_.uniform_index(p.size());
      p.calls.erase(p.calls.begin() + pos);
      break;
    }
    case Replace: {
      size_t pos = rng_.uniform_index(p.size());
      std::optional<size_t> prev;
      if (pos > 0) prev = column_of(ct, p.calls[pos - 1]);
      size_t next = ct.sample_next(prev, rng_);
      p.calls[pos] = ct.syscalls()[next];
      break;
    }
  }
  return p;
}

std::optional<CorpusEntry> FuzzEngine::triage(const TriageTask& task) {
  // Verification run: the claimed pcs must still reproduce and still be
  // new; anything another entry covered meanwhile no longer counts.
  PcSet cov = kernel_.execute(task.candidate);
  PcSet still = task.claimed.difference(global_coverage_).intersection(cov);
  if (still.empty()) return std::nullopt;

  // Greedy left-to-right removal, repeated to fixpoint: 1-minimal with
  // respect to the surviving new pcs.
  Program prog = task.candidate;
  PcSet prog_cov = cov;
  bool changed = true;
  while (changed) {
    changed = false;
    size_t pos = 0;
    while (pos < prog.size() && prog.size() > 1) {
      Program trial = prog;
      trial.calls.erase(trial.calls.begin() + pos);
      PcSet trial_cov = kernel_.execute(trial);
      if (still.subset_of(trial_cov)) {
        prog = std::move(trial);
        prog_cov = std::move(trial_cov);
        changed = true;
        // Same position again: the next call shifted into it.
      } else {
        ++pos;
      }
    }
  }

  return CorpusEntry{std::move(prog), std::move(prog_cov), std::move(still)};
}

ExecutionRecord FuzzEngine::step(const ChoiceTable& ct,
                                 const std::vector<Program>& templates) {
  std::optional<Task> task = queue_.pop();
  if (!task) {
    Task t;
    if (!corpus_.empty() && rng_.chance(cfg_.mutation_prob)) {
      t.kind = TaskKind::Mutation;
      t.source_entry = rng_.uniform_index(corpus_.size());
    } else {
      t.kind = TaskKind::Generation;
    }
    task = std::move(t);
  }

  ExecutionRecord rec;
  rec.task_kind = task->kind;
  rec.table_generation = ct.generation();

  if (task->kind == TaskKind::Triage) {
    auto entry = triage(*task->triage);
    if (entry) {
      rec.program = entry->program;
      rec.coverage = entry->coverage;
      rec.was_new = true;
      global_coverage_.merge(entry->coverage);
      corpus_.push_back(std::move(*entry));
    } else {
      rec.program = task->triage->candidate;
      rec.coverage = kernel_.execute(rec.program);
      rec.was_new = false;
    }
    ++executed_count_;
    return rec;
  }

  if (task->kind == TaskKind::Mutation) {
    size_t idx = task->source_entry.value_or(0);
    if (corpus_.empty()) throw ConfigError("mutation task without corpus");
    idx = std::min(idx, corpus_.size() - 1);
    rec.program = mutate(corpus_[idx], ct);
  } else {
    rec.program = generate(ct, templates);
  }

  rec.coverage = kernel_.execute(rec.program);
  PcSet fresh = rec.coverage.difference(global_coverage_);
  rec.was_new = !fresh.empty();
  if (rec.was_new) {
    Task t;
    t.kind = TaskKind::Triage;
    t.triage = TriageTask{rec.program, std::move(fresh)};
    queue_.push(std::move(t));
  }
  ++executed_count_;
  return rec;
}

std::string execution_record_to_json(const ExecutionRecord& rec,
                                     bool close_hit, bool sampled) {
  nlohmann::json j;
  j["program"] = rec.program.calls;
  nlohmann::json cov = nlohmann::json::array();
  for (const auto& iv : rec.coverage.intervals())
    cov.push_back({iv.first, iv.second});
  j["coverage"] = std::move(cov);
  j["was_new"] = rec.was_new;
  j["task"] = task_kind_name(rec.task_kind);
  j["table_generation"] = rec.table_generation;
  j["close_hit"] = close_hit;
  j["sampled"] = sampled;
  return j.dump();
}

ExecutionRecord execution_record_from_json(const std::string& line,
                                           bool* close_hit, bool* sampled) {
  nlohmann::json j = nlohmann::json::parse(line);
  ExecutionRecord rec;
  rec.program.calls = j.at("program").get<std::vector<std::string>>();
  std::vector<PcSet::Interval> ivs;
  for (const auto& iv : j.at("coverage"))
    ivs.emplace_back(iv.at(0).get<uint64_t>(), iv.at(1).get<uint64_t>());
  rec.coverage = PcSet::from_intervals(std::move(ivs));
  rec.was_new = j.at("was_new").get<bool>();
  std::string kind = j.at("task").get<std::string>();
  if (kind == "generation")
    rec.task_kind = TaskKind::Generation;
  else if (kind == "mutation")
    rec.task_kind = TaskKind::Mutation;
  else if (kind == "triage")
    rec.task_kind = TaskKind::Triage;
  else
    throw Error("bad task kind in record: " + kind);
  rec.table_generation = j.at("table_generation").get<uint64_t>();
  if (close_hit) *close_hit = j.value("close_hit", false);
  if (sampled) *sampled = j.value("sampled", false);
  return rec;
}

}  // namespace dirfuzz
