#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirfuzz/choice_table.hpp"
#include "dirfuzz/pcmap.hpp"
#include "dirfuzz/program.hpp"
#include "dirfuzz/rng.hpp"
#include "dirfuzz/synth_kernel.hpp"

namespace dirfuzz {

// A previously executed program that contributed new coverage.
struct CorpusEntry {
  Program program;
  PcSet coverage;
  PcSet new_pcs;  // what it first contributed; subset of coverage
};

enum class TaskKind { Generation, Mutation, Triage };

const char* task_kind_name(TaskKind k);

struct TriageTask {
  Program candidate;
  PcSet claimed;  // new pcs observed when the candidate first ran
};

struct Task {
  TaskKind kind = TaskKind::Generation;
  std::optional<size_t> source_entry;       // Mutation
  std::optional<TriageTask> triage;         // Triage
};

// Triage outranks everything; FIFO within a priority class.
class WorkQueue {
public:
  void push(Task t);
  std::optional<Task> pop();
  bool has_triage() const { return !triage_.empty(); }
  bool empty() const { return triage_.empty() && other_.empty(); }
  size_t size() const { return triage_.size() + other_.size(); }

private:
  std::deque<Task> triage_;
  std::deque<Task> other_;
};

struct FuzzConfig {
  size_t max_len = 16;
  double template_prob = 0.5;   // generation: clone a template this often
  double mutation_prob = 0.8;   // scheduling: mutate vs generate
  double random_insert_prob = 0.05;

  void validate() const;
};

struct ExecutionRecord {
  Program program;
  PcSet coverage;
  bool was_new = false;  // coverage outside global_coverage at execution
  TaskKind task_kind = TaskKind::Generation;
  uint64_t table_generation = 0;
};

std::string execution_record_to_json(const ExecutionRecord& rec,
                                     bool close_hit, bool sampled);
ExecutionRecord execution_record_from_json(const std::string& line,
                                           bool* close_hit = nullptr,
                                           bool* sampled = nullptr);

// Owns the fuzzing state: corpus, accumulated coverage, work queue, rng.
// One loop drives it; the choice table is read fresh at every step so the
// owner may swap tables between steps.
class FuzzEngine {
public:
  FuzzEngine(const SyntheticKernel& kernel, FuzzConfig cfg, uint64_t seed);

  // Template clone with probability template_prob, otherwise a chained walk
  // over the choice table. Result length in [1, max_len].
  Program generate(const ChoiceTable& ct, const std::vector<Program>& templates);

  // One operator per call: insert, remove, or replace at a uniform position.
  // Never empties the program, never exceeds max_len.
  Program mutate(const CorpusEntry& entry, const ChoiceTable& ct);

  // Verify + minimize a candidate; admits it to the corpus when its claimed
  // pcs still hold up, otherwise drops it (returns nullopt).
  std::optional<CorpusEntry> triage(const TriageTask& task);

  // Pop (or synthesize) one task, run it, bookkeep coverage and the queue.
  ExecutionRecord step(const ChoiceTable& ct,
                       const std::vector<Program>& templates);

  const std::vector<CorpusEntry>& corpus() const { return corpus_; }
  const PcSet& global_coverage() const { return global_coverage_; }
  uint64_t executed_count() const { return executed_count_; }
  WorkQueue& queue() { return queue_; }
  Rng& rng() { return rng_; }
  const SyntheticKernel& kernel() const { return kernel_; }

  // Throws UnknownSyscallError when a template uses an undeclared syscall.
  void validate_templates(const std::vector<Program>& templates) const;

private:
  Program table_walk(const ChoiceTable& ct, size_t len);
  size_t column_of(const ChoiceTable& ct, const FunctionId& name);

  const SyntheticKernel& kernel_;
  FuzzConfig cfg_;
  Rng rng_;
  std::vector<CorpusEntry> corpus_;
  PcSet global_coverage_;
  WorkQueue queue_;
  uint64_t executed_count_ = 0;
  // Column lookup cache, rebuilt when a table with a different syscall
  // ordering shows up.
  std::vector<std::string> cached_syscalls_;
  std::map<std::string, size_t> name_to_col_;
};

}  // namespace dirfuzz
