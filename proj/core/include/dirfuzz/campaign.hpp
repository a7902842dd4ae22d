#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dirfuzz/analysis.hpp"
#include "dirfuzz/fuzz_engine.hpp"
#include "dirfuzz/llm.hpp"
#include "dirfuzz/synth_kernel.hpp"

namespace dirfuzz {

enum class CampaignMode { Agent, Baseline };

struct CampaignConfig {
  CampaignMode mode = CampaignMode::Agent;
  uint64_t budget = 5000;           // executions
  uint64_t feedback_interval = 500; // executions between feedback rounds
  size_t feedback_case_count = 3;   // cases sampled per feedback prompt
  AnalysisConfig analysis;
  uint64_t seed = 1;
  PromptOptions prompt;
  FuzzConfig fuzz;
  double sampling_rate = 1.0;  // fraction of executions counted for hit rate
  bool parallel_feedback = false;
  std::vector<Program> templates;

  void validate() const;
};

struct SeriesPoint {
  uint64_t executed = 0;
  uint64_t cumulative_coverage = 0;  // pc points in global coverage
  double cumulative_hit_rate = 0.0;
};

struct GuidanceRoundInfo {
  uint64_t round = 0;  // 0 = initial prompt
  Guidance::Origin origin = Guidance::Origin::Initial;
  size_t s_inc_size = 0;
  bool applied = false;
  std::string note;  // skip / failure reason
};

struct CampaignMetrics {
  uint64_t executed = 0;
  uint64_t close_hits = 0;
  double hit_rate = 0.0;  // over sampled executions
  uint64_t sampled = 0;
  uint64_t sampled_hits = 0;
  std::vector<SeriesPoint> series;  // one point per execution
  std::vector<GuidanceRoundInfo> guidance_rounds;
  uint64_t backend_calls = 0;

  uint64_t feedback_attempts() const;
};

struct CampaignHooks {
  // Called for every execution, in order.
  std::function<void(const ExecutionRecord&, bool close_hit, bool sampled)>
      on_record;
  // Called for every feedback attempt with the cases that were sampled.
  std::function<void(const GuidanceRoundInfo&,
                     const std::vector<FeedbackCase>&)>
      on_feedback;
};

// Runs one fuzzing campaign against one target. Agent mode prompts the
// backend up front and every feedback_interval executions, swapping in the
// boosted table atomically; Baseline runs the identical loop with the
// uniform table and never touches the backend. Deterministic given the
// seed and a deterministic backend (unless parallel_feedback is set).
CampaignMetrics run_campaign(const SyntheticKernel& kernel,
                             const TargetSpec& target,
                             const CampaignConfig& cfg,
                             GuidanceBackend* backend,
                             const CampaignHooks& hooks = {});

// Recomputes the metrics a campaign reported from its persisted record
// stream; exact, not approximate.
CampaignMetrics recompute_metrics(const std::vector<ExecutionRecord>& records,
                                  const std::vector<bool>& close_hits,
                                  const std::vector<bool>& sampled);

std::string campaign_metrics_to_json(const CampaignMetrics& m, int indent = 2);

// Series CSV: executed,cumulative_coverage,cumulative_hit_rate.
std::string series_to_csv(const CampaignMetrics& m);

}  // namespace dirfuzz
