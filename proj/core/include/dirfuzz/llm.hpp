#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dirfuzz/analysis.hpp"
#include "dirfuzz/callgraph.hpp"
#include "dirfuzz/choice_table.hpp"
#include "dirfuzz/program.hpp"

namespace dirfuzz {

class SyntheticKernel;

// Source snippets of the functions on the target's call paths, in
// declaration order. This is what gets pasted above the question.
struct CallingCode {
  struct Block {
    FunctionId function;
    std::string source;
  };
  std::vector<Block> blocks;

  std::string render() const;
  bool empty() const { return blocks.empty(); }

  static CallingCode from_text(std::string text);
};

CallingCode collect_calling_code(const CallGraph& g, const TargetSpec& spec);

struct PromptOptions {
  size_t token_budget = 12800;
  size_t chars_per_token = 4;  // crude upper-bound estimator
};

struct PromptEnvelope {
  enum class Kind { Initial, Feedback };

  Kind kind = Kind::Initial;
  std::string text;
  size_t token_estimate = 0;
  FunctionId target;
  bool truncated = false;
  std::vector<std::string> warnings;
};

size_t estimate_tokens(const std::string& text, const PromptOptions& opts);

PromptEnvelope build_init_prompt(const CallingCode& code,
                                 const FunctionId& target,
                                 const PromptOptions& opts = {});

// One close-area-hitting test case for the feedback prompt: the program and
// the sources of the close-area functions it covered.
struct FeedbackCase {
  Program program;
  std::vector<CallingCode::Block> covered;
};

PromptEnvelope build_feedback_prompt(const CallingCode& code,
                                     const FunctionId& target,
                                     const std::vector<FeedbackCase>& cases,
                                     const PromptOptions& opts = {});

// Pulls every known syscall name out of a free-form response: bracketed
// lists, comma/newline lists, code fences, prose. Unknown names are dropped
// (and counted when asked). Throws NothingParsedError when nothing known
// was found.
Guidance parse_guidance(const std::string& raw,
                        const std::set<std::string>& known,
                        size_t* unknowns_dropped = nullptr);

// Canonical bracketed rendering; parse_guidance inverts it.
std::string render_syscall_list(const std::vector<std::string>& names);

struct LlmResponse {
  std::string raw;
  Guidance parsed;
};

// A guidance source. ask() must be callable from a feedback worker running
// alongside the fuzz loop; one in-flight request per campaign.
class GuidanceBackend {
public:
  virtual ~GuidanceBackend() = default;
  virtual std::string name() const = 0;
  virtual LlmResponse ask(const PromptEnvelope& envelope) = 0;
};

// Answers from the synthetic kernel's ground truth: the entry syscalls of
// the target's call paths, plus gate prerequisites on feedback rounds.
class OracleBackend : public GuidanceBackend {
public:
  explicit OracleBackend(const SyntheticKernel& kernel);
  std::string name() const override { return "oracle"; }
  LlmResponse ask(const PromptEnvelope& envelope) override;

private:
  const SyntheticKernel& kernel_;
};

// Replays scripted responses from a JSONL transcript
// ({"prompt_digest": ..., "response_text": ...} per line).
class ReplayBackend : public GuidanceBackend {
public:
  ReplayBackend(std::istream& transcript, std::set<std::string> known);
  static std::unique_ptr<ReplayBackend> from_file(const std::string& path,
                                                  std::set<std::string> known);
  std::string name() const override { return "replay"; }
  LlmResponse ask(const PromptEnvelope& envelope) override;

private:
  std::vector<std::string> responses_;
  std::set<std::string> known_;
  size_t next_ = 0;
};

// Generic chat-completion client. Credential comes from the environment
// variable DIRFUZZ_LLM_KEY; request body is
// {model, messages: [{role: "user", content: <text>}]} and the reply text
// is read from the first choice's message content.
class HttpBackend : public GuidanceBackend {
public:
  HttpBackend(std::string url, std::string model, std::set<std::string> known,
              size_t token_budget = 12800);
  std::string name() const override { return "http"; }
  LlmResponse ask(const PromptEnvelope& envelope) override;

private:
  std::string url_;
  std::string model_;
  std::set<std::string> known_;
  size_t token_budget_;
};

uint64_t prompt_digest(const std::string& text);

}  // namespace dirfuzz
