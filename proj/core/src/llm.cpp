#include "dirfuzz/llm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dirfuzz/synth_kernel.hpp"

namespace dirfuzz {

namespace {

constexpr const char* kTruncationMarker = "/* earlier calling code omitted */";

std::string init_question(const FunctionId& target) {
  return "Above is the source code that may call function " + target +
         ", which system calls may trigger the call path of function " +
         target + "?";
}

std::string feedback_header(const FunctionId& target) {
  return "Above is the source code that may call the target function " +
         target +
         ", in testing procedure we found the following system call programs "
         "reach functions that is close to the target function:";
}

std::string feedback_question(const FunctionId& target) {
  return "Generate a list of system calls that if the probability of "
         "generating such system calls in test cases is increased, the "
         "fuzzing process is more possible to reach our target function: " +
         target + "?";
}

std::string render_blocks(const std::vector<CallingCode::Block>& blocks,
                          size_t skip) {
  std::string out;
  if (skip > 0) out = kTruncationMarker;
  for (size_t i = skip; i < blocks.size(); ++i) {
    if (!out.empty()) out += "\n\n";
    out += blocks[i].source;
  }
  return out;
}

}  // namespace

std::string CallingCode::render() const {
  return render_blocks(blocks, 0);
}

CallingCode CallingCode::from_text(std::string text) {
  CallingCode cc;
  if (!text.empty()) cc.blocks.push_back({"", std::move(text)});
  return cc;
}

CallingCode collect_calling_code(const CallGraph& g, const TargetSpec& spec) {
  auto names = spec.path_functions();
  // Declaration order, the same order the snippets appeared in the input.
  std::sort(names.begin(), names.end(),
            [&](const FunctionId& a, const FunctionId& b) {
              return g.info(a).decl_index < g.info(b).decl_index;
            });
  CallingCode cc;
  for (const auto& name : names) {
    const auto& inf = g.info(name);
    if (inf.source) cc.blocks.push_back({name, *inf.source});
  }
  return cc;
}

size_t estimate_tokens(const std::string& text, const PromptOptions& opts) {
  size_t cpt = std::max<size_t>(1, opts.chars_per_token);
  return (text.size() + cpt - 1) / cpt;
}

PromptEnvelope build_init_prompt(const CallingCode& code,
                                 const FunctionId& target,
                                 const PromptOptions& opts) {
  PromptEnvelope env;
  env.kind = PromptEnvelope::Kind::Initial;
  env.target = target;
  if (code.empty()) env.warnings.push_back("calling code is empty");

  const std::string question = init_question(target);
  size_t skip = 0;
  for (;;) {
    std::string body = render_blocks(code.blocks, skip);
    env.text = body.empty() ? question : body + "\n" + question;
    env.token_estimate = estimate_tokens(env.text, opts);
    if (env.token_estimate <= opts.token_budget || skip >= code.blocks.size())
      break;
    ++skip;  // oldest snippet goes first
    env.truncated = true;
  }
  return env;
}

PromptEnvelope build_feedback_prompt(const CallingCode& code,
                                     const FunctionId& target,
                                     const std::vector<FeedbackCase>& cases,
                                     const PromptOptions& opts) {
  PromptEnvelope env;
  env.kind = PromptEnvelope::Kind::Feedback;
  env.target = target;
  if (code.empty()) env.warnings.push_back("calling code is empty");
  if (cases.empty()) env.warnings.push_back("no close-area cases to report");

  auto render_cases = [&](size_t count) {
    std::string out;
    for (size_t i = 0; i < count; ++i) {
      const auto& c = cases[i];
      out += "Case " + std::to_string(i + 1) + ":\n";
      out += "program:";
      for (size_t k = 0; k < c.program.calls.size(); ++k)
        out += (k == 0 ? " " : ", ") + c.program.calls[k];
      out += "\ncovered code:\n";
      for (const auto& blk : c.covered) out += blk.source + "\n";
      out += "\n";
    }
    return out;
  };

  const std::string header = feedback_header(target);
  const std::string question = feedback_question(target);
  size_t keep_cases = cases.size();
  size_t skip = 0;
  for (;;) {
    std::string body = render_blocks(code.blocks, skip);
    env.text = body.empty() ? header : body + "\n" + header;
    env.text += "\n" + render_cases(keep_cases) + question;
    env.token_estimate = estimate_tokens(env.text, opts);
    if (env.token_estimate <= opts.token_budget) break;
    if (keep_cases > 0) {
      --keep_cases;  // whole cases drop from the end first
      env.truncated = true;
    } else if (skip < code.blocks.size()) {
      ++skip;
      env.truncated = true;
    } else {
      break;
    }
  }
  return env;
}

Guidance parse_guidance(const std::string& raw,
                        const std::set<std::string>& known,
                        size_t* unknowns_dropped) {
  std::set<std::string> found;
  std::set<std::string> unknown;

  size_t i = 0;
  while (i < raw.size()) {
    char c = raw[i];
    bool head = std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    if (!head) {
      ++i;
      continue;
    }
    size_t j = i + 1;
    while (j < raw.size()) {
      char d = raw[j];
      if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' ||
          d == '$')
        ++j;
      else
        break;
    }
    std::string tok = raw.substr(i, j - i);
    if (known.count(tok))
      found.insert(tok);
    else
      unknown.insert(tok);
    i = j;
  }

  if (unknowns_dropped) *unknowns_dropped = unknown.size();
  if (found.empty()) throw NothingParsedError();

  Guidance g;
  g.s_inc.assign(found.begin(), found.end());
  return g;
}

std::string render_syscall_list(const std::vector<std::string>& names) {
  std::string out = "[";
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  out += "]";
  return out;
}

uint64_t prompt_digest(const std::string& text) {
  // FNV-1a, enough to spot transcript/prompt mismatches during audit.
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

OracleBackend::OracleBackend(const SyntheticKernel& kernel) : kernel_(kernel) {}

LlmResponse OracleBackend::ask(const PromptEnvelope& envelope) {
  AnalysisConfig cfg;
  auto paths = syscall_paths(kernel_.graph(), envelope.target, cfg);

  std::set<std::string> names;
  for (const auto& p : paths.paths)
    if (!p.empty()) names.insert(p.front());

  if (envelope.kind == PromptEnvelope::Kind::Feedback) {
    // Prerequisites of gates sitting on any of those paths.
    std::set<std::pair<FunctionId, FunctionId>> path_edges;
    for (const auto& p : paths.paths)
      for (size_t i = 0; i + 1 < p.size(); ++i)
        path_edges.insert({p[i], p[i + 1]});
    for (const auto& gate : kernel_.gates())
      if (path_edges.count({gate.caller, gate.callee}))
        names.insert(gate.prerequisite);
  }

  LlmResponse resp;
  resp.raw = render_syscall_list({names.begin(), names.end()});
  std::set<std::string> known(kernel_.graph().syscall_names().begin(),
                              kernel_.graph().syscall_names().end());
  resp.parsed = parse_guidance(resp.raw, known);
  resp.parsed.origin = envelope.kind == PromptEnvelope::Kind::Initial
                           ? Guidance::Origin::Initial
                           : Guidance::Origin::Feedback;
  return resp;
}

ReplayBackend::ReplayBackend(std::istream& transcript,
                             std::set<std::string> known)
    : known_(std::move(known)) {
  std::string line;
  int lineno = 0;
  while (std::getline(transcript, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      responses_.push_back(j.at("response_text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("bad transcript line: ") + e.what());
    }
  }
}

std::unique_ptr<ReplayBackend> ReplayBackend::from_file(
    const std::string& path, std::set<std::string> known) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transcript: " + path);
  return std::make_unique<ReplayBackend>(in, std::move(known));
}

LlmResponse ReplayBackend::ask(const PromptEnvelope& envelope) {
  if (next_ >= responses_.size()) throw TranscriptExhaustedError();
  LlmResponse resp;
  resp.raw = responses_[next_++];
  resp.parsed = parse_guidance(resp.raw, known_);
  resp.parsed.origin = envelope.kind == PromptEnvelope::Kind::Initial
                           ? Guidance::Origin::Initial
                           : Guidance::Origin::Feedback;
  return resp;
}

}  // namespace dirfuzz
