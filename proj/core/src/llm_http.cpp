#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dirfuzz/llm.hpp"

namespace dirfuzz {

namespace {

struct ParsedUrl {
  std::string host_port;  // scheme://host:port
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("backend url needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpBackend::HttpBackend(std::string url, std::string model,
                         std::set<std::string> known, size_t token_budget)
    : url_(std::move(url)),
      model_(std::move(model)),
      known_(std::move(known)),
      token_budget_(token_budget) {}

LlmResponse HttpBackend::ask(const PromptEnvelope& envelope) {
  if (envelope.token_estimate > token_budget_)
    throw BudgetExceededError("prompt estimate " +
                              std::to_string(envelope.token_estimate) +
                              " exceeds budget " +
                              std::to_string(token_budget_));

  auto parts = split_url(url_);
  httplib::Client client(parts.host_port);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);

  httplib::Headers headers;
  if (const char* key = std::getenv("DIRFUZZ_LLM_KEY"))
    headers.emplace("Authorization", std::string("Bearer ") + key);

  nlohmann::json body;
  body["model"] = model_;
  body["messages"] = {{{"role", "user"}, {"content", envelope.text}}};

  auto res = client.Post(parts.path, headers, body.dump(), "application/json");
  if (!res)
    throw TransportError("request to " + url_ + " failed: " +
                         httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("backend returned HTTP " +
                         std::to_string(res->status));

  std::string text;
  try {
    nlohmann::json j = nlohmann::json::parse(res->body);
    text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed completion response: ") +
                         e.what());
  }

  LlmResponse resp;
  resp.raw = text;
  resp.parsed = parse_guidance(text, known_);
  resp.parsed.origin = envelope.kind == PromptEnvelope::Kind::Initial
                           ? Guidance::Origin::Initial
                           : Guidance::Origin::Feedback;
  return resp;
}

}  // namespace dirfuzz
