#include "dirfuzz/choice_table.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

namespace dirfuzz {

namespace {

void check_syscall_set(const std::vector<std::string>& syscalls) {
  if (syscalls.empty()) throw EmptySyscallSetError();
  std::set<std::string> uniq(syscalls.begin(), syscalls.end());
  if (uniq.size() != syscalls.size())
    throw ValidationError("duplicate syscall in choice table");
}

}  // namespace

ChoiceTable ChoiceTable::uniform(std::vector<std::string> syscalls,
                                 double random_insert_prob) {
  check_syscall_set(syscalls);
  ChoiceTable t;
  t.syscalls_ = std::move(syscalls);
  t.weights_.assign(t.syscalls_.size() * t.syscalls_.size(), 1.0);
  t.random_insert_prob_ = random_insert_prob;
  t.normalize();
  return t;
}

ChoiceTable ChoiceTable::with_weights(std::vector<std::string> syscalls,
                                      std::vector<std::vector<double>> weights,
                                      double random_insert_prob) {
  check_syscall_set(syscalls);
  size_t n = syscalls.size();
  if (weights.size() != n)
    throw ConfigError("weight matrix has wrong row count");

  ChoiceTable t;
  t.syscalls_ = std::move(syscalls);
  t.weights_.reserve(n * n);
  for (size_t r = 0; r < n; ++r) {
    if (weights[r].size() != n)
      throw ConfigError("weight matrix row " + std::to_string(r) +
                        " has wrong length");
    double sum = 0;
    for (double w : weights[r]) {
      if (w < 0)
        throw NegativeWeightError("negative weight in row '" +
                                  t.syscalls_[r] + "'");
      sum += w;
      t.weights_.push_back(w);
    }
    if (sum <= 0)
      throw ZeroRowError("row '" + t.syscalls_[r] + "' has zero weight sum");
  }
  t.random_insert_prob_ = random_insert_prob;
  t.normalize();
  return t;
}

void ChoiceTable::normalize() {
  size_t n = syscalls_.size();
  probs_.assign(n * n, 0.0);
  for (size_t r = 0; r < n; ++r) {
    double sum = 0;
    for (size_t c = 0; c < n; ++c) sum += weights_[r * n + c];
    for (size_t c = 0; c < n; ++c) probs_[r * n + c] = weights_[r * n + c] / sum;
  }
}

std::optional<size_t> ChoiceTable::index_of(const std::string& name) const {
  auto it = std::find(syscalls_.begin(), syscalls_.end(), name);
  if (it == syscalls_.end()) return std::nullopt;
  return static_cast<size_t>(it - syscalls_.begin());
}

ChoiceTable ChoiceTable::boosted(const Guidance& g) const {
  size_t n = syscalls_.size();
  std::vector<bool> in_set(n, false);
  for (const auto& name : g.s_inc) {
    auto idx = index_of(name);
    if (!idx) throw UnknownSyscallError(name);
    in_set[*idx] = true;
  }

  ChoiceTable t = *this;
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c)
      if (in_set[r] || in_set[c]) t.weights_[r * n + c] += 1.0;
  t.normalize();
  t.generation_ = generation_ + 1;
  return t;
}

size_t ChoiceTable::sample_next(std::optional<size_t> prev, Rng& rng) const {
  size_t n = syscalls_.size();
  if (!prev) return rng.uniform_index(n);
  if (rng.chance(random_insert_prob_)) return rng.uniform_index(n);

  double u = rng.uniform_real();
  double cum = 0;
  size_t row = *prev;
  for (size_t c = 0; c < n; ++c) {
    cum += probs_[row * n + c];
    if (u < cum) return c;
  }
  return n - 1;  // floating slack
}

const std::string& ChoiceTable::sample_next_name(
    const std::optional<std::string>& prev, Rng& rng) const {
  std::optional<size_t> idx;
  if (prev) {
    idx = index_of(*prev);
    if (!idx) throw UnknownSyscallError(*prev);
  }
  return syscalls_[sample_next(idx, rng)];
}

std::string ChoiceTable::to_json_string(int indent) const {
  nlohmann::json j;
  j["syscalls"] = syscalls_;
  size_t n = syscalls_.size();
  nlohmann::json rows = nlohmann::json::array();
  for (size_t r = 0; r < n; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (size_t c = 0; c < n; ++c) row.push_back(weights_[r * n + c]);
    rows.push_back(std::move(row));
  }
  j["weights"] = std::move(rows);
  j["generation"] = generation_;
  j["random_insert_prob"] = random_insert_prob_;
  return j.dump(indent);
}

ChoiceTable ChoiceTable::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  auto t = with_weights(j.at("syscalls").get<std::vector<std::string>>(),
                        j.at("weights").get<std::vector<std::vector<double>>>(),
                        j.value("random_insert_prob", 0.05));
  t.generation_ = j.value("generation", 0);
  return t;
}

}  // namespace dirfuzz
