#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dirfuzz/errors.hpp"
#include "dirfuzz/rng.hpp"

namespace dirfuzz {

// A set of syscalls the guidance backend wants generated more often.
struct Guidance {
  enum class Origin { Initial, Feedback };

  std::vector<std::string> s_inc;  // sorted, unique, all known upstream
  uint64_t round = 0;
  Origin origin = Origin::Initial;
};

// Row-stochastic next-syscall table. Raw weights and normalized
// probabilities are both kept: the boost rule operates on weights, sampling
// on probabilities. Tables are immutable values; an update produces a fresh
// table the owner swaps in.
class ChoiceTable {
public:
  // All weights 1. Throws EmptySyscallSetError on an empty or duplicated set.
  static ChoiceTable uniform(std::vector<std::string> syscalls,
                             double random_insert_prob = 0.05);
  // Validates non-negativity and positive row sums.
  static ChoiceTable with_weights(std::vector<std::string> syscalls,
                                  std::vector<std::vector<double>> weights,
                                  double random_insert_prob = 0.05);

  const std::vector<std::string>& syscalls() const { return syscalls_; }
  size_t size() const { return syscalls_.size(); }
  std::optional<size_t> index_of(const std::string& name) const;

  double weight(size_t row, size_t col) const {
    return weights_[row * syscalls_.size() + col];
  }
  double prob(size_t row, size_t col) const {
    return probs_[row * syscalls_.size() + col];
  }

  uint64_t generation() const { return generation_; }
  double random_insert_prob() const { return random_insert_prob_; }

  // Adds 1 to weight[c1][c2] iff c1 or c2 is in s_inc, renormalizes, bumps
  // the generation. Throws UnknownSyscallError for names outside the table.
  ChoiceTable boosted(const Guidance& g) const;

  // With probability random_insert_prob, or when prev is absent, a uniform
  // draw; otherwise inverse-CDF over the prev row.
  size_t sample_next(std::optional<size_t> prev, Rng& rng) const;
  const std::string& sample_next_name(const std::optional<std::string>& prev,
                                      Rng& rng) const;

  std::string to_json_string(int indent = -1) const;
  static ChoiceTable from_json_string(const std::string& text);

private:
  ChoiceTable() = default;
  void normalize();

  std::vector<std::string> syscalls_;
  std::vector<double> weights_;  // row-major |S| x |S|
  std::vector<double> probs_;
  uint64_t generation_ = 0;
  double random_insert_prob_ = 0.05;
};

}  // namespace dirfuzz
