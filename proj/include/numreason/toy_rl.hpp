#pragma once

// Desk-scale consistency-based policy gradient.
//
// The policy is a position-wise tabular softmax: position t draws its token
// from softmax(logits[t]) independently of earlier tokens. This keeps every
// expectation enumerable, so the sampled REINFORCE gradient can be checked
// against exact values. The gradient has the same form a neural decoder
// would use: -R * sum_t grad log p(w_t).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "numreason/consistency.hpp"
#include "numreason/executor.hpp"
#include "numreason/program.hpp"
#include "numreason/rng.hpp"

namespace numreason {

class Vocab {
 public:
  // Throws std::invalid_argument unless `tokens` contains "EOF" exactly once
  // and has no duplicates.
  explicit Vocab(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  std::size_t eof() const { return eof_; }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<std::size_t> index_of(std::string_view token) const;

 private:
  std::vector<std::string> tokens_;
  std::size_t eof_ = 0;
};

// Joins tokens with single spaces and rewrites the result into program
// syntax: no space after '(' or before ')', bare neighbouring arguments get
// ", ", and consecutive terms are separated by ", ". "add( 1 2 )" becomes
// "add(1, 2)" and "Add(1, 2)" stays as is.
std::string normalize_program_text(const std::vector<std::string>& tokens);

class Policy {
 public:
  Policy(std::size_t max_length, std::size_t vocab_size, double init_logit = 0.0);

  std::size_t max_length() const { return max_length_; }
  std::size_t vocab_size() const { return vocab_size_; }

  double logit(std::size_t position, std::size_t token) const {
    return logits_[position * vocab_size_ + token];
  }
  double& logit(std::size_t position, std::size_t token) {
    return logits_[position * vocab_size_ + token];
  }
  const std::vector<double>& logits() const { return logits_; }
  std::vector<double>& logits() { return logits_; }

  // Softmax of one position's logits (max-shifted).
  std::vector<double> probabilities(std::size_t position) const;

  nlohmann::json to_json(const Vocab& vocab) const;

 private:
  std::size_t max_length_;
  std::size_t vocab_size_;
  std::vector<double> logits_;
};

struct ToyTask {
  Program gold;
  std::optional<Table> table;
  ConstTable consts;
  Vocab vocab;
  ToleranceConfig tolerance;

  const Table* table_ptr() const { return table ? &*table : nullptr; }
  ExecValue gold_value() const;
};

// Gold "Add(1, 2)" over FinQA-generator style tokens
// {add(, subtract(, multiply(, 1, 2, 3, ), EOF}; meant for L = 4.
ToyTask default_toy_task();

// Gold "Add(1, 2)" over compound tokens {Add(1,, Subtract(1,, 2), EOF};
// meant for L = 2 so that two-token sequences are complete programs.
ToyTask gradient_check_task();

// {"gold": "...", "vocab": [...], "max_length": L, "table"?: ..., "consts"?: {...}}
// Returns the task; `max_length` receives L.
ToyTask toy_task_from_json(const nlohmann::json& j, std::size_t& max_length);

struct Episode {
  std::vector<std::size_t> tokens;  // includes EOF when it was drawn
  std::vector<double> log_probs;
  std::string text;
  int reward = -2;
};

// Decodes the token prefix up to (excluding) EOF and scores it with the
// consistency reward against the task's gold answer.
int sequence_reward(const ToyTask& task, const ExecValue& gold_value,
                    const std::vector<std::size_t>& tokens);

Episode sample_episode(const Policy& policy, const ToyTask& task, Rng& rng);

// Gradient of the RL loss -E[R] estimated from one episode:
// -R * sum_t (onehot(w_t) - p_t) at each sampled position t.
std::vector<double> reinforce_gradient(const Policy& policy, const Episode& episode);

// logits <- logits - lr * reinforce_gradient.
Policy reinforce_step(const Policy& policy, const Episode& episode, double lr);

class EnumerationTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::uint64_t kMaxEnumeration = 1'000'000;

// Sum over every sequence of p(sequence) * R(sequence). Requires
// vocab^L <= kMaxEnumeration.
double exact_expected_reward(const Policy& policy, const ToyTask& task);

// Exact gradient of E[R] with respect to the logits, by enumeration.
std::vector<double> exact_reward_gradient(const Policy& policy, const ToyTask& task);

struct TrainConfig {
  std::size_t steps = 2000;
  double lr = 0.05;
  std::uint64_t seed = 0;
  std::size_t eval_every = 100;  // 0 disables exact evaluation
  std::size_t average_window = 100;

  nlohmann::json to_json() const;
};

struct CurvePoint {
  std::size_t step = 0;  // 1-based: after `step` updates
  double avg_reward = 0.0;
  std::optional<double> exact_expected_reward;
};

struct TrainResult {
  Policy policy;
  std::vector<CurvePoint> curve;
  std::vector<std::string> warnings;
};

// Uniform initial policy of length `max_length`.
TrainResult train_toy(const ToyTask& task, std::size_t max_length, const TrainConfig& cfg);

TrainResult train_toy(const ToyTask& task, Policy initial, const TrainConfig& cfg);

}  // namespace numreason
