#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "numreason/retrieval.hpp"

namespace numreason {

enum class SamplingStrategy { Random, Bm25, SelfMining, NumberAware };

std::string_view strategy_name(SamplingStrategy s);  // "random", "bm25", "self_mining", "number_aware"
// Accepts both "self-mining" and "self_mining" spellings.
std::optional<SamplingStrategy> strategy_from_name(std::string_view name);

struct SamplingConfig {
  SamplingStrategy strategy = SamplingStrategy::NumberAware;
  std::size_t ratio_n = 3;  // negatives per positive
  std::uint64_t seed = 0;
  double k1 = 1.2;
  double b = 0.75;
  std::optional<std::string> scores_path;  // self-mining only

  void validate() const;
  nlohmann::json to_json() const;
};

enum class PairLabel { Positive, Negative };

struct TrainingPair {
  std::string question;
  Fact fact;
  PairLabel label = PairLabel::Negative;
  SamplingStrategy strategy = SamplingStrategy::NumberAware;

  nlohmann::json to_json() const;
};

// Retriever scores for self-mining: question id -> fact id -> score.
using ScoreTable = std::map<std::string, std::map<std::string, double>>;

// JSONL lines {"qid": ..., "scores": {"text_0": 1.5, ...}}.
ScoreTable load_score_table(std::istream& in);

class NoNegativesAvailable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MissingScores : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SampleResult {
  std::vector<TrainingPair> pairs;  // each positive followed by its negatives
  std::vector<std::string> warnings;
};

/// Builds the retriever training pairs for one question.
///
/// Every gold fact yields one positive pair followed by min(ratio_n, pool)
/// negatives. The pool is the non-gold facts with duplicate texts removed
/// (and texts equal to a gold fact's text removed). Number-aware sampling
/// restricts the pool to numerical facts unless fewer than
/// ratio_n x positives exist, in which case it warns and uses every negative.
/// Random strategies draw with `cfg.seed`; BM25 and self-mining take the top
/// of their ranking. Within a question no negative repeats until the pool is
/// exhausted.
///
/// `scores` maps fact id -> retriever score and is required for self-mining.
SampleResult sample_negatives(std::string_view question, const std::vector<Fact>& facts,
                              const SamplingConfig& cfg,
                              const std::map<std::string, double>* scores = nullptr);

}  // namespace numreason
