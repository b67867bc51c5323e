#include "numreason/sampling.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "numreason/rng.hpp"

namespace numreason {

std::string_view strategy_name(SamplingStrategy s) {
  switch (s) {
    case SamplingStrategy::Random: return "random";
    case SamplingStrategy::Bm25: return "bm25";
    case SamplingStrategy::SelfMining: return "self_mining";
    case SamplingStrategy::NumberAware: return "number_aware";
  }
  return "?";
}

std::optional<SamplingStrategy> strategy_from_name(std::string_view name) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  for (auto s : {SamplingStrategy::Random, SamplingStrategy::Bm25, SamplingStrategy::SelfMining,
                 SamplingStrategy::NumberAware}) {
    if (strategy_name(s) == key) return s;
  }
  return std::nullopt;
}

void SamplingConfig::validate() const {
  if (ratio_n < 1) throw std::invalid_argument("ratio_n must be at least 1");
  if (strategy == SamplingStrategy::SelfMining && !scores_path) {
    throw MissingScores("self-mining needs a retriever score file");
  }
}

nlohmann::json SamplingConfig::to_json() const {
  nlohmann::json j = {{"strategy", strategy_name(strategy)},
                      {"ratio_n", ratio_n},
                      {"seed", seed},
                      {"k1", k1},
                      {"b", b}};
  j["scores"] = scores_path ? nlohmann::json(*scores_path) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json TrainingPair::to_json() const {
  return {{"question", question},
          {"fact", fact.text},
          {"label", label == PairLabel::Positive ? "positive" : "negative"},
          {"strategy", strategy_name(strategy)},
          {"fact_id", fact.id}};
}

ScoreTable load_score_table(std::istream& in) {
  ScoreTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      auto& entry = table[j.at("qid").get<std::string>()];
      for (const auto& [fact_id, score] : j.at("scores").items()) entry[fact_id] = score.get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("score file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

namespace {

// Yields pool indices without repetition until the pool is used up, then
// starts over. Never yields an index already handed to the current positive.
class NegativeStream {
 public:
  NegativeStream(std::vector<std::size_t> ranked, bool shuffled, std::uint64_t seed)
      : ranked_(std::move(ranked)), shuffled_(shuffled), rng_(seed) {}

  void next_positive() { chosen_.clear(); }

  std::size_t draw() {
    if (remaining_.empty()) {
      for (std::size_t idx : ranked_) {
        if (!chosen_.count(idx)) remaining_.push_back(idx);
      }
    }
    std::size_t pick = 0;
    if (shuffled_) pick = static_cast<std::size_t>(rng_.below(remaining_.size()));
    const std::size_t idx = remaining_[pick];
    remaining_.erase(remaining_.begin() + static_cast<std::ptrdiff_t>(pick));
    chosen_.insert(idx);
    return idx;
  }

 private:
  std::vector<std::size_t> ranked_;
  bool shuffled_;
  Rng rng_;
  std::vector<std::size_t> remaining_;
  std::unordered_set<std::size_t> chosen_;
};

}  // namespace

SampleResult sample_negatives(std::string_view question, const std::vector<Fact>& facts,
                              const SamplingConfig& cfg,
                              const std::map<std::string, double>* scores) {
  if (cfg.ratio_n < 1) throw std::invalid_argument("ratio_n must be at least 1");
  if (cfg.strategy == SamplingStrategy::SelfMining && scores == nullptr) {
    throw MissingScores("self-mining needs retriever scores for this question");
  }

  std::vector<const Fact*> positives;
  std::unordered_set<std::string> gold_texts;
  for (const auto& f : facts) {
    if (f.is_gold) {
      positives.push_back(&f);
      gold_texts.insert(f.text);
    }
  }
  if (positives.empty()) throw std::invalid_argument("question has no gold fact");

  std::vector<const Fact*> pool;
  std::unordered_set<std::string> seen_texts;
  for (const auto& f : facts) {
    if (f.is_gold || gold_texts.count(f.text)) continue;
    if (!seen_texts.insert(f.text).second) continue;
    pool.push_back(&f);
  }
  if (pool.empty()) throw NoNegativesAvailable("no non-gold facts to sample from");

  SampleResult result;
  if (cfg.strategy == SamplingStrategy::NumberAware) {
    std::vector<const Fact*> numerical;
    std::copy_if(pool.begin(), pool.end(), std::back_inserter(numerical),
                 [](const Fact* f) { return f->is_numerical; });
    const std::size_t needed = cfg.ratio_n * positives.size();
    if (numerical.size() >= needed) {
      pool = std::move(numerical);
    } else {
      result.warnings.push_back("only " + std::to_string(numerical.size()) +
                                " numerical negatives for " + std::to_string(needed) +
                                " draws; sampling from all negatives");
    }
  }

  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  bool shuffled = false;
  switch (cfg.strategy) {
    case SamplingStrategy::Random:
    case SamplingStrategy::NumberAware:
      shuffled = true;
      break;
    case SamplingStrategy::Bm25: {
      std::unordered_map<std::string, std::size_t> rank;
      const auto scored = bm25_scores(question, facts, cfg.k1, cfg.b);
      for (std::size_t r = 0; r < scored.size(); ++r) rank.emplace(scored[r].id, r);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rank.at(pool[a]->id) < rank.at(pool[b]->id);
      });
      break;
    }
    case SamplingStrategy::SelfMining: {
      auto score_of = [&](std::size_t i) {
        const auto it = scores->find(pool[i]->id);
        return it == scores->end() ? -std::numeric_limits<double>::infinity() : it->second;
      };
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = score_of(a);
        const double sb = score_of(b);
        if (sa != sb) return sa > sb;
        return pool[a]->id < pool[b]->id;
      });
      break;
    }
  }

  const std::size_t take = std::min(cfg.ratio_n, pool.size());
  if (take < cfg.ratio_n) {
    result.warnings.push_back("only " + std::to_string(pool.size()) + " negatives available for ratio " +
                              std::to_string(cfg.ratio_n));
  }
  NegativeStream stream(std::move(order), shuffled, cfg.seed);
  const std::string q(question);
  for (const Fact* positive : positives) {
    result.pairs.push_back({q, *positive, PairLabel::Positive, cfg.strategy});
    stream.next_positive();
    for (std::size_t n = 0; n < take; ++n) {
      result.pairs.push_back({q, *pool[stream.draw()], PairLabel::Negative, cfg.strategy});
    }
  }
  return result;
}

}  // namespace numreason
