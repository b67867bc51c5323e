#include "numreason/toy_rl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "numreason/parser.hpp"

namespace numreason {

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::size_t eof_count = 0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] == "EOF") {
      eof_ = i;
      ++eof_count;
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (tokens_[i] == tokens_[j]) throw std::invalid_argument("duplicate vocab token '" + tokens_[i] + "'");
    }
  }
  if (eof_count != 1) throw std::invalid_argument("vocab needs exactly one EOF token");
}

std::optional<std::size_t> Vocab::index_of(std::string_view token) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] == token) return i;
  }
  return std::nullopt;
}

std::string normalize_program_text(const std::vector<std::string>& tokens) {
  std::string joined;
  for (const auto& t : tokens) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  std::istringstream pieces(joined);
  std::string out;
  std::string piece;
  while (pieces >> piece) {
    if (!out.empty()) {
      const char prev = out.back();
      const char first = piece.front();
      if (prev == '(' || first == ')' || first == ',') {
        // glue
      } else if (prev == ',') {
        out += ' ';
      } else {
        out += ", ";
      }
    }
    out += piece;
  }
  return out;
}

Policy::Policy(std::size_t max_length, std::size_t vocab_size, double init_logit)
    : max_length_(max_length), vocab_size_(vocab_size), logits_(max_length * vocab_size, init_logit) {
  if (max_length == 0 || vocab_size == 0) throw std::invalid_argument("policy needs L >= 1 and a vocab");
}

std::vector<double> Policy::probabilities(std::size_t position) const {
  const auto first = logits_.begin() + static_cast<std::ptrdiff_t>(position * vocab_size_);
  const double top = *std::max_element(first, first + static_cast<std::ptrdiff_t>(vocab_size_));
  std::vector<double> p(vocab_size_);
  double total = 0.0;
  for (std::size_t w = 0; w < vocab_size_; ++w) {
    p[w] = std::exp(first[static_cast<std::ptrdiff_t>(w)] - top);
    total += p[w];
  }
  for (auto& x : p) x /= total;
  return p;
}

nlohmann::json Policy::to_json(const Vocab& vocab) const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t t = 0; t < max_length_; ++t) {
    rows.push_back(std::vector<double>(logits_.begin() + static_cast<std::ptrdiff_t>(t * vocab_size_),
                                       logits_.begin() + static_cast<std::ptrdiff_t>((t + 1) * vocab_size_)));
  }
  return {{"vocab", vocab.tokens()}, {"max_length", max_length_}, {"logits", std::move(rows)}};
}

ExecValue ToyTask::gold_value() const {
  try {
    return execute(gold, table_ptr(), consts);
  } catch (const ExecError& e) {
    throw GoldUnexecutable(std::string("toy task gold does not execute: ") + e.what());
  }
}

ToyTask default_toy_task() {
  return ToyTask{parse_program("Add(1, 2)"), std::nullopt, ConstTable{},
                 Vocab({"add(", "subtract(", "multiply(", "1", "2", "3", ")", "EOF"}), ToleranceConfig{}};
}

ToyTask gradient_check_task() {
  return ToyTask{parse_program("Add(1, 2)"), std::nullopt, ConstTable{},
                 Vocab({"Add(1,", "Subtract(1,", "2)", "EOF"}), ToleranceConfig{}};
}

ToyTask toy_task_from_json(const nlohmann::json& j, std::size_t& max_length) {
  ToyTask task{parse_program(j.at("gold").get<std::string>()), std::nullopt,
               j.contains("consts") ? ConstTable::from_json(j.at("consts")) : ConstTable{},
               Vocab(j.at("vocab").get<std::vector<std::string>>()), ToleranceConfig{}};
  if (j.contains("table")) task.table = Table::from_json(j.at("table"));
  max_length = j.at("max_length").get<std::size_t>();
  if (max_length == 0) throw std::invalid_argument("max_length must be at least 1");
  task.gold_value();
  return task;
}

namespace {

std::string decode(const Vocab& vocab, const std::vector<std::size_t>& tokens) {
  std::vector<std::string> words;
  for (std::size_t id : tokens) {
    if (id == vocab.eof()) break;
    words.push_back(vocab[id]);
  }
  return normalize_program_text(words);
}

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_enumerable(const Policy& policy) {
  double count = 1.0;
  for (std::size_t t = 0; t < policy.max_length(); ++t) {
    count *= static_cast<double>(policy.vocab_size());
    if (count > static_cast<double>(kMaxEnumeration)) {
      throw EnumerationTooLarge("vocab^L exceeds " + std::to_string(kMaxEnumeration) + " sequences");
    }
  }
}

// Visits every terminal prefix (ends in EOF or reaches L) with its
// probability.
template <typename Visit>
void for_each_terminal(const Policy& policy, const Vocab& vocab, Visit&& visit) {
  std::vector<std::vector<double>> probs;
  for (std::size_t t = 0; t < policy.max_length(); ++t) probs.push_back(policy.probabilities(t));
  std::vector<std::size_t> prefix;
  auto recurse = [&](auto&& self, double p) -> void {
    const std::size_t t = prefix.size();
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      prefix.push_back(w);
      const double q = p * probs[t][w];
      if (w == vocab.eof() || prefix.size() == policy.max_length()) {
        visit(prefix, q, probs);
      } else {
        self(self, q);
      }
      prefix.pop_back();
    }
  };
  recurse(recurse, 1.0);
}

}  // namespace

int sequence_reward(const ToyTask& task, const ExecValue& gold_value,
                    const std::vector<std::size_t>& tokens) {
  return reward_against_value(decode(task.vocab, tokens), gold_value, task.table_ptr(), task.consts,
                              task.tolerance)
      .reward;
}

Episode sample_episode(const Policy& policy, const ToyTask& task, Rng& rng) {
  if (policy.vocab_size() != task.vocab.size()) {
    throw std::invalid_argument("policy and task vocab sizes differ");
  }
  Episode ep;
  for (std::size_t t = 0; t < policy.max_length(); ++t) {
    const auto p = policy.probabilities(t);
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t w = p.size() - 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      cumulative += p[i];
      if (u < cumulative) {
        w = i;
        break;
      }
    }
    ep.tokens.push_back(w);
    ep.log_probs.push_back(std::log(p[w]));
    if (w == task.vocab.eof()) break;
  }
  ep.text = decode(task.vocab, ep.tokens);
  ep.reward = reward_against_value(ep.text, task.gold_value(), task.table_ptr(), task.consts,
                                   task.tolerance)
                  .reward;
  return ep;
}

std::vector<double> reinforce_gradient(const Policy& policy, const Episode& episode) {
  std::vector<double> grad(policy.logits().size(), 0.0);
  const double r = static_cast<double>(episode.reward);
  for (std::size_t t = 0; t < episode.tokens.size(); ++t) {
    const auto p = policy.probabilities(t);
    double* row = grad.data() + t * policy.vocab_size();
    for (std::size_t w = 0; w < p.size(); ++w) {
      const double onehot = w == episode.tokens[t] ? 1.0 : 0.0;
      row[w] = -r * (onehot - p[w]);
    }
  }
  return grad;
}

Policy reinforce_step(const Policy& policy, const Episode& episode, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  Policy next = policy;
  const auto grad = reinforce_gradient(policy, episode);
  for (std::size_t i = 0; i < grad.size(); ++i) next.logits()[i] -= lr * grad[i];
  return next;
}

double exact_expected_reward(const Policy& policy, const ToyTask& task) {
  check_enumerable(policy);
  const ExecValue gold = task.gold_value();
  CompensatedSum total;
  for_each_terminal(policy, task.vocab, [&](const std::vector<std::size_t>& prefix, double p, const auto&) {
    total.add(p * sequence_reward(task, gold, prefix));
  });
  return total.value();
}

std::vector<double> exact_reward_gradient(const Policy& policy, const ToyTask& task) {
  check_enumerable(policy);
  const ExecValue gold = task.gold_value();
  const std::size_t v = policy.vocab_size();
  std::vector<CompensatedSum> grad(policy.logits().size());
  for_each_terminal(policy, task.vocab,
                    [&](const std::vector<std::size_t>& prefix, double p,
                        const std::vector<std::vector<double>>& probs) {
                      const double weight = p * sequence_reward(task, gold, prefix);
                      if (weight == 0.0) return;
                      for (std::size_t t = 0; t < prefix.size(); ++t) {
                        for (std::size_t w = 0; w < v; ++w) {
                          const double onehot = w == prefix[t] ? 1.0 : 0.0;
                          grad[t * v + w].add(weight * (onehot - probs[t][w]));
                        }
                      }
                    });
  std::vector<double> out(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) out[i] = grad[i].value();
  return out;
}

nlohmann::json TrainConfig::to_json() const {
  return {{"steps", steps},
          {"lr", lr},
          {"seed", seed},
          {"eval_every", eval_every},
          {"average_window", average_window}};
}

TrainResult train_toy(const ToyTask& task, std::size_t max_length, const TrainConfig& cfg) {
  return train_toy(task, Policy(max_length, task.vocab.size()), cfg);
}

TrainResult train_toy(const ToyTask& task, Policy initial, const TrainConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("training needs at least one step");
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (cfg.average_window < 1) throw std::invalid_argument("average window must be positive");

  TrainResult result{std::move(initial), {}, {}};
  Policy& policy = result.policy;
  task.gold_value();  // throws on a broken gold before any training
  Rng rng(cfg.seed);
  std::deque<int> window;
  double window_sum = 0.0;
  bool exact_enabled = cfg.eval_every > 0;

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const Episode ep = sample_episode(policy, task, rng);
    const auto grad = reinforce_gradient(policy, ep);
    for (std::size_t i = 0; i < grad.size(); ++i) policy.logits()[i] -= cfg.lr * grad[i];

    window.push_back(ep.reward);
    window_sum += ep.reward;
    if (window.size() > cfg.average_window) {
      window_sum -= window.front();
      window.pop_front();
    }
    CurvePoint point{step, window_sum / static_cast<double>(window.size()), std::nullopt};
    if (exact_enabled && step % cfg.eval_every == 0) {
      try {
        point.exact_expected_reward = exact_expected_reward(policy, task);
      } catch (const EnumerationTooLarge& e) {
        result.warnings.push_back(std::string("exact expected reward disabled: ") + e.what());
        exact_enabled = false;
      }
    }
    result.curve.push_back(point);
  }
  return result;
}

}  // namespace numreason
