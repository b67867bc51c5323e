#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "numreason/executor.hpp"
#include "numreason/program.hpp"
#include "numreason/table.hpp"

namespace numreason {

struct ToleranceConfig {
  double abs_tol = 1e-5;
  double rel_tol = 1e-5;
  int round_digits = 5;

  nlohmann::json to_json() const;
};

// Bool vs Bool compares truth values; Num vs Num compares after rounding both
// to round_digits decimals; mixed kinds never match.
bool values_equal(const ExecValue& a, const ExecValue& b, const ToleranceConfig& tol = {});

enum class RewardClass { Unexecutable, ExecutableWrong, ExecutableRight };

std::string_view reward_class_name(RewardClass c);

struct RewardOutcome {
  RewardClass kind = RewardClass::Unexecutable;
  int reward = -2;
  std::optional<ExecValue> executed;  // absent iff Unexecutable
  ExecValue gold = ExecValue::number(0.0);
  std::string detail;                 // parse/exec error text for unexecutable candidates

  nlohmann::json to_json() const;
};

class GoldUnexecutable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// -2 for an unparseable or unexecutable candidate, -1 for a wrong answer, +1
// for a right one. Throws GoldUnexecutable if the gold program itself fails.
RewardOutcome reward(std::string_view candidate_text, const Program& gold, const Table* table,
                     const ConstTable& consts, const ToleranceConfig& tol = {});

// Same, against an already-known gold value.
RewardOutcome reward_against_value(std::string_view candidate_text, const ExecValue& gold_value,
                                   const Table* table, const ConstTable& consts,
                                   const ToleranceConfig& tol = {});

// Positional operator/operand match. Literals compare as decimals, constants
// case-insensitively, headers after trim and case folding.
bool program_accuracy_match(const Program& predicted, const Program& gold);

struct GoldItem {
  std::string id;
  Program program;
  std::optional<Table> table;
  ExecValue answer;
};

struct Prediction {
  std::string id;
  std::string program_text;
};

struct EvalRecord {
  std::string id;
  std::string predicted;
  std::string gold;
  std::optional<ExecValue> predicted_value;
  ExecValue gold_value = ExecValue::number(0.0);
  bool exec_match = false;
  bool prog_match = false;
};

struct EvalReport {
  double execution_accuracy = 0.0;
  double program_accuracy = 0.0;
  std::vector<EvalRecord> records;

  nlohmann::json to_json() const;
};

class MissingId : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Records follow gold order. Throws MissingId unless every gold id has exactly
// one prediction and vice versa.
EvalReport evaluate_predictions(const std::vector<Prediction>& predictions,
                                const std::vector<GoldItem>& golds, const ConstTable& consts,
                                const ToleranceConfig& tol = {}, unsigned threads = 1);

}  // namespace numreason
