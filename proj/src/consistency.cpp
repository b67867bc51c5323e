#include "numreason/consistency.hpp"

#include <cctype>
#include <cmath>
#include <unordered_map>

#include "numreason/parallel.hpp"
#include "numreason/parser.hpp"

namespace numreason {

nlohmann::json ToleranceConfig::to_json() const {
  return {{"abs_tol", abs_tol}, {"rel_tol", rel_tol}, {"round_digits", round_digits}};
}

namespace {

double round_to(double x, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(x * scale) / scale;
}

std::string fold(std::string_view s) {
  std::string out(trim(s));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool operands_match(const Operand& a, const Operand& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<NumberLiteral>(&a)) return x->value == std::get<NumberLiteral>(b).value;
  if (const auto* x = std::get_if<Const>(&a)) return fold(x->name) == fold(std::get<Const>(b).name);
  if (const auto* x = std::get_if<StepRef>(&a)) return x->index == std::get<StepRef>(b).index;
  if (const auto* x = std::get_if<TableHeader>(&a)) {
    return fold(x->name) == fold(std::get<TableHeader>(b).name);
  }
  return true;  // NoneArg
}

}  // namespace

bool values_equal(const ExecValue& a, const ExecValue& b, const ToleranceConfig& tol) {
  if (a.is_bool() != b.is_bool()) return false;
  if (a.is_bool()) return a.as_bool() == b.as_bool();
  const double x = round_to(a.as_number(), tol.round_digits);
  const double y = round_to(b.as_number(), tol.round_digits);
  return std::fabs(x - y) <= std::max(tol.abs_tol, tol.rel_tol * std::fabs(y));
}

std::string_view reward_class_name(RewardClass c) {
  switch (c) {
    case RewardClass::Unexecutable: return "unexecutable";
    case RewardClass::ExecutableWrong: return "executable_wrong";
    case RewardClass::ExecutableRight: return "executable_right";
  }
  return "?";
}

nlohmann::json RewardOutcome::to_json() const {
  nlohmann::json j = {{"class", reward_class_name(kind)},
                      {"reward", reward},
                      {"gold", value_to_json(gold)}};
  j["executed"] = executed ? value_to_json(*executed) : nlohmann::json(nullptr);
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

RewardOutcome reward_against_value(std::string_view candidate_text, const ExecValue& gold_value,
                                   const Table* table, const ConstTable& consts,
                                   const ToleranceConfig& tol) {
  RewardOutcome out;
  out.gold = gold_value;
  try {
    const Program candidate = parse_program(candidate_text);
    out.executed = execute(candidate, table, consts);
  } catch (const ParseError& e) {
    out.detail = std::string("ParseError: ") + e.what();
    return out;
  } catch (const ExecError& e) {
    out.detail = e.what();
    return out;
  }
  if (values_equal(*out.executed, gold_value, tol)) {
    out.kind = RewardClass::ExecutableRight;
    out.reward = 1;
  } else {
    out.kind = RewardClass::ExecutableWrong;
    out.reward = -1;
  }
  return out;
}

RewardOutcome reward(std::string_view candidate_text, const Program& gold, const Table* table,
                     const ConstTable& consts, const ToleranceConfig& tol) {
  ExecValue gold_value = ExecValue::number(0.0);
  try {
    gold_value = execute(gold, table, consts);
  } catch (const ExecError& e) {
    throw GoldUnexecutable(std::string("gold program does not execute: ") + e.what());
  }
  return reward_against_value(candidate_text, gold_value, table, consts, tol);
}

bool program_accuracy_match(const Program& predicted, const Program& gold) {
  if (predicted.size() != gold.size()) return false;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const Step& p = predicted[i];
    const Step& g = gold[i];
    if (p.op != g.op || !operands_match(p.arg1, g.arg1) || !operands_match(p.arg2, g.arg2)) {
      return false;
    }
  }
  return true;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& r : records) {
    items.push_back({{"id", r.id},
                     {"predicted", r.predicted},
                     {"gold", r.gold},
                     {"predicted_value", r.predicted_value ? value_to_json(*r.predicted_value)
                                                           : nlohmann::json(nullptr)},
                     {"gold_value", value_to_json(r.gold_value)},
                     {"exec_match", r.exec_match},
                     {"prog_match", r.prog_match}});
  }
  return {{"execution_accuracy", execution_accuracy},
          {"program_accuracy", program_accuracy},
          {"total", records.size()},
          {"items", std::move(items)}};
}

EvalReport evaluate_predictions(const std::vector<Prediction>& predictions,
                                const std::vector<GoldItem>& golds, const ConstTable& consts,
                                const ToleranceConfig& tol, unsigned threads) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) throw MissingId("duplicate prediction id '" + p.id + "'");
  }
  std::unordered_map<std::string, bool> gold_ids;
  for (const auto& g : golds) {
    if (!gold_ids.emplace(g.id, true).second) throw MissingId("duplicate gold id '" + g.id + "'");
    if (!by_id.count(g.id)) throw MissingId("no prediction for gold id '" + g.id + "'");
  }
  for (const auto& p : predictions) {
    if (!gold_ids.count(p.id)) throw MissingId("prediction id '" + p.id + "' has no gold");
  }

  EvalReport report;
  report.records.resize(golds.size());
  parallel_for(golds.size(), threads, [&](std::size_t i) {
    const GoldItem& g = golds[i];
    const Prediction& p = *by_id.at(g.id);
    EvalRecord& r = report.records[i];
    r.id = g.id;
    r.predicted = p.program_text;
    r.gold = serialize_program(g.program);
    r.gold_value = g.answer;
    const Table* table = g.table ? &*g.table : nullptr;
    try {
      const Program predicted = parse_program(p.program_text);
      r.prog_match = program_accuracy_match(predicted, g.program);
      if (auto result = try_execute(predicted, table, consts);
          std::holds_alternative<ExecValue>(result)) {
        r.predicted_value = std::get<ExecValue>(result);
        r.exec_match = values_equal(*r.predicted_value, g.answer, tol);
      }
    } catch (const ParseError&) {
      // unparseable: both matches stay false
    }
  });

  std::size_t exec_hits = 0;
  std::size_t prog_hits = 0;
  for (const auto& r : report.records) {
    exec_hits += r.exec_match ? 1 : 0;
    prog_hits += r.prog_match ? 1 : 0;
  }
  if (!golds.empty()) {
    report.execution_accuracy = static_cast<double>(exec_hits) / static_cast<double>(golds.size());
    report.program_accuracy = static_cast<double>(prog_hits) / static_cast<double>(golds.size());
  }
  return report;
}

}  // namespace numreason
