#include "numreason/program.hpp"

#include <algorithm>
#include <cctype>

namespace numreason {

namespace {

std::string normalize_op_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '_') c = '-';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view operator_name(Operator op) {
  switch (op) {
    case Operator::Add: return "Add";
    case Operator::Subtract: return "Subtract";
    case Operator::Multiply: return "Multiply";
    case Operator::Divide: return "Divide";
    case Operator::Exp: return "Exp";
    case Operator::Greater: return "Greater";
    case Operator::TableSum: return "Table-sum";
    case Operator::TableAverage: return "Table-average";
    case Operator::TableMax: return "Table-max";
    case Operator::TableMin: return "Table-min";
  }
  return "?";
}

std::optional<Operator> operator_from_name(std::string_view name) {
  const std::string wanted = normalize_op_name(name);
  for (Operator op : kAllOperators) {
    if (normalize_op_name(operator_name(op)) == wanted) return op;
  }
  return std::nullopt;
}

std::string operand_text(const Operand& operand) {
  struct Visitor {
    std::string operator()(const NumberLiteral& n) const { return n.text; }
    std::string operator()(const Const& c) const { return c.name; }
    std::string operator()(const StepRef& r) const { return "#" + std::to_string(r.index); }
    std::string operator()(const TableHeader& h) const { return h.name; }
    std::string operator()(const NoneArg&) const { return "none"; }
  };
  return std::visit(Visitor{}, operand);
}

void validate_step(const Step& step, std::size_t position) {
  const std::string where = "step " + std::to_string(position) + " (" +
                            std::string(operator_name(step.op)) + "): ";
  if (is_table_op(step.op)) {
    if (!std::holds_alternative<TableHeader>(step.arg1)) {
      throw ProgramError(where + "first operand must be a table header");
    }
    if (!std::holds_alternative<NoneArg>(step.arg2)) {
      throw ProgramError(where + "second operand must be none");
    }
    return;
  }
  for (const Operand* arg : {&step.arg1, &step.arg2}) {
    if (std::holds_alternative<TableHeader>(*arg) || std::holds_alternative<NoneArg>(*arg)) {
      throw ProgramError(where + "operand '" + operand_text(*arg) + "' is not a value");
    }
    if (const auto* ref = std::get_if<StepRef>(arg); ref && ref->index >= position) {
      throw ProgramError(where + "#" + std::to_string(ref->index) +
                         " does not refer to an earlier step");
    }
  }
}

Program::Program(std::vector<Step> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw ProgramError("program has no steps");
  for (std::size_t i = 0; i < steps_.size(); ++i) validate_step(steps_[i], i);
}

Program Program::appended(Step step) const {
  validate_step(step, steps_.size());
  Program copy = *this;
  copy.steps_.push_back(std::move(step));
  return copy;
}

}  // namespace numreason
