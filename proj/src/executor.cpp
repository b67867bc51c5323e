#include "numreason/executor.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace numreason {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

ConstTable ConstTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("constant table must be a JSON object");
  ConstTable table;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number()) {
      throw std::invalid_argument("constant '" + name + "' must map to a number");
    }
    table.set(name, value.get<double>());
  }
  return table;
}

void ConstTable::set(std::string_view name, double value) { overrides_[lower(name)] = value; }

std::optional<double> ConstTable::resolve(std::string_view name) const {
  const std::string key = lower(name);
  if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
  if (key.rfind("const_", 0) != 0) return std::nullopt;
  const std::string_view token = std::string_view(key).substr(6);
  if (token == "m1") return -1.0;
  if (token.empty() || !std::all_of(token.begin(), token.end(),
                                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

nlohmann::json ConstTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : overrides_) j[name] = value;
  return j;
}

std::string_view exec_error_name(ExecErrorKind kind) {
  switch (kind) {
    case ExecErrorKind::DivideByZero: return "DivideByZero";
    case ExecErrorKind::MissingTable: return "MissingTable";
    case ExecErrorKind::MissingTableRow: return "MissingTableRow";
    case ExecErrorKind::NoNumericCells: return "NoNumericCells";
    case ExecErrorKind::BooleanUsedAsNumber: return "BooleanUsedAsNumber";
    case ExecErrorKind::ConstUnresolved: return "ConstUnresolved";
    case ExecErrorKind::StepRefInvalid: return "StepRefInvalid";
    case ExecErrorKind::InvalidExponent: return "InvalidExponent";
    case ExecErrorKind::NonFiniteResult: return "NonFiniteResult";
  }
  return "?";
}

ExecError::ExecError(ExecErrorKind kind, std::size_t step, const std::string& detail)
    : std::runtime_error(std::string(exec_error_name(kind)) + " at step " + std::to_string(step) +
                         (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      step_(step) {}

namespace {

class Evaluator {
 public:
  Evaluator(const Program& program, const Table* table, const ConstTable& consts)
      : program_(program), table_(table), consts_(consts) {
    values_.reserve(program.size());
  }

  ExecValue run() {
    for (std::size_t i = 0; i < program_.size(); ++i) {
      step_ = i;
      values_.push_back(eval(program_[i]));
    }
    return values_.back();
  }

 private:
  [[noreturn]] void fail(ExecErrorKind kind, const std::string& detail = {}) const {
    throw ExecError(kind, step_, detail);
  }

  ExecValue value_of(const Operand& operand) const {
    if (const auto* lit = std::get_if<NumberLiteral>(&operand)) return ExecValue::number(lit->value);
    if (const auto* c = std::get_if<Const>(&operand)) {
      const auto v = consts_.resolve(c->name);
      if (!v) fail(ExecErrorKind::ConstUnresolved, c->name);
      return ExecValue::number(*v);
    }
    if (const auto* ref = std::get_if<StepRef>(&operand)) {
      if (ref->index >= values_.size()) fail(ExecErrorKind::StepRefInvalid, operand_text(operand));
      return values_[ref->index];
    }
    fail(ExecErrorKind::StepRefInvalid, "operand '" + operand_text(operand) + "' has no value");
  }

  double number_of(const Operand& operand) const {
    const ExecValue v = value_of(operand);
    if (v.is_bool()) fail(ExecErrorKind::BooleanUsedAsNumber, operand_text(operand));
    return v.as_number();
  }

  ExecValue finite(double v) const {
    if (!std::isfinite(v)) fail(ExecErrorKind::NonFiniteResult);
    return ExecValue::number(v);
  }

  ExecValue eval(const Step& step) const {
    if (is_table_op(step.op)) return eval_table(step);
    const double a = number_of(step.arg1);
    const double b = number_of(step.arg2);
    switch (step.op) {
      case Operator::Add: return finite(a + b);
      case Operator::Subtract: return finite(a - b);
      case Operator::Multiply: return finite(a * b);
      case Operator::Divide:
        if (b == 0.0) fail(ExecErrorKind::DivideByZero);
        return finite(a / b);
      case Operator::Exp:
        if (a < 0.0 && std::trunc(b) != b) {
          fail(ExecErrorKind::InvalidExponent, "negative base with fractional exponent");
        }
        if (a == 0.0 && b < 0.0) fail(ExecErrorKind::DivideByZero, "zero to a negative power");
        return finite(std::pow(a, b));
      case Operator::Greater: return ExecValue::boolean(a > b);
      default: break;
    }
    fail(ExecErrorKind::StepRefInvalid, "unhandled operator");
  }

  ExecValue eval_table(const Step& step) const {
    if (table_ == nullptr) fail(ExecErrorKind::MissingTable);
    const auto& header = std::get<TableHeader>(step.arg1);
    const TableRow* row = table_->find_row(header.name);
    if (row == nullptr) fail(ExecErrorKind::MissingTableRow, header.name);
    std::vector<double> cells;
    for (const auto& cell : row->cells) {
      if (auto v = parse_numeric_cell(cell)) cells.push_back(*v);
    }
    if (cells.empty()) fail(ExecErrorKind::NoNumericCells, header.name);
    double sum = 0.0;
    for (double v : cells) sum += v;
    switch (step.op) {
      case Operator::TableSum: return finite(sum);
      case Operator::TableAverage: return finite(sum / static_cast<double>(cells.size()));
      case Operator::TableMax: return finite(*std::max_element(cells.begin(), cells.end()));
      case Operator::TableMin: return finite(*std::min_element(cells.begin(), cells.end()));
      default: break;
    }
    fail(ExecErrorKind::StepRefInvalid, "unhandled table operator");
  }

  const Program& program_;
  const Table* table_;
  const ConstTable& consts_;
  std::vector<ExecValue> values_;
  std::size_t step_ = 0;
};

}  // namespace

ExecValue execute(const Program& program, const Table* table, const ConstTable& consts) {
  return Evaluator(program, table, consts).run();
}

ExecResult try_execute(const Program& program, const Table* table, const ConstTable& consts) {
  try {
    return execute(program, table, consts);
  } catch (const ExecError& e) {
    return e;
  }
}

std::string format_value(const ExecValue& value, int digits) {
  if (value.is_bool()) return value.as_bool() ? "yes" : "no";
  const double scale = std::pow(10.0, digits);
  double rounded = std::round(value.as_number() * scale) / scale;
  if (rounded == 0.0) rounded = 0.0;  // drop negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, rounded);
  std::string out(buf);
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return out;
}

nlohmann::json value_to_json(const ExecValue& value) {
  if (value.is_bool()) return value.as_bool() ? "yes" : "no";
  return value.as_number();
}

}  // namespace numreason
