#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace numreason {

enum class Operator {
  Add,
  Subtract,
  Multiply,
  Divide,
  Exp,
  Greater,
  TableSum,
  TableAverage,
  TableMax,
  TableMin,
};

inline constexpr std::array<Operator, 10> kAllOperators = {
    Operator::Add,      Operator::Subtract,     Operator::Multiply, Operator::Divide,
    Operator::Exp,      Operator::Greater,      Operator::TableSum, Operator::TableAverage,
    Operator::TableMax, Operator::TableMin,
};

constexpr bool is_commutative(Operator op) {
  return op == Operator::Add || op == Operator::Multiply;
}

// Table operators take (table-header, none).
constexpr bool is_table_op(Operator op) {
  return op == Operator::TableSum || op == Operator::TableAverage || op == Operator::TableMax ||
         op == Operator::TableMin;
}

// Canonical spelling: Add, Subtract, ..., Table-sum, Table-average.
std::string_view operator_name(Operator op);

// Case-insensitive; '_' and '-' are interchangeable ("table_sum" == "Table-sum").
std::optional<Operator> operator_from_name(std::string_view name);

struct NumberLiteral {
  std::string text;  // as written, for faithful re-serialization
  double value = 0.0;
  bool operator==(const NumberLiteral&) const = default;
};

struct Const {
  std::string name;  // as written, e.g. "const_1000" or "Const_3"
  bool operator==(const Const&) const = default;
};

struct StepRef {
  std::size_t index = 0;
  bool operator==(const StepRef&) const = default;
};

struct TableHeader {
  std::string name;
  bool operator==(const TableHeader&) const = default;
};

struct NoneArg {
  bool operator==(const NoneArg&) const = default;
};

using Operand = std::variant<NumberLiteral, Const, StepRef, TableHeader, NoneArg>;

std::string operand_text(const Operand& operand);

struct Step {
  Operator op = Operator::Add;
  Operand arg1;
  Operand arg2;
  bool operator==(const Step&) const = default;
};

class ProgramError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An ordered, non-empty list of steps whose step references only point
/// backwards. Construction validates operand arity and reference direction, so
/// a Program value is always executable up to runtime arithmetic errors.
class Program {
 public:
  explicit Program(std::vector<Step> steps);

  const std::vector<Step>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  const Step& operator[](std::size_t i) const { return steps_[i]; }

  // Returns a copy with one more step; the step is validated in place.
  Program appended(Step step) const;

  bool operator==(const Program&) const = default;

 private:
  std::vector<Step> steps_;
};

// Throws ProgramError when `step` could not be step number `position`.
void validate_step(const Step& step, std::size_t position);

}  // namespace numreason
