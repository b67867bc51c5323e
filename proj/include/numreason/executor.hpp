#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "numreason/program.hpp"
#include "numreason/table.hpp"

namespace numreason {

/// Resolves `const_*` operand names to numbers.
///
/// Without overrides, `const_<n>` maps to n for any non-negative integer
/// token and `const_m1` maps to -1. Overrides are matched case-insensitively
/// and take precedence, so dataset variants with extra constants can be
/// injected from JSON.
class ConstTable {
 public:
  ConstTable() = default;

  static ConstTable from_json(const nlohmann::json& j);

  void set(std::string_view name, double value);
  std::optional<double> resolve(std::string_view name) const;

  nlohmann::json to_json() const;

 private:
  std::map<std::string, double> overrides_;  // keys lower-cased
};

class ExecValue {
 public:
  static ExecValue number(double v) { return ExecValue(v); }
  static ExecValue boolean(bool b) { return ExecValue(b); }

  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_number() const { return std::holds_alternative<double>(value_); }
  double as_number() const { return std::get<double>(value_); }
  bool as_bool() const { return std::get<bool>(value_); }

  bool operator==(const ExecValue&) const = default;

 private:
  explicit ExecValue(double v) : value_(v) {}
  explicit ExecValue(bool b) : value_(b) {}

  std::variant<double, bool> value_;
};

enum class ExecErrorKind {
  DivideByZero,
  MissingTable,
  MissingTableRow,
  NoNumericCells,
  BooleanUsedAsNumber,
  ConstUnresolved,
  StepRefInvalid,
  InvalidExponent,
  NonFiniteResult,
};

std::string_view exec_error_name(ExecErrorKind kind);

class ExecError : public std::runtime_error {
 public:
  ExecError(ExecErrorKind kind, std::size_t step, const std::string& detail);

  ExecErrorKind kind() const { return kind_; }
  std::size_t step() const { return step_; }

 private:
  ExecErrorKind kind_;
  std::size_t step_;
};

// Evaluates the steps in order and returns the last step's value. Throws
// ExecError; every ExecError marks the program unexecutable.
ExecValue execute(const Program& program, const Table* table, const ConstTable& consts);

using ExecResult = std::variant<ExecValue, ExecError>;

ExecResult try_execute(const Program& program, const Table* table, const ConstTable& consts);

// Rounds half away from zero to `digits` decimals and prints without trailing
// zeros; booleans print as "yes"/"no".
std::string format_value(const ExecValue& value, int digits);

nlohmann::json value_to_json(const ExecValue& value);

}  // namespace numreason
