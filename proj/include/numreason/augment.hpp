#pragma once

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

namespace numreason {

enum class AugmentRule { Switch, AddSub, MulDiv, MulDivOne };

std::string_view rule_tag(AugmentRule rule);  // "switch", "add_sub", "mul_div", "mul_div_one"
std::optional<AugmentRule> rule_from_tag(std::string_view tag);

enum class MulDivOneMode { Multiply, Divide };

struct AugmentConfig {
  bool enable_switch = true;
  bool enable_add_sub = true;
  bool enable_mul_div = true;
  bool enable_mul_div_one = true;
  std::vector<std::string> constant_pool = {"const_2", "const_3", "const_4",
                                            "const_5", "const_6", "const_7"};
  // When set, used instead of a pool draw.
  std::optional<std::string> add_sub_constant;
  std::optional<std::string> mul_div_constant;
  MulDivOneMode mul_div_one_mode = MulDivOneMode::Multiply;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_switch_variants = 63;

  // Throws std::invalid_argument on an empty pool when a drawing rule is on.
  void validate() const;
  nlohmann::json to_json() const;
};

class AugmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FinalIsBool : public AugmentError {
 public:
  using AugmentError::AugmentError;
};

class ZeroConstant : public AugmentError {
 public:
  using AugmentError::AugmentError;
};

class OriginalUnexecutable : public AugmentError {
 public:
  using AugmentError::AugmentError;
};

// Number of Add/Multiply steps.
std::size_t count_commutative(const Program& program);

// All 2^n - 1 operand swaps of non-empty subsets of the n commutative steps.
// Subset masks count up from 1; bit j is the j-th commutative step in program
// order.
std::vector<Program> switch_variants(const Program& program);

// At most `cap` switch variants: the full enumeration when 2^n - 1 <= cap,
// otherwise `cap` distinct subsets drawn uniformly with `seed`, emitted in
// increasing mask order.
std::vector<Program> switch_variants(const Program& program, std::size_t cap, std::uint64_t seed);

// The append rules check the final value's kind through `table`/`consts`;
// FinalIsBool if it is boolean.
Program add_sub_variant(const Program& program, std::string_view constant, const Table* table,
                        const ConstTable& consts);
Program mul_div_variant(const Program& program, std::string_view constant, const Table* table,
                        const ConstTable& consts);
Program mul_div_one_variant(const Program& program, MulDivOneMode mode, const Table* table,
                            const ConstTable& consts);

// Renders a pool entry as Const_<token>.
std::string canonical_const_name(std::string_view name);

struct AugmentedVariant {
  AugmentRule rule;
  Program program;
};

struct AugmentedSet {
  Program original;
  std::vector<AugmentedVariant> variants;
  std::size_t dropped = 0;  // variants that failed execution-equivalence

  nlohmann::json to_json(std::string_view id) const;
};

AugmentedSet augment_all(const Program& program, const AugmentConfig& cfg, const Table* table,
                         const ConstTable& consts, const ToleranceConfig& tol = {});

}  // namespace numreason
