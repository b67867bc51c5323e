#include "numreason/augment.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "numreason/parser.hpp"
#include "numreason/rng.hpp"

namespace numreason {

std::string_view rule_tag(AugmentRule rule) {
  switch (rule) {
    case AugmentRule::Switch: return "switch";
    case AugmentRule::AddSub: return "add_sub";
    case AugmentRule::MulDiv: return "mul_div";
    case AugmentRule::MulDivOne: return "mul_div_one";
  }
  return "?";
}

std::optional<AugmentRule> rule_from_tag(std::string_view tag) {
  for (AugmentRule r :
       {AugmentRule::Switch, AugmentRule::AddSub, AugmentRule::MulDiv, AugmentRule::MulDivOne}) {
    if (rule_tag(r) == tag) return r;
  }
  return std::nullopt;
}

void AugmentConfig::validate() const {
  const bool draws = (enable_add_sub && !add_sub_constant) || (enable_mul_div && !mul_div_constant);
  if (draws && constant_pool.empty()) {
    throw std::invalid_argument("constant pool is empty but add_sub/mul_div need a random constant");
  }
  if (max_switch_variants && *max_switch_variants == 0) {
    throw std::invalid_argument("max_switch_variants must be positive");
  }
}

nlohmann::json AugmentConfig::to_json() const {
  nlohmann::json rules = nlohmann::json::array();
  if (enable_switch) rules.push_back("switch");
  if (enable_add_sub) rules.push_back("add_sub");
  if (enable_mul_div) rules.push_back("mul_div");
  if (enable_mul_div_one) rules.push_back("mul_div_one");
  nlohmann::json j = {{"rules", rules},
                      {"constant_pool", constant_pool},
                      {"mul_div_one_mode",
                       mul_div_one_mode == MulDivOneMode::Multiply ? "multiply" : "divide"},
                      {"seed", seed}};
  j["add_sub_constant"] = add_sub_constant ? nlohmann::json(*add_sub_constant) : nullptr;
  j["mul_div_constant"] = mul_div_constant ? nlohmann::json(*mul_div_constant) : nullptr;
  j["max_switch_variants"] =
      max_switch_variants ? nlohmann::json(*max_switch_variants) : nlohmann::json(nullptr);
  return j;
}

std::size_t count_commutative(const Program& program) {
  return static_cast<std::size_t>(std::count_if(
      program.steps().begin(), program.steps().end(),
      [](const Step& s) { return is_commutative(s.op); }));
}

namespace {

constexpr std::size_t kMaxFullEnumerationSteps = 24;

std::vector<std::size_t> commutative_positions(const Program& program) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < program.size(); ++i) {
    if (is_commutative(program[i].op)) out.push_back(i);
  }
  return out;
}

Program apply_swap_mask(const Program& program, const std::vector<std::size_t>& positions,
                        std::uint64_t mask) {
  std::vector<Step> steps = program.steps();
  for (std::size_t bit = 0; bit < positions.size(); ++bit) {
    if (mask & (std::uint64_t{1} << bit)) std::swap(steps[positions[bit]].arg1, steps[positions[bit]].arg2);
  }
  return Program(std::move(steps));
}

void require_numeric_final(const Program& program, const Table* table, const ConstTable& consts) {
  // Errors other than a boolean final value surface when the caller verifies.
  const ExecResult result = try_execute(program, table, consts);
  if (const auto* v = std::get_if<ExecValue>(&result); v && v->is_bool()) {
    throw FinalIsBool("final step of '" + serialize_program(program) + "' is boolean");
  }
  if (program.steps().back().op == Operator::Greater) {
    throw FinalIsBool("final step of '" + serialize_program(program) + "' is Greater");
  }
}

Program append_pair(const Program& program, Operator first, Operator second,
                    std::string constant) {
  const std::size_t last = program.size() - 1;
  Program out = program.appended({first, StepRef{last}, Const{constant}});
  return out.appended({second, StepRef{last + 1}, Const{std::move(constant)}});
}

}  // namespace

std::string canonical_const_name(std::string_view name) {
  std::string_view token = name;
  if (token.size() >= 6) {
    std::string prefix(token.substr(0, 6));
    for (auto& c : prefix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (prefix == "const_") token.remove_prefix(6);
  }
  return "Const_" + std::string(token);
}

std::vector<Program> switch_variants(const Program& program) {
  const auto positions = commutative_positions(program);
  if (positions.size() > kMaxFullEnumerationSteps) {
    throw std::length_error("too many commutative steps to enumerate every switch variant");
  }
  std::vector<Program> out;
  const std::uint64_t count = (std::uint64_t{1} << positions.size()) - 1;
  out.reserve(count);
  for (std::uint64_t mask = 1; mask <= count; ++mask) {
    out.push_back(apply_swap_mask(program, positions, mask));
  }
  return out;
}

std::vector<Program> switch_variants(const Program& program, std::size_t cap, std::uint64_t seed) {
  const auto positions = commutative_positions(program);
  const std::size_t n = positions.size();
  if (n < 64 && (std::uint64_t{1} << n) - 1 <= cap) return switch_variants(program);

  const std::uint64_t width_mask = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  Rng rng(seed);
  std::set<std::uint64_t> masks;
  while (masks.size() < cap) {
    const std::uint64_t mask = rng.next() & width_mask;
    if (mask != 0) masks.insert(mask);
  }
  std::vector<Program> out;
  out.reserve(cap);
  for (std::uint64_t mask : masks) out.push_back(apply_swap_mask(program, positions, mask));
  return out;
}

Program add_sub_variant(const Program& program, std::string_view constant, const Table* table,
                        const ConstTable& consts) {
  require_numeric_final(program, table, consts);
  return append_pair(program, Operator::Add, Operator::Subtract, canonical_const_name(constant));
}

Program mul_div_variant(const Program& program, std::string_view constant, const Table* table,
                        const ConstTable& consts) {
  require_numeric_final(program, table, consts);
  const std::string name = canonical_const_name(constant);
  const auto value = consts.resolve(name);
  if (!value) throw AugmentError("constant '" + std::string(constant) + "' does not resolve");
  if (*value == 0.0) throw ZeroConstant("constant '" + std::string(constant) + "' is zero");
  return append_pair(program, Operator::Multiply, Operator::Divide, name);
}

Program mul_div_one_variant(const Program& program, MulDivOneMode mode, const Table* table,
                            const ConstTable& consts) {
  require_numeric_final(program, table, consts);
  const Operator op = mode == MulDivOneMode::Multiply ? Operator::Multiply : Operator::Divide;
  return program.appended({op, StepRef{program.size() - 1}, Const{"Const_1"}});
}

nlohmann::json AugmentedSet::to_json(std::string_view id) const {
  nlohmann::json variants_json = nlohmann::json::array();
  for (const auto& v : variants) {
    variants_json.push_back({{"rule", rule_tag(v.rule)}, {"program", serialize_program(v.program)}});
  }
  return {{"id", id}, {"program", serialize_program(original)}, {"variants", std::move(variants_json)}};
}

AugmentedSet augment_all(const Program& program, const AugmentConfig& cfg, const Table* table,
                         const ConstTable& consts, const ToleranceConfig& tol) {
  cfg.validate();
  const ExecResult original = try_execute(program, table, consts);
  if (const auto* err = std::get_if<ExecError>(&original)) {
    throw OriginalUnexecutable(err->what());
  }
  const ExecValue& expected = std::get<ExecValue>(original);

  AugmentedSet out{program, {}, 0};
  std::unordered_set<std::string> seen{serialize_program(program)};
  auto accept = [&](AugmentRule rule, Program candidate) {
    if (!seen.insert(serialize_program(candidate)).second) return;
    const ExecResult got = try_execute(candidate, table, consts);
    const auto* value = std::get_if<ExecValue>(&got);
    if (value == nullptr || !values_equal(*value, expected, tol)) {
      ++out.dropped;
      return;
    }
    out.variants.push_back({rule, std::move(candidate)});
  };

  Rng constants(cfg.seed);
  auto pick = [&](const std::optional<std::string>& pinned) {
    return pinned ? *pinned : cfg.constant_pool[constants.below(cfg.constant_pool.size())];
  };

  if (cfg.enable_switch) {
    auto variants = cfg.max_switch_variants
                        ? switch_variants(program, *cfg.max_switch_variants, splitmix64(cfg.seed))
                        : switch_variants(program);
    for (auto& v : variants) accept(AugmentRule::Switch, std::move(v));
  }
  const bool numeric_final = expected.is_number();
  if (cfg.enable_add_sub && numeric_final) {
    accept(AugmentRule::AddSub, add_sub_variant(program, pick(cfg.add_sub_constant), table, consts));
  }
  if (cfg.enable_mul_div && numeric_final) {
    try {
      accept(AugmentRule::MulDiv, mul_div_variant(program, pick(cfg.mul_div_constant), table, consts));
    } catch (const AugmentError&) {
      ++out.dropped;
    }
  }
  if (cfg.enable_mul_div_one && numeric_final) {
    accept(AugmentRule::MulDivOne, mul_div_one_variant(program, cfg.mul_div_one_mode, table, consts));
  }
  return out;
}

}  // namespace numreason
