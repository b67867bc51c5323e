#include "numreason/parser.hpp"

#include <cctype>
#include <charconv>

#include "numreason/table.hpp"

namespace numreason {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::optional<double> parse_decimal(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && body.front() == '-') body.remove_prefix(1);
  if (body.empty()) return std::nullopt;
  if (!std::isdigit(static_cast<unsigned char>(body.front())) && body.front() != '.') {
    return std::nullopt;
  }
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

bool valid_const_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program run() {
    std::vector<Step> steps;
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty program", pos_);
    while (true) {
      steps.push_back(parse_term(steps.size()));
      skip_ws();
      if (pos_ == text_.size()) break;
      if (text_[pos_] != ',') throw ParseError("expected ',' between steps", pos_);
      ++pos_;
      skip_ws();
      if (pos_ == text_.size()) throw ParseError("trailing ','", pos_);
    }
    try {
      return Program(std::move(steps));
    } catch (const ProgramError& e) {
      throw ParseError(e.what(), 0);
    }
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Step parse_term(std::size_t index) {
    const std::size_t start = pos_;
    const std::size_t open = text_.find('(', pos_);
    if (open == std::string_view::npos) throw ParseError("expected '('", pos_);
    const std::string_view name = trim(text_.substr(pos_, open - pos_));
    if (name.empty()) throw ParseError("missing operator name", start);
    const auto op = operator_from_name(name);
    if (!op) throw ParseError("unknown operator '" + std::string(name) + "'", start);

    // Matching parenthesis; table headers such as "net income (loss)" nest.
    std::size_t depth = 0;
    std::size_t close = std::string_view::npos;
    for (std::size_t i = open; i < text_.size(); ++i) {
      if (text_[i] == '(') {
        ++depth;
      } else if (text_[i] == ')' && --depth == 0) {
        close = i;
        break;
      }
    }
    if (close == std::string_view::npos) throw ParseError("unbalanced '('", open);
    pos_ = close + 1;

    const std::string_view inner = text_.substr(open + 1, close - open - 1);
    const std::size_t inner_offset = open + 1;
    std::vector<std::size_t> commas;
    depth = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] == '(') ++depth;
      if (inner[i] == ')' && depth > 0) --depth;
      if (inner[i] == ',' && depth == 0) commas.push_back(i);
    }
    if (commas.empty()) {
      throw ParseError(std::string(operator_name(*op)) + " takes two operands", inner_offset);
    }
    // Table headers may contain commas; "none" is always after the last one.
    const std::size_t split = is_table_op(*op) ? commas.back() : commas.front();
    if (!is_table_op(*op) && commas.size() > 1) {
      throw ParseError(std::string(operator_name(*op)) + " takes two operands",
                       inner_offset + commas[1]);
    }
    const std::string_view raw1 = inner.substr(0, split);
    const std::string_view raw2 = inner.substr(split + 1);

    Step step;
    step.op = *op;
    if (is_table_op(*op)) {
      const std::string_view header = trim(raw1);
      if (header.empty()) throw ParseError("missing table header", inner_offset);
      if (!iequals(trim(raw2), "none")) {
        throw ParseError(std::string(operator_name(*op)) + " expects none as second operand",
                         inner_offset + split + 1);
      }
      step.arg1 = TableHeader{std::string(header)};
      step.arg2 = NoneArg{};
    } else {
      step.arg1 = parse_value_operand(trim(raw1), index, inner_offset);
      step.arg2 = parse_value_operand(trim(raw2), index, inner_offset + split + 1);
    }
    return step;
  }

  static Operand parse_value_operand(std::string_view arg, std::size_t index, std::size_t offset) {
    if (arg.empty()) throw ParseError("missing operand", offset);
    if (arg.front() == '#') {
      const std::string_view digits = arg.substr(1);
      std::size_t ref = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ref);
      if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw ParseError("malformed step reference '" + std::string(arg) + "'", offset);
      }
      if (ref >= index) {
        throw ParseError("step reference " + std::string(arg) + " in step " +
                             std::to_string(index) + " is not backward",
                         offset);
      }
      return StepRef{ref};
    }
    if (starts_with_ci(arg, "const_")) {
      if (!valid_const_token(arg.substr(6))) {
        throw ParseError("malformed constant '" + std::string(arg) + "'", offset);
      }
      return Const{std::string(arg)};
    }
    if (iequals(arg, "none")) throw ParseError("none is only allowed for table operators", offset);
    if (auto value = parse_decimal(arg)) return NumberLiteral{std::string(arg), *value};
    throw ParseError("malformed operand '" + std::string(arg) + "'", offset);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).run(); }

std::string serialize_program(const Program& program) {
  std::string out;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const Step& step = program[i];
    if (i > 0) out += ", ";
    out += operator_name(step.op);
    out += '(';
    out += operand_text(step.arg1);
    out += ", ";
    out += operand_text(step.arg2);
    out += ')';
  }
  return out;
}

}  // namespace numreason
