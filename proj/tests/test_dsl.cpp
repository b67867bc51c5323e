#include <doctest.h>

#include <cmath>
#include <cstring>
#include <thread>

#include "numreason/executor.hpp"
#include "numreason/parser.hpp"
#include "support/program_gen.hpp"

using namespace numreason;

namespace {

const char* const kTwoStep = "Multiply(4.7, const_1000), Divide(3794, #0)";
const char* const kFourStep = "Add(101, 96), Multiply(Const_10, 105), Add(#0, #1), Divide(#2, Const_3)";

ExecValue run(const std::string& text, const Table* table = nullptr) {
  return execute(parse_program(text), table, ConstTable{});
}

ExecErrorKind error_of(const std::string& text, const Table* table = nullptr) {
  const auto result = try_execute(parse_program(text), table, ConstTable{});
  REQUIRE(std::holds_alternative<ExecError>(result));
  return std::get<ExecError>(result).kind();
}

Table revenue_table() {
  return Table({"2007", "2008", "2009"},
               {{"revenue", {"1", "2", "3"}},
                {"costs", {"$1,200", "(300)", "15%"}},
                {"notes", {"n/a", "-", ""}}});
}

}  // namespace

TEST_CASE("operator set") {
  CHECK(kAllOperators.size() == 10);
  int commutative = 0;
  int table_ops = 0;
  for (Operator op : kAllOperators) {
    commutative += is_commutative(op) ? 1 : 0;
    table_ops += is_table_op(op) ? 1 : 0;
    CHECK(operator_from_name(operator_name(op)) == op);
  }
  CHECK(commutative == 2);
  CHECK(is_commutative(Operator::Add));
  CHECK(is_commutative(Operator::Multiply));
  CHECK(table_ops == 4);
  CHECK(operator_from_name("table_sum") == Operator::TableSum);
  CHECK(operator_from_name("MULTIPLY") == Operator::Multiply);
  CHECK_FALSE(operator_from_name("modulo"));
}

TEST_CASE("parse the two reference programs") {
  const Program two = parse_program(kTwoStep);
  REQUIRE(two.size() == 2);
  CHECK(two[0].op == Operator::Multiply);
  CHECK(std::get<NumberLiteral>(two[0].arg1).value == doctest::Approx(4.7));
  CHECK(std::get<Const>(two[0].arg2).name == "const_1000");
  CHECK(std::get<StepRef>(two[1].arg2).index == 0);

  const Program four = parse_program(kFourStep);
  REQUIRE(four.size() == 4);
  CHECK(four[3].op == Operator::Divide);
  CHECK(std::get<Const>(four[3].arg2).name == "Const_3");
}

TEST_CASE("parse is case and whitespace insensitive") {
  const Program a = parse_program("multiply(4.7,const_1000),divide(3794,#0)");
  const Program b = parse_program("  MULTIPLY( 4.7 , const_1000 ) ,\n Divide(3794,   #0)  ");
  CHECK(a == b);
  CHECK(serialize_program(a) == kTwoStep);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_program("Divide(1, #3)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, #0)"), ParseError);  // self reference
  CHECK_THROWS_AS(parse_program(""), ParseError);
  CHECK_THROWS_AS(parse_program("Modulo(1, 2)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, 2, 3)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, none)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, abc)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, #x)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, const_)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, 2),"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, 2) Add(3, 4)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, 2"), ParseError);
  CHECK_THROWS_AS(parse_program("Table-sum(revenue, 3)"), ParseError);
  CHECK_THROWS_AS(parse_program("Table-sum(, none)"), ParseError);
  CHECK_THROWS_AS(parse_program("Add(1, 2), Subtract(#1, 1)"), ParseError);
}

TEST_CASE("table headers may contain commas and parentheses") {
  const Program p = parse_program("table_max(net income (loss), after tax, none)");
  CHECK(std::get<TableHeader>(p[0].arg1).name == "net income (loss), after tax");
  CHECK(serialize_program(p) == "Table-max(net income (loss), after tax, none)");
}

TEST_CASE("serialize keeps literal text") {
  CHECK(serialize_program(Program({{Operator::Add, NumberLiteral{"0", 0}, NumberLiteral{"0", 0}}})) ==
        "Add(0, 0)");
  CHECK(serialize_program(parse_program(kFourStep)) == kFourStep);
  CHECK(serialize_program(parse_program("add(4.70, 1e3)")) == "Add(4.70, 1e3)");
  CHECK(serialize_program(parse_program("table-average(revenue, NONE)")) == "Table-average(revenue, none)");
}

TEST_CASE("program construction enforces arity") {
  CHECK_THROWS_AS(Program({}), ProgramError);
  CHECK_THROWS_AS(Program({{Operator::TableSum, NumberLiteral{"1", 1}, NoneArg{}}}), ProgramError);
  CHECK_THROWS_AS(Program({{Operator::Add, TableHeader{"x"}, NumberLiteral{"1", 1}}}), ProgramError);
  CHECK_THROWS_AS(Program({{Operator::Add, StepRef{0}, NumberLiteral{"1", 1}}}), ProgramError);
  const Program one({{Operator::Add, NumberLiteral{"1", 1}, NumberLiteral{"2", 2}}});
  CHECK_THROWS_AS(one.appended({Operator::Add, StepRef{1}, StepRef{0}}), ProgramError);
  CHECK(one.appended({Operator::Add, StepRef{0}, StepRef{0}}).size() == 2);
}

TEST_CASE("execute reference programs") {
  // 3794 / (4.7 * 1000) and ((101 + 96) + 10 * 105) / 3 by hand.
  const ExecValue two = run(kTwoStep);
  REQUIRE(two.is_number());
  CHECK(two.as_number() == doctest::Approx(0.8072340425531915).epsilon(1e-15));
  CHECK(two.as_number() == doctest::Approx(3794.0 / 4700.0).epsilon(1e-15));

  const ExecValue four = run(kFourStep);
  CHECK(four.as_number() == doctest::Approx(415.6666666666667).epsilon(1e-15));
  CHECK(four.as_number() == doctest::Approx(1247.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("execute every operator") {
  CHECK(run("Greater(5, 3)") == ExecValue::boolean(true));
  CHECK(run("Greater(3, 5)") == ExecValue::boolean(false));
  CHECK(run("Greater(3, 3)") == ExecValue::boolean(false));
  CHECK(run("Subtract(5, 7)").as_number() == -2.0);
  CHECK(run("Exp(2, 10)").as_number() == 1024.0);
  CHECK(run("Exp(-2, 3)").as_number() == -8.0);
  CHECK(run("Exp(4, 0.5)").as_number() == 2.0);
  CHECK(run("Multiply(const_m1, 7)").as_number() == -7.0);

  const Table table = revenue_table();
  CHECK(run("Table-sum(revenue, none)", &table).as_number() == 6.0);
  CHECK(run("Table-average(revenue, none)", &table).as_number() == 2.0);
  CHECK(run("Table-max(revenue, none)", &table).as_number() == 3.0);
  CHECK(run("Table-min(revenue, none)", &table).as_number() == 1.0);
  // $1,200 + (300) + 15% = 1200 - 300 + 15
  CHECK(run("table_sum( costs , none)", &table).as_number() == 915.0);
  CHECK(run("Table-min(costs, none)", &table).as_number() == -300.0);
  CHECK(run("Table-sum(revenue, none), Divide(#0, 2)", &table).as_number() == 3.0);
}

TEST_CASE("execution errors") {
  const Table table = revenue_table();
  CHECK(error_of("Divide(1, 0)") == ExecErrorKind::DivideByZero);
  CHECK(error_of("Subtract(1, 1), Divide(5, #0)") == ExecErrorKind::DivideByZero);
  CHECK(error_of("Table-sum(revenue, none)") == ExecErrorKind::MissingTable);
  CHECK(error_of("Table-sum(profit, none)", &table) == ExecErrorKind::MissingTableRow);
  CHECK(error_of("Table-sum(notes, none)", &table) == ExecErrorKind::NoNumericCells);
  CHECK(error_of("Greater(2, 1), Add(#0, 1)") == ExecErrorKind::BooleanUsedAsNumber);
  CHECK(error_of("Add(const_pi, 1)") == ExecErrorKind::ConstUnresolved);
  CHECK(error_of("Exp(-8, 0.5)") == ExecErrorKind::InvalidExponent);
  CHECK(error_of("Exp(10, 400)") == ExecErrorKind::NonFiniteResult);
}

TEST_CASE("constant table") {
  ConstTable consts;
  CHECK(consts.resolve("const_1000") == 1000.0);
  CHECK(consts.resolve("Const_3") == 3.0);
  CHECK(consts.resolve("const_0") == 0.0);
  CHECK(consts.resolve("const_m1") == -1.0);
  CHECK_FALSE(consts.resolve("const_pi"));
  CHECK_FALSE(consts.resolve("const_1.5"));
  CHECK_FALSE(consts.resolve("const_"));
  const ConstTable custom = ConstTable::from_json(nlohmann::json{{"const_pi", 3.14}, {"CONST_100", 99}});
  CHECK(custom.resolve("const_PI") == 3.14);
  CHECK(custom.resolve("const_100") == 99.0);
  CHECK_THROWS(ConstTable::from_json(nlohmann::json{{"const_x", "big"}}));
}

TEST_CASE("numeric cell parsing") {
  CHECK(parse_numeric_cell("$ 1,234.5") == 1234.5);
  CHECK(parse_numeric_cell("(12)") == -12.0);
  CHECK(parse_numeric_cell("$ (1,000)") == -1000.0);
  CHECK(parse_numeric_cell(" 7.5% ") == 7.5);
  CHECK(parse_numeric_cell("-3") == -3.0);
  CHECK_FALSE(parse_numeric_cell("n/a"));
  CHECK_FALSE(parse_numeric_cell(""));
  CHECK_FALSE(parse_numeric_cell("12 months"));
}

TEST_CASE("table ingestion") {
  const auto finqa = nlohmann::json::parse(R"([["", "2008", "2009"], ["revenue", "$ 10", "$ 12"]])");
  const Table a = Table::from_json(finqa);
  CHECK(a.header() == std::vector<std::string>{"2008", "2009"});
  REQUIRE(a.rows().size() == 1);
  CHECK(a.rows()[0].name == "revenue");

  const auto obj = nlohmann::json::parse(R"({"header": ["2008", "2009"], "rows": [["revenue", "1", "2"]]})");
  CHECK(Table::from_json(obj) == Table({"2008", "2009"}, {{"revenue", {"1", "2"}}}));
  const auto corner = nlohmann::json::parse(R"({"header": ["item", "2008"], "rows": [["revenue", "1"]]})");
  CHECK(Table::from_json(corner).header() == std::vector<std::string>{"2008"});
  const auto ragged = nlohmann::json::parse(R"({"header": ["a"], "rows": [["r", "1", "2", "3"]]})");
  CHECK_THROWS_AS(Table::from_json(ragged), TableError);

  CHECK(a.find_row("  revenue ") != nullptr);
  CHECK(a.find_row("Revenue") == nullptr);

  const Table t = a.transposed();
  CHECK(t.header() == std::vector<std::string>{"revenue"});
  REQUIRE(t.rows().size() == 2);
  CHECK(t.rows()[1].name == "2009");
  CHECK(t.rows()[1].cells[0] == "$ 12");
  CHECK(t.transposed() == a);
}

TEST_CASE("property: serialize round-trips and execution is deterministic") {
  Rng rng(7);
  const ConstTable consts;
  for (int i = 0; i < 2000; ++i) {
    const Program p = testing::random_program(rng);
    const std::string text = serialize_program(p);
    CHECK(parse_program(text) == p);
    const ExecResult first = try_execute(p, nullptr, consts);
    const ExecResult second = try_execute(p, nullptr, consts);
    REQUIRE(first.index() == second.index());
    if (const auto* v = std::get_if<ExecValue>(&first)) {
      const ExecValue& w = std::get<ExecValue>(second);
      CHECK(v->is_bool() == w.is_bool());
      if (v->is_number()) {
        const double x = v->as_number();
        const double y = w.as_number();
        CHECK(std::memcmp(&x, &y, sizeof(double)) == 0);
      }
    } else {
      // parse-accepted programs never have dangling references
      CHECK(std::get<ExecError>(first).kind() != ExecErrorKind::StepRefInvalid);
    }
  }
}

TEST_CASE("property: commutative operand swap preserves the result") {
  Rng rng(11);
  const ConstTable consts;
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Program p = testing::random_executable_program(rng);
    const ExecValue base = execute(p, nullptr, consts);
    for (std::size_t s = 0; s < p.size(); ++s) {
      if (!is_commutative(p[s].op)) continue;
      std::vector<Step> steps = p.steps();
      std::swap(steps[s].arg1, steps[s].arg2);
      const ExecValue swapped = execute(Program(steps), nullptr, consts);
      REQUIRE(swapped.is_number() == base.is_number());
      if (base.is_number()) {
        CHECK(swapped.as_number() ==
              doctest::Approx(base.as_number()).epsilon(1e-12).scale(1.0));
      } else {
        CHECK(swapped.as_bool() == base.as_bool());
      }
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("concurrent execution agrees with serial execution") {
  const Program p = parse_program(kFourStep);
  const ExecValue expected = execute(p, nullptr, ConstTable{});
  std::vector<int> ok(8, 0);
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        const ConstTable consts;
        for (int i = 0; i < 200; ++i) ok[t] += execute(p, nullptr, consts) == expected ? 1 : 0;
      });
    }
  }
  for (int count : ok) CHECK(count == 200);
}

TEST_CASE("format_value") {
  CHECK(format_value(ExecValue::number(0.8072340425531915), 5) == "0.80723");
  CHECK(format_value(ExecValue::number(415.6666666666667), 5) == "415.66667");
  CHECK(format_value(ExecValue::number(6.0), 5) == "6");
  CHECK(format_value(ExecValue::number(-0.000001), 5) == "0");
  CHECK(format_value(ExecValue::boolean(true), 5) == "yes");
  CHECK(format_value(ExecValue::boolean(false), 5) == "no");
}
