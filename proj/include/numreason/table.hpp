#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace numreason {

struct TableRow {
  std::string name;
  std::vector<std::string> cells;
  bool operator==(const TableRow&) const = default;
};

class TableError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Header cells label the value columns; every data row carries exactly
// header().size() cells after its row name.
class Table {
 public:
  Table() = default;
  Table(std::vector<std::string> header, std::vector<TableRow> rows);

  // Accepts {"header": [...], "rows": [["name", c1, ...], ...]} or the FinQA
  // array-of-rows layout where row 0 is the header (its first cell dropped).
  static Table from_json(const nlohmann::json& j);

  // Same layout as from_json's FinQA form: row 0 header, rows 1.. data.
  static Table from_rows(const std::vector<std::vector<std::string>>& rows);

  nlohmann::json to_json() const;

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<TableRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  // Exact match after trimming both sides.
  const TableRow* find_row(std::string_view name) const;

  // Columns become rows: header cells become row names and row names become
  // the header.
  Table transposed() const;

  bool operator==(const Table&) const = default;

 private:
  std::vector<std::string> header_;
  std::vector<TableRow> rows_;
};

// Financial-report cell normalization: strips '$', '%', ',' and surrounding
// whitespace; "(x)" reads as -x. Returns nullopt when nothing numeric is left.
std::optional<double> parse_numeric_cell(std::string_view cell);

std::string_view trim(std::string_view s);

}  // namespace numreason
