#include "numreason/table.hpp"

#include <cctype>
#include <charconv>

namespace numreason {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Table::Table(std::vector<std::string> header, std::vector<TableRow> rows)
    : header_(std::move(header)), rows_(std::move(rows)) {
  for (const auto& row : rows_) {
    if (row.cells.size() != header_.size()) {
      throw TableError("row '" + row.name + "' has " + std::to_string(row.cells.size()) +
                       " cells, header has " + std::to_string(header_.size()));
    }
  }
}

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw TableError(std::string(what) + " must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& cell : j) {
    if (cell.is_string()) {
      out.push_back(cell.get<std::string>());
    } else if (cell.is_number()) {
      out.push_back(cell.dump());
    } else {
      throw TableError(std::string(what) + " cells must be strings or numbers");
    }
  }
  return out;
}

}  // namespace

Table Table::from_rows(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return Table();
  std::vector<std::string> header(rows.front().begin() + (rows.front().empty() ? 0 : 1),
                                  rows.front().end());
  std::vector<TableRow> data;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) throw TableError("table row " + std::to_string(i) + " is empty");
    data.push_back({rows[i].front(), {rows[i].begin() + 1, rows[i].end()}});
  }
  return Table(std::move(header), std::move(data));
}

Table Table::from_json(const nlohmann::json& j) {
  if (j.is_array()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : j) rows.push_back(string_list(row, "table row"));
    return from_rows(rows);
  }
  if (!j.is_object() || !j.contains("header") || !j.contains("rows")) {
    throw TableError("table must be {\"header\", \"rows\"} or an array of rows");
  }
  std::vector<std::string> header = string_list(j.at("header"), "header");
  std::vector<TableRow> rows;
  for (const auto& raw : j.at("rows")) {
    auto cells = string_list(raw, "table row");
    if (cells.empty()) throw TableError("table row is empty");
    rows.push_back({cells.front(), {cells.begin() + 1, cells.end()}});
  }
  // A header that also labels the row-name column carries one extra cell.
  if (!rows.empty() && header.size() == rows.front().cells.size() + 1) {
    header.erase(header.begin());
  }
  return Table(std::move(header), std::move(rows));
}

nlohmann::json Table::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rows_) {
    nlohmann::json r = nlohmann::json::array({row.name});
    for (const auto& c : row.cells) r.push_back(c);
    rows.push_back(std::move(r));
  }
  return {{"header", header_}, {"rows", std::move(rows)}};
}

const TableRow* Table::find_row(std::string_view name) const {
  const std::string_view wanted = trim(name);
  for (const auto& row : rows_) {
    if (trim(row.name) == wanted) return &row;
  }
  return nullptr;
}

Table Table::transposed() const {
  std::vector<std::string> header;
  header.reserve(rows_.size());
  for (const auto& row : rows_) header.push_back(row.name);
  std::vector<TableRow> rows;
  for (std::size_t c = 0; c < header_.size(); ++c) {
    TableRow row{header_[c], {}};
    for (const auto& r : rows_) row.cells.push_back(r.cells[c]);
    rows.push_back(std::move(row));
  }
  return Table(std::move(header), std::move(rows));
}

std::optional<double> parse_numeric_cell(std::string_view cell) {
  std::string cleaned;
  for (char c : cell) {
    if (c == '$' || c == '%' || c == ',') continue;
    cleaned.push_back(c);
  }
  std::string_view body = trim(cleaned);
  bool negate = false;
  if (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
    negate = true;
    body = trim(body.substr(1, body.size() - 2));
  }
  if (body.empty()) return std::nullopt;
  std::string_view digits = body;
  if (digits.front() == '-' || digits.front() == '+') digits.remove_prefix(1);
  if (digits.empty() ||
      (!std::isdigit(static_cast<unsigned char>(digits.front())) && digits.front() != '.')) {
    return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  if (body.front() == '-') value = -value;
  return negate ? -value : value;
}

}  // namespace numreason
