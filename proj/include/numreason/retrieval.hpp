#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace numreason {

enum class FactKind { TextSentence, TableRow };

struct Fact {
  std::string id;  // "text_<i>" over pre_text + post_text, "table_<i>" over raw table rows
  FactKind kind = FactKind::TextSentence;
  std::string text;
  bool is_numerical = false;
  bool is_gold = false;
  std::optional<std::size_t> row_index;  // raw table row, table facts only
};

// One question over one long-form document, in the FinQA record layout.
struct Document {
  std::string id;
  std::string question;
  std::vector<std::string> pre_text;
  std::vector<std::string> post_text;
  std::vector<std::vector<std::string>> table;  // row 0 is the header
  std::set<std::string> gold_ids;

  // FinQA: pre_text, post_text, table, qa.question, qa.gold_inds.
  // ConvFinQA turn records: annotation.cur_dial (joined into the question)
  // and annotation.gold_ind.
  static Document from_json(const nlohmann::json& j);
};

struct NumericOptions {
  bool exclude_bare_years = false;
};

// True iff `text` holds a numeric token: digits with optional thousands
// commas, a decimal part, '%', '$' or parentheses, not glued to a preceding
// letter ("q3" does not count).
bool classify_numerical(std::string_view text, const NumericOptions& options = {});

// "the <row> of <col> is <cell> ; the <row> of <col2> is <cell2> ;"
std::string serialize_table_row(const std::vector<std::string>& header,
                                const std::vector<std::string>& row);

class EmptyDocument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<Fact> extract_facts(const Document& doc, const NumericOptions& options = {});

struct ScoredFact {
  std::string id;
  double score = 0.0;
};

// Lower-cased tokens split on every non-alphanumeric character.
std::vector<std::string> bm25_tokenize(std::string_view text);

// Okapi BM25 with document statistics over `facts`. Descending by score, ties
// broken by ascending fact id.
std::vector<ScoredFact> bm25_scores(std::string_view query, const std::vector<Fact>& facts,
                                    double k1 = 1.2, double b = 0.75);

struct RetrievalRanking {
  std::string question_id;
  std::vector<std::string> ranked;  // best first

  static RetrievalRanking from_json(const nlohmann::json& j);
};

class EmptyGold : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// |top-k of ranking ∩ gold| / |gold|.
double recall_at_k(const RetrievalRanking& ranking, const std::set<std::string>& gold,
                   std::size_t k);

}  // namespace numreason
