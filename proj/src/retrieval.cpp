#include "numreason/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace numreason {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> sentences(const nlohmann::json& j, const char* field) {
  std::vector<std::string> out;
  if (!j.contains(field)) return out;
  const auto& v = j.at(field);
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
    return out;
  }
  if (!v.is_array()) throw std::invalid_argument(std::string(field) + " must be a list of strings");
  for (const auto& s : v) out.push_back(s.get<std::string>());
  return out;
}

void collect_gold(const nlohmann::json& inds, std::set<std::string>& out) {
  if (inds.is_object()) {
    for (const auto& [key, _] : inds.items()) out.insert(key);
  } else if (inds.is_array()) {
    for (const auto& key : inds) out.insert(key.get<std::string>());
  } else {
    throw std::invalid_argument("gold indices must be an object or a list");
  }
}

}  // namespace

Document Document::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("document record must be a JSON object");
  Document doc;
  if (j.contains("id")) {
    doc.id = j.at("id").get<std::string>();
  } else if (j.contains("uid")) {
    doc.id = j.at("uid").get<std::string>();
  } else {
    throw std::invalid_argument("document record has no id");
  }
  doc.pre_text = sentences(j, "pre_text");
  doc.post_text = sentences(j, "post_text");
  if (j.contains("table")) {
    for (const auto& row : j.at("table")) {
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(c.is_string() ? c.get<std::string>() : c.dump());
      doc.table.push_back(std::move(cells));
    }
  }
  if (j.contains("annotation") && j.at("annotation").contains("cur_dial")) {
    const auto& ann = j.at("annotation");
    for (const auto& turn : ann.at("cur_dial")) {
      if (!doc.question.empty()) doc.question += ' ';
      doc.question += turn.get<std::string>();
    }
    if (ann.contains("gold_ind")) collect_gold(ann.at("gold_ind"), doc.gold_ids);
  } else if (j.contains("qa")) {
    const auto& qa = j.at("qa");
    doc.question = qa.value("question", "");
    if (qa.contains("gold_inds")) collect_gold(qa.at("gold_inds"), doc.gold_ids);
  } else {
    throw std::invalid_argument("document '" + doc.id + "' has neither qa nor annotation");
  }
  return doc;
}

bool classify_numerical(std::string_view text, const NumericOptions& options) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      // Skip whole alphanumeric words so "q3" or "a1b" never count.
      if (is_alpha(text[i])) {
        while (i < text.size() && (is_alpha(text[i]) || is_digit(text[i]))) ++i;
      } else {
        ++i;
      }
      continue;
    }
    const std::size_t start = i;
    bool decorated = false;
    while (i < text.size() && (is_digit(text[i]) || (text[i] == ',' && i + 1 < text.size() &&
                                                     is_digit(text[i + 1])))) {
      decorated |= text[i] == ',';
      ++i;
    }
    if (i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1])) {
      decorated = true;
      ++i;
      while (i < text.size() && is_digit(text[i])) ++i;
    }
    const std::string_view token = text.substr(start, i - start);
    if (options.exclude_bare_years && !decorated && token.size() == 4) {
      const int value = std::stoi(std::string(token));
      const bool currency = start > 0 && text[start - 1] == '$';
      const bool percent = i < text.size() && text[i] == '%';
      if (value >= 1900 && value <= 2099 && !currency && !percent) continue;
    }
    return true;
  }
  return false;
}

std::string serialize_table_row(const std::vector<std::string>& header,
                                const std::vector<std::string>& row) {
  std::string out;
  if (row.empty()) return out;
  for (std::size_t c = 1; c < row.size(); ++c) {
    const std::string& head = c < header.size() ? header[c] : std::string();
    if (!out.empty()) out += ' ';
    out += "the " + row[0] + " of " + head + " is " + row[c] + " ;";
  }
  return out;
}

std::vector<Fact> extract_facts(const Document& doc, const NumericOptions& options) {
  std::vector<Fact> facts;
  std::size_t text_index = 0;
  for (const auto* part : {&doc.pre_text, &doc.post_text}) {
    for (const auto& sentence : *part) {
      Fact f;
      f.id = "text_" + std::to_string(text_index++);
      f.kind = FactKind::TextSentence;
      f.text = sentence;
      facts.push_back(std::move(f));
    }
  }
  const std::vector<std::string> empty;
  const auto& header = doc.table.empty() ? empty : doc.table.front();
  for (std::size_t r = 1; r < doc.table.size(); ++r) {
    Fact f;
    f.id = "table_" + std::to_string(r);
    f.kind = FactKind::TableRow;
    f.text = serialize_table_row(header, doc.table[r]);
    f.row_index = r;
    facts.push_back(std::move(f));
  }
  if (facts.empty()) throw EmptyDocument("document '" + doc.id + "' has no sentences or table rows");
  for (auto& f : facts) {
    f.is_numerical = classify_numerical(f.text, options);
    f.is_gold = doc.gold_ids.count(f.id) > 0;
  }
  return facts;
}

std::vector<std::string> bm25_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<ScoredFact> bm25_scores(std::string_view query, const std::vector<Fact>& facts,
                                    double k1, double b) {
  const double n_docs = static_cast<double>(facts.size());
  std::vector<std::unordered_map<std::string, double>> tf(facts.size());
  std::vector<double> length(facts.size());
  std::unordered_map<std::string, double> df;
  double total_length = 0.0;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    const auto tokens = bm25_tokenize(facts[i].text);
    length[i] = static_cast<double>(tokens.size());
    total_length += length[i];
    for (const auto& t : tokens) tf[i][t] += 1.0;
    for (const auto& [t, _] : tf[i]) df[t] += 1.0;
  }
  const double avg_length = n_docs > 0 ? total_length / n_docs : 0.0;

  std::vector<ScoredFact> out;
  out.reserve(facts.size());
  const auto query_tokens = bm25_tokenize(query);
  for (std::size_t i = 0; i < facts.size(); ++i) {
    double score = 0.0;
    if (avg_length > 0.0) {
      const double norm = k1 * (1.0 - b + b * length[i] / avg_length);
      for (const auto& q : query_tokens) {
        const auto it = tf[i].find(q);
        if (it == tf[i].end()) continue;
        const double n_q = df[q];
        const double idf = std::log(1.0 + (n_docs - n_q + 0.5) / (n_q + 0.5));
        score += idf * it->second * (k1 + 1.0) / (it->second + norm);
      }
    }
    out.push_back({facts[i].id, score});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredFact& a, const ScoredFact& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  return out;
}

RetrievalRanking RetrievalRanking::from_json(const nlohmann::json& j) {
  RetrievalRanking r;
  r.question_id = j.at("qid").get<std::string>();
  r.ranked = j.at("ranked").get<std::vector<std::string>>();
  std::unordered_set<std::string> seen;
  for (const auto& id : r.ranked) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument("ranking for '" + r.question_id + "' repeats fact '" + id + "'");
    }
  }
  return r;
}

double recall_at_k(const RetrievalRanking& ranking, const std::set<std::string>& gold,
                   std::size_t k) {
  if (gold.empty()) throw EmptyGold("recall needs at least one gold fact");
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const std::size_t limit = std::min(k, ranking.ranked.size());
  std::unordered_set<std::string> hits;
  for (std::size_t i = 0; i < limit; ++i) {
    if (gold.count(ranking.ranked[i])) hits.insert(ranking.ranked[i]);
  }
  return static_cast<double>(hits.size()) / static_cast<double>(gold.size());
}

}  // namespace numreason
