#include <doctest.h>

#include <algorithm>
#include <map>

#include "numreason/retrieval.hpp"
#include "numreason/rng.hpp"

using namespace numreason;

namespace {

std::vector<Fact> text_facts(const std::vector<std::string>& texts) {
  std::vector<Fact> facts;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Fact f;
    f.id = "text_" + std::to_string(i);
    f.text = texts[i];
    f.is_numerical = classify_numerical(texts[i]);
    facts.push_back(f);
  }
  return facts;
}

std::map<std::string, double> by_id(const std::vector<ScoredFact>& scored) {
  std::map<std::string, double> out;
  for (const auto& s : scored) out[s.id] = s.score;
  return out;
}

// A document shaped like the motivating example: one numeric table row and
// one numeric sentence are gold, one sentence has no numbers.
const char* const kDocJson = R"({
  "id": "doc-1",
  "pre_text": ["pre-tax earnings were $3,794 million in 2008 .",
               "the company operates in three segments ."],
  "post_text": ["the effective tax rate was 4.7 percent ."],
  "table": [["", "2008", "2007"],
            ["earnings", "$ 3,794", "$ 3,510"],
            ["tax rate", "4.7%", "5.1%"]],
  "qa": {"question": "what is the ratio of earnings to the tax rate?",
         "gold_inds": {"table_1": "the earnings of 2008 is $ 3,794 ;",
                       "text_2": "the effective tax rate was 4.7 percent ."}}
})";

}  // namespace

TEST_CASE("classify_numerical") {
  CHECK(classify_numerical("pre-tax earnings were $3,794 million"));
  CHECK_FALSE(classify_numerical("the company operates in three segments"));
  CHECK_FALSE(classify_numerical(""));
  CHECK(classify_numerical("rate of 4.7%"));
  CHECK(classify_numerical("a loss of (12)"));
  CHECK(classify_numerical("in 2008 revenue grew"));
  CHECK_FALSE(classify_numerical("in q3 revenue grew"));
  CHECK_FALSE(classify_numerical("in 2008 revenue grew", NumericOptions{true}));
  CHECK(classify_numerical("in 2008 revenue grew 5", NumericOptions{true}));
  CHECK(classify_numerical("revenue of $2008", NumericOptions{true}));
  CHECK(classify_numerical("revenue of 1,200", NumericOptions{true}));
}

TEST_CASE("table row serialization") {
  CHECK(serialize_table_row({"", "2008", "2007"}, {"earnings", "$ 3,794", "$ 3,510"}) ==
        "the earnings of 2008 is $ 3,794 ; the earnings of 2007 is $ 3,510 ;");
  CHECK(serialize_table_row({"", "2008"}, {"notes", "n/a"}) == "the notes of 2008 is n/a ;");
}

TEST_CASE("extract_facts on the example document") {
  const Document doc = Document::from_json(nlohmann::json::parse(kDocJson));
  CHECK(doc.question == "what is the ratio of earnings to the tax rate?");
  const auto facts = extract_facts(doc);
  REQUIRE(facts.size() == 5);
  CHECK(facts[0].id == "text_0");
  CHECK(facts[2].id == "text_2");
  CHECK(facts[3].id == "table_1");
  CHECK(facts[3].kind == FactKind::TableRow);
  CHECK(facts[3].row_index == 1u);
  CHECK(facts[3].text == "the earnings of 2008 is $ 3,794 ; the earnings of 2007 is $ 3,510 ;");

  CHECK(facts[3].is_gold);
  CHECK(facts[3].is_numerical);
  CHECK(facts[2].is_gold);
  CHECK(facts[2].is_numerical);
  CHECK_FALSE(facts[1].is_gold);
  CHECK_FALSE(facts[1].is_numerical);
  for (const auto& f : facts) CHECK(f.is_numerical == classify_numerical(f.text));
}

TEST_CASE("extract_facts shapes") {
  Document doc;
  doc.id = "d";
  doc.pre_text = {"one sentence ."};
  CHECK(extract_facts(doc).size() == 1);

  doc.table = {{"", "2008"}, {"a", "1"}, {"b", "2"}, {"c", "3"}};
  const auto facts = extract_facts(doc);
  CHECK(std::count_if(facts.begin(), facts.end(), [](const Fact& f) { return f.kind == FactKind::TableRow; }) == 3);

  Document empty;
  empty.id = "e";
  CHECK_THROWS_AS(extract_facts(empty), EmptyDocument);
  empty.table = {{"", "2008"}};  // header only
  CHECK_THROWS_AS(extract_facts(empty), EmptyDocument);
}

TEST_CASE("conversational records") {
  const auto j = nlohmann::json::parse(R"({
    "id": "conv-1", "pre_text": ["revenue was 5 ."], "post_text": [], "table": [],
    "annotation": {"cur_dial": ["what was revenue?", "and costs?"], "gold_ind": ["text_0"]}
  })");
  const Document doc = Document::from_json(j);
  CHECK(doc.question == "what was revenue? and costs?");
  CHECK(doc.gold_ids == std::set<std::string>{"text_0"});
  CHECK_THROWS(Document::from_json(nlohmann::json::parse(R"({"id": "x"})")));
}

TEST_CASE("bm25 tokenization") {
  CHECK(bm25_tokenize("Pre-tax earnings were $3,794!") ==
        std::vector<std::string>{"pre", "tax", "earnings", "were", "3", "794"});
  CHECK(bm25_tokenize("  ").empty());
}

TEST_CASE("bm25 hand oracle, two documents") {
  // N = 2. Doc 0 has 7 tokens (pre tax earnings were 3 794 million), doc 1
  // has 6; avgdl = 6.5. "tax" and "earnings" occur once each in doc 0 only:
  // idf = ln(1 + 1.5/1.5) = ln 2; tf part = 2.2 / (1 + 1.2 * (0.25 + 0.75 * 7/6.5)).
  const auto facts = text_facts({"pre-tax earnings were $3,794 million", "the company operates in three segments"});
  const auto scores = bm25_scores("tax earnings", facts);
  const double expected = 2.0 * std::log(2.0) * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 7.0 / 6.5));
  CHECK(expected == doctest::Approx(1.3440006348484363).epsilon(1e-14));
  CHECK(by_id(scores)["text_0"] == doctest::Approx(1.3440006348484363).epsilon(1e-12));
  CHECK(by_id(scores)["text_1"] == 0.0);
  CHECK(scores[0].id == "text_0");
}

TEST_CASE("bm25 hand oracle, three documents") {
  const auto facts = text_facts({"pre-tax earnings were $3,794 million",
                                 "the tax rate was 4.7 percent of earnings before tax", "earnings grew"});
  const auto s = by_id(bm25_scores("tax earnings", facts));
  CHECK(std::fabs(s.at("text_0") - 0.5914374379129479) < 1e-9);
  CHECK(std::fabs(s.at("text_1") - 0.6518540662173177) < 1e-9);
  CHECK(std::fabs(s.at("text_2") - 0.18711405335920364) < 1e-9);
}

TEST_CASE("bm25 ordering and bag-of-words query") {
  const auto facts = text_facts({"net income rose", "net income rose", "costs fell"});
  const auto scores = bm25_scores("income net", facts);
  CHECK(scores[0].id == "text_0");
  CHECK(scores[1].id == "text_1");
  CHECK(scores[0].score == scores[1].score);
  CHECK(scores[2].score == 0.0);
  const auto a = by_id(bm25_scores("net income", facts));
  const auto b = by_id(bm25_scores("income net", facts));
  CHECK(a == b);
}

TEST_CASE("recall_at_k hand cases") {
  const RetrievalRanking r{"q", {"f1", "f3", "f2"}};
  const std::set<std::string> gold{"f1", "f2"};
  CHECK(recall_at_k(r, gold, 3) == 1.0);
  CHECK(recall_at_k(r, gold, 2) == 0.5);
  CHECK(recall_at_k(r, gold, 1) == 0.5);
  CHECK(recall_at_k(r, gold, 10) == 1.0);
  CHECK(recall_at_k(r, {"f9"}, 3) == 0.0);
  CHECK_THROWS_AS(recall_at_k(r, {}, 3), EmptyGold);
  CHECK_THROWS(recall_at_k(r, gold, 0));
}

TEST_CASE("ranking parsing") {
  const auto r = RetrievalRanking::from_json(nlohmann::json::parse(R"({"qid": "q", "ranked": ["a", "b"]})"));
  CHECK(r.ranked.size() == 2);
  CHECK_THROWS(RetrievalRanking::from_json(nlohmann::json::parse(R"({"qid": "q", "ranked": ["a", "a"]})")));
}

TEST_CASE("property: recall is monotone in k and reaches one") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    RetrievalRanking r{"q", {}};
    for (std::size_t i = 0; i < n; ++i) r.ranked.push_back("f" + std::to_string(i));
    for (std::size_t i = n; i > 1; --i) std::swap(r.ranked[i - 1], r.ranked[rng.below(i)]);
    std::set<std::string> gold;
    const std::size_t g = 1 + rng.below(n);
    for (std::size_t i = 0; i < g; ++i) gold.insert("f" + std::to_string(rng.below(n)));
    double previous = 0.0;
    for (std::size_t k = 1; k <= n + 1; ++k) {
      const double v = recall_at_k(r, gold, k);
      CHECK(v >= previous);
      previous = v;
    }
    CHECK(recall_at_k(r, gold, n) == 1.0);
  }
}
