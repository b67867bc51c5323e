#include "numreason/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "numreason/augment.hpp"
#include "numreason/consistency.hpp"
#include "numreason/executor.hpp"
#include "numreason/parallel.hpp"
#include "numreason/parser.hpp"
#include "numreason/retrieval.hpp"
#include "numreason/rng.hpp"
#include "numreason/sampling.hpp"
#include "numreason/toy_rl.hpp"

namespace numreason {

namespace {

using nlohmann::json;

// Usage, configuration and schema problems; exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unexecutable programs; exit code 2.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string_view t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// A JSON array of records or JSONL, one object per non-blank line.
std::vector<json> read_records(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<json> records;
  if (first == std::string::npos) return records;
  try {
    if (text[first] == '[') {
      for (auto& r : json::parse(text)) records.push_back(std::move(r));
    } else {
      std::istringstream lines(text);
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          records.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
          throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
        }
      }
    }
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].is_object()) {
      throw ConfigError(path + ": record " + std::to_string(i) + " is not a JSON object");
    }
  }
  return records;
}

template <typename T>
T field(const json& record, const char* name, const std::string& where) {
  if (!record.contains(name)) throw ConfigError(where + ": missing field '" + name + "'");
  try {
    return record.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": field '" + name + "' has the wrong type");
  }
}

std::string record_id(const json& record, std::size_t index) {
  if (record.contains("id") && record.at("id").is_string()) return record.at("id").get<std::string>();
  if (record.contains("uid") && record.at("uid").is_string()) return record.at("uid").get<std::string>();
  throw ConfigError("record " + std::to_string(index) + ": missing string field 'id'");
}

std::optional<Table> record_table(const json& record, const std::string& where) {
  if (!record.contains("table") || record.at("table").is_null()) return std::nullopt;
  try {
    return Table::from_json(record.at("table"));
  } catch (const std::exception& e) {
    throw ConfigError(where + ": bad table: " + e.what());
  }
}

// "program" at top level or FinQA's qa.program.
std::string record_program(const json& record, const std::string& where) {
  if (record.contains("program")) return field<std::string>(record, "program", where);
  if (record.contains("qa")) return field<std::string>(record.at("qa"), "program", where + ".qa");
  throw ConfigError(where + ": missing field 'program' or 'qa.program'");
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

void emit_warning(std::ostream& err, const std::string& id, const std::string& message) {
  err << json{{"warning", message}, {"id", id}}.dump() << '\n';
}

struct Options {
  std::string subcommand;
  std::map<std::string, std::string> paths;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  ToleranceConfig tolerance;
  SamplingConfig sampling;
  AugmentConfig augment;
  TrainConfig rl;
  std::string strategy = "number_aware";
  std::string rules = "switch,add_sub,mul_div,mul_div_one";
  std::string const_pool = "const_2,const_3,const_4,const_5,const_6,const_7";
  std::string add_sub_const;
  std::string mul_div_const;
  std::string mul_div_one_mode = "multiply";
  std::size_t max_switch = 63;
  std::string topk = "3,5";
  bool exclude_bare_years = false;
  bool no_exact = false;
  std::string program;    // exec
  std::string candidate;  // reward
  std::string gold_program;

  // Thread count is left out so outputs are byte-identical across it.
  json run_config() const {
    return {{"subcommand", subcommand},
            {"inputs", paths},
            {"seed", seed},
            {"tolerance", tolerance.to_json()},
            {"sampling", sampling.to_json()},
            {"augment", augment.to_json()},
            {"rl", rl.to_json()}};
  }

  json provenance() const { return {{"format_version", kFormatVersion}, {"run_config", run_config()}}; }

  // Resolves string-typed flags into the typed configs.
  void finalize() {
    sampling.seed = seed;
    augment.seed = seed;
    rl.seed = seed;
    const auto strategy_value = strategy_from_name(strategy);
    if (!strategy_value) throw ConfigError("unknown strategy '" + strategy + "'");
    sampling.strategy = *strategy_value;
    if (paths.count("scores")) sampling.scores_path = paths.at("scores");

    augment.enable_switch = augment.enable_add_sub = augment.enable_mul_div =
        augment.enable_mul_div_one = false;
    for (const auto& tag : split_list(rules)) {
      const auto rule = rule_from_tag(tag);
      if (!rule) throw ConfigError("unknown augmentation rule '" + tag + "'");
      switch (*rule) {
        case AugmentRule::Switch: augment.enable_switch = true; break;
        case AugmentRule::AddSub: augment.enable_add_sub = true; break;
        case AugmentRule::MulDiv: augment.enable_mul_div = true; break;
        case AugmentRule::MulDivOne: augment.enable_mul_div_one = true; break;
      }
    }
    augment.constant_pool = split_list(const_pool);
    if (!add_sub_const.empty()) augment.add_sub_constant = add_sub_const;
    if (!mul_div_const.empty()) augment.mul_div_constant = mul_div_const;
    if (mul_div_one_mode == "multiply") {
      augment.mul_div_one_mode = MulDivOneMode::Multiply;
    } else if (mul_div_one_mode == "divide") {
      augment.mul_div_one_mode = MulDivOneMode::Divide;
    } else {
      throw ConfigError("--mul-div-one must be multiply or divide");
    }
    augment.max_switch_variants = max_switch == 0 ? std::nullopt : std::optional<std::size_t>(max_switch);
    try {
      augment.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (tolerance.round_digits < 0 || tolerance.round_digits > 15) {
      throw ConfigError("--round-digits must be in [0, 15]");
    }
  }

  ConstTable consts() const {
    if (!paths.count("consts")) return ConstTable{};
    try {
      return ConstTable::from_json(read_json_file(paths.at("consts")));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  std::optional<Table> table() const {
    if (!paths.count("table")) return std::nullopt;
    try {
      return Table::from_json(read_json_file(paths.at("table")));
    } catch (const TableError& e) {
      throw ConfigError(e.what());
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad table: ") + e.what());
    }
  }

  const std::string& path(const char* name) const {
    static const std::string dash = "-";
    const auto it = paths.find(name);
    return it == paths.end() ? dash : it->second;
  }
};

int cmd_exec(const Options& opt, std::ostream& out) {
  const auto table = opt.table();
  const ConstTable consts = opt.consts();
  Program program = [&] {
    try {
      return parse_program(opt.program);
    } catch (const ParseError& e) {
      throw DomainError("ParseError", e.what());
    }
  }();
  try {
    const ExecValue value = execute(program, table ? &*table : nullptr, consts);
    out << format_value(value, opt.tolerance.round_digits) << '\n';
  } catch (const ExecError& e) {
    throw DomainError(std::string(exec_error_name(e.kind())), e.what());
  }
  return kExitOk;
}

int cmd_augment(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto records = read_records(opt.path("input"));
  const ConstTable consts = opt.consts();

  struct Item {
    std::string id;
    json line;
    std::string warning;
  };
  std::vector<Item> items(records.size());
  parallel_for(records.size(), opt.threads, [&](std::size_t i) {
    const json& record = records[i];
    Item& item = items[i];
    item.id = record_id(record, i);
    const std::string where = "record '" + item.id + "'";
    const std::string text = record_program(record, where);
    const auto table = record_table(record, where);
    AugmentConfig cfg = opt.augment;
    cfg.seed = derive_seed(opt.seed, item.id);
    try {
      const Program program = parse_program(text);
      const AugmentedSet set = augment_all(program, cfg, table ? &*table : nullptr, consts, opt.tolerance);
      item.line = set.to_json(item.id);
      if (set.dropped > 0) item.line["dropped"] = set.dropped;
    } catch (const ParseError& e) {
      item.warning = std::string("ParseError: ") + e.what();
    } catch (const OriginalUnexecutable& e) {
      item.warning = std::string("OriginalUnexecutable: ") + e.what();
    }
    if (!item.warning.empty()) {
      item.line = {{"id", item.id}, {"program", text}, {"variants", json::array()}, {"error", item.warning}};
    }
  });

  Output sink(opt.path("output"), out);
  *sink << opt.provenance().dump() << '\n';
  for (const auto& item : items) {
    if (!item.warning.empty()) emit_warning(err, item.id, item.warning);
    *sink << item.line.dump() << '\n';
  }
  return kExitOk;
}

ExecValue parse_answer(const json& answer, const std::string& where) {
  if (answer.is_boolean()) return ExecValue::boolean(answer.get<bool>());
  if (answer.is_number()) return ExecValue::number(answer.get<double>());
  if (answer.is_string()) {
    const std::string s = answer.get<std::string>();
    if (s == "yes" || s == "true") return ExecValue::boolean(true);
    if (s == "no" || s == "false") return ExecValue::boolean(false);
    if (auto v = parse_numeric_cell(s)) return ExecValue::number(*v);
  }
  throw ConfigError(where + ": exe_ans must be a number, yes or no");
}

GoldItem gold_item(const json& record, std::size_t index, const ConstTable& consts) {
  const std::string id = record_id(record, index);
  const std::string where = "gold '" + id + "'";
  const std::string text = record_program(record, where);
  auto table = record_table(record, where);
  Program program = [&] {
    try {
      return parse_program(text);
    } catch (const ParseError& e) {
      throw ConfigError(where + ": unparseable gold program: " + e.what());
    }
  }();
  std::optional<ExecValue> answer;
  if (record.contains("qa") && record.at("qa").contains("exe_ans")) {
    answer = parse_answer(record.at("qa").at("exe_ans"), where);
  } else if (record.contains("exe_ans")) {
    answer = parse_answer(record.at("exe_ans"), where);
  } else {
    try {
      answer = execute(program, table ? &*table : nullptr, consts);
    } catch (const ExecError& e) {
      throw ConfigError(where + ": gold program does not execute: " + e.what());
    }
  }
  return GoldItem{id, std::move(program), std::move(table), *answer};
}

int cmd_eval(const Options& opt, std::ostream& out) {
  const ConstTable consts = opt.consts();
  const auto pred_records = read_records(opt.path("preds"));
  const auto gold_records = read_records(opt.path("gold"));
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i < pred_records.size(); ++i) {
    const std::string id = record_id(pred_records[i], i);
    preds.push_back({id, field<std::string>(pred_records[i], "predicted", "prediction '" + id + "'")});
  }
  std::vector<GoldItem> golds;
  for (std::size_t i = 0; i < gold_records.size(); ++i) golds.push_back(gold_item(gold_records[i], i, consts));

  EvalReport report;
  try {
    report = evaluate_predictions(preds, golds, consts, opt.tolerance, opt.threads);
  } catch (const MissingId& e) {
    throw ConfigError(e.what());
  }
  json j = opt.provenance();
  j.update(report.to_json());
  Output sink(opt.path("output"), out);
  *sink << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_sample_negatives(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    opt.sampling.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ScoreTable scores;
  if (opt.sampling.strategy == SamplingStrategy::SelfMining) {
    std::ifstream in(*opt.sampling.scores_path);
    if (!in) throw ConfigError("cannot open score file '" + *opt.sampling.scores_path + "'");
    try {
      scores = load_score_table(in);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  const auto records = read_records(opt.path("input"));
  const NumericOptions numeric{opt.exclude_bare_years};

  struct Item {
    std::string id;
    std::vector<std::string> lines;
    std::vector<std::string> warnings;
  };
  std::vector<Item> items(records.size());
  parallel_for(records.size(), opt.threads, [&](std::size_t i) {
    Item& item = items[i];
    Document doc;
    try {
      doc = Document::from_json(records[i]);
    } catch (const std::exception& e) {
      throw ConfigError("record " + std::to_string(i) + ": " + e.what());
    }
    item.id = doc.id;
    SamplingConfig cfg = opt.sampling;
    cfg.seed = derive_seed(opt.seed, doc.id);
    const std::map<std::string, double>* doc_scores = nullptr;
    if (cfg.strategy == SamplingStrategy::SelfMining) {
      const auto it = scores.find(doc.id);
      if (it == scores.end()) throw ConfigError("score file has no entry for '" + doc.id + "'");
      doc_scores = &it->second;
    }
    try {
      const auto facts = extract_facts(doc, numeric);
      if (std::none_of(facts.begin(), facts.end(), [](const Fact& f) { return f.is_gold; })) {
        item.warnings.push_back("no gold facts; skipped");
        return;
      }
      SampleResult result = sample_negatives(doc.question, facts, cfg, doc_scores);
      item.warnings = std::move(result.warnings);
      for (const auto& pair : result.pairs) item.lines.push_back(pair.to_json().dump());
    } catch (const EmptyDocument& e) {
      item.warnings.push_back(std::string("EmptyDocument: ") + e.what());
    } catch (const NoNegativesAvailable& e) {
      item.warnings.push_back(std::string("NoNegativesAvailable: ") + e.what());
    }
  });

  Output sink(opt.path("output"), out);
  *sink << opt.provenance().dump() << '\n';
  for (const auto& item : items) {
    for (const auto& w : item.warnings) emit_warning(err, item.id, w);
    for (const auto& line : item.lines) *sink << line << '\n';
  }
  return kExitOk;
}

int cmd_reward(const Options& opt, std::ostream& out) {
  const ConstTable consts = opt.consts();
  std::optional<Table> table = opt.table();
  std::string gold_text = opt.gold_program;
  if (opt.paths.count("gold_record")) {
    const json record = read_json_file(opt.paths.at("gold_record"));
    if (!record.is_object()) throw ConfigError("gold record must be a JSON object");
    gold_text = record_program(record, "gold record");
    if (!table) table = record_table(record, "gold record");
  }
  if (gold_text.empty()) throw ConfigError("reward needs --gold or --gold-record");
  Program gold = [&] {
    try {
      return parse_program(gold_text);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("unparseable gold program: ") + e.what());
    }
  }();
  RewardOutcome outcome;
  try {
    outcome = reward(opt.candidate, gold, table ? &*table : nullptr, consts, opt.tolerance);
  } catch (const GoldUnexecutable& e) {
    throw ConfigError(e.what());
  }
  json j = opt.provenance();
  j.update(outcome.to_json());
  Output sink(opt.path("output"), out);
  *sink << j.dump(2) << '\n';
  return kExitOk;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_rl_demo(const Options& opt, std::ostream& out, std::ostream& err) {
  std::size_t max_length = 4;
  ToyTask task = default_toy_task();
  if (opt.paths.count("task")) {
    try {
      task = toy_task_from_json(read_json_file(opt.paths.at("task")), max_length);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad task file: ") + e.what());
    }
  }
  task.tolerance = opt.tolerance;
  TrainConfig cfg = opt.rl;
  if (opt.no_exact) cfg.eval_every = 0;
  TrainResult result = [&] {
    try {
      return train_toy(task, max_length, cfg);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  for (const auto& w : result.warnings) emit_warning(err, "rl-demo", w);

  std::optional<double> final_exact;
  if (!opt.no_exact) {
    try {
      final_exact = exact_expected_reward(result.policy, task);
    } catch (const EnumerationTooLarge& e) {
      if (result.warnings.empty()) emit_warning(err, "rl-demo", e.what());
    }
  }

  {
    Output curve(opt.path("curve"), out);
    *curve << "# " << opt.provenance().dump() << '\n';
    *curve << "step,avg_reward,exact_expected_reward\n";
    for (const auto& p : result.curve) {
      *curve << p.step << ',' << format_double(p.avg_reward) << ',';
      if (p.exact_expected_reward) *curve << format_double(*p.exact_expected_reward);
      *curve << '\n';
    }
  }
  if (opt.paths.count("policy")) {
    json j = opt.provenance();
    j["policy"] = result.policy.to_json(task.vocab);
    j["final_exact_expected_reward"] = final_exact ? json(*final_exact) : json(nullptr);
    Output sink(opt.paths.at("policy"), out);
    *sink << j.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_recall(const Options& opt, std::ostream& out, std::ostream& err) {
  std::vector<std::size_t> ks;
  for (const auto& k : split_list(opt.topk)) {
    try {
      const long v = std::stol(k);
      if (v < 1) throw std::invalid_argument("k");
      ks.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError("--topk entries must be positive integers");
    }
  }
  if (ks.empty()) throw ConfigError("--topk is empty");

  std::map<std::string, RetrievalRanking> rankings;
  for (const auto& record : read_records(opt.path("rankings"))) {
    try {
      auto r = RetrievalRanking::from_json(record);
      rankings[r.question_id] = std::move(r);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad ranking record: ") + e.what());
    }
  }
  std::vector<Document> docs;
  for (const auto& record : read_records(opt.path("gold"))) {
    try {
      docs.push_back(Document::from_json(record));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad dataset record: ") + e.what());
    }
  }

  std::map<std::size_t, double> totals;
  std::size_t counted = 0;
  for (const auto& doc : docs) {
    if (doc.gold_ids.empty()) {
      emit_warning(err, doc.id, "no gold facts; excluded from recall");
      continue;
    }
    const auto it = rankings.find(doc.id);
    RetrievalRanking empty{doc.id, {}};
    if (it == rankings.end()) emit_warning(err, doc.id, "no ranking; counted as recall 0");
    const RetrievalRanking& ranking = it == rankings.end() ? empty : it->second;
    for (std::size_t k : ks) totals[k] += recall_at_k(ranking, doc.gold_ids, k);
    ++counted;
  }
  json recall = json::object();
  for (std::size_t k : ks) {
    recall[std::to_string(k)] = counted == 0 ? 0.0 : totals[k] / static_cast<double>(counted);
  }
  json j = opt.provenance();
  j["recall"] = recall;
  j["questions"] = counted;
  Output sink(opt.path("output"), out);
  *sink << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toolkit for numerical reasoning programs: execution, augmentation, rewards, "
               "retriever data and metrics"};
  app.require_subcommand(1);
  Options opt;

  auto add_tolerance = [&](CLI::App* sub) {
    sub->add_option("--abs-tol", opt.tolerance.abs_tol, "absolute tolerance")->capture_default_str();
    sub->add_option("--rel-tol", opt.tolerance.rel_tol, "relative tolerance")->capture_default_str();
    sub->add_option("--round-digits", opt.tolerance.round_digits, "decimals kept before comparing")
        ->capture_default_str();
  };
  auto add_path = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                      const std::string& help, bool required) {
    auto* o = sub->add_option_function<std::string>(
        flag, [&opt, key](const std::string& v) { opt.paths[key] = v; }, help);
    if (required) o->required();
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "global seed")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads")->capture_default_str();
  };

  auto* exec = app.add_subcommand("exec", "execute a program and print its value");
  exec->add_option("program", opt.program, "program text")->required();
  add_path(exec, "--table", "table", "table JSON", false);
  add_path(exec, "--consts", "consts", "constant table JSON", false);
  add_tolerance(exec);

  auto* augment = app.add_subcommand("augment", "expand gold programs with result-preserving rewrites");
  add_path(augment, "--input", "input", "gold JSONL (id + program or qa.program)", true);
  add_path(augment, "--output", "output", "output JSONL (default stdout)", false);
  add_path(augment, "--consts", "consts", "constant table JSON", false);
  augment->add_option("--rules", opt.rules, "comma-separated rule tags")->capture_default_str();
  augment->add_option("--const-pool", opt.const_pool, "random constant pool")->capture_default_str();
  augment->add_option("--add-sub-const", opt.add_sub_const, "fixed Add & Subtract constant");
  augment->add_option("--mul-div-const", opt.mul_div_const, "fixed Multiply & Divide constant");
  augment->add_option("--mul-div-one", opt.mul_div_one_mode, "multiply or divide")->capture_default_str();
  augment->add_option("--max-switch", opt.max_switch, "switch variant cap (0 = no cap)")->capture_default_str();
  add_tolerance(augment);
  add_common(augment);

  auto* eval = app.add_subcommand("eval", "execution and program accuracy");
  add_path(eval, "--preds", "preds", "predictions JSONL {id, predicted}", true);
  add_path(eval, "--gold", "gold", "gold records (FinQA layout)", true);
  add_path(eval, "--output", "output", "report JSON (default stdout)", false);
  add_path(eval, "--consts", "consts", "constant table JSON", false);
  add_tolerance(eval);
  add_common(eval);

  auto* sample = app.add_subcommand("sample-negatives", "build retriever training pairs");
  add_path(sample, "--input", "input", "dataset JSON or JSONL (FinQA layout)", true);
  add_path(sample, "--output", "output", "pairs JSONL (default stdout)", false);
  add_path(sample, "--scores", "scores", "retriever scores JSONL for self-mining", false);
  sample->add_option("--strategy", opt.strategy, "random|bm25|self-mining|number-aware")->capture_default_str();
  sample->add_option("--ratio-n", opt.sampling.ratio_n, "negatives per positive")->capture_default_str();
  sample->add_option("--k1", opt.sampling.k1, "BM25 k1")->capture_default_str();
  sample->add_option("--b", opt.sampling.b, "BM25 b")->capture_default_str();
  sample->add_flag("--exclude-bare-years", opt.exclude_bare_years, "do not count 19xx/20xx as numbers");
  add_common(sample);

  auto* rew = app.add_subcommand("reward", "consistency reward of a candidate program");
  rew->add_option("--candidate", opt.candidate, "candidate program text")->required();
  rew->add_option("--gold", opt.gold_program, "gold program text");
  add_path(rew, "--gold-record", "gold_record", "gold record JSON (FinQA layout)", false);
  add_path(rew, "--table", "table", "table JSON", false);
  add_path(rew, "--consts", "consts", "constant table JSON", false);
  add_path(rew, "--output", "output", "reward JSON (default stdout)", false);
  add_tolerance(rew);

  auto* rl = app.add_subcommand("rl-demo", "train the tabular policy with the consistency reward");
  add_path(rl, "--task", "task", "toy task JSON (default: built-in Add(1, 2) task)", false);
  add_path(rl, "--curve", "curve", "reward curve CSV (default stdout)", false);
  add_path(rl, "--policy", "policy", "final policy JSON", false);
  rl->add_option("--steps", opt.rl.steps, "training steps")->capture_default_str();
  rl->add_option("--lr", opt.rl.lr, "learning rate")->capture_default_str();
  rl->add_option("--eval-every", opt.rl.eval_every, "exact evaluation period")->capture_default_str();
  rl->add_flag("--no-exact", opt.no_exact, "skip exact expected-reward evaluation");
  rl->add_option("--seed", opt.seed, "global seed")->capture_default_str();
  add_tolerance(rl);

  auto* rec = app.add_subcommand("recall", "Recall@k of retriever rankings");
  add_path(rec, "--rankings", "rankings", "rankings JSONL {qid, ranked}", true);
  add_path(rec, "--gold", "gold", "dataset with gold fact ids", true);
  add_path(rec, "--output", "output", "report JSON (default stdout)", false);
  rec->add_option("--topk", opt.topk, "comma-separated k values")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    opt.subcommand = app.get_subcommands().front()->get_name();
    opt.finalize();
    if (opt.subcommand == "exec") return cmd_exec(opt, out);
    if (opt.subcommand == "augment") return cmd_augment(opt, out, err);
    if (opt.subcommand == "eval") return cmd_eval(opt, out);
    if (opt.subcommand == "sample-negatives") return cmd_sample_negatives(opt, out, err);
    if (opt.subcommand == "reward") return cmd_reward(opt, out);
    if (opt.subcommand == "rl-demo") return cmd_rl_demo(opt, out, err);
    if (opt.subcommand == "recall") return cmd_recall(opt, out, err);
  } catch (const DomainError& e) {
    emit_error(err, e.kind(), e.what());
    return kExitDomain;
  } catch (const ConfigError& e) {
    emit_error(err, "ConfigError", e.what());
    return kExitUsage;
  } catch (const MissingScores& e) {
    emit_error(err, "MissingScores", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    emit_error(err, "Error", e.what());
    return kExitUsage;
  }
  emit_error(err, "ConfigError", "unknown subcommand");
  return kExitUsage;
}

}  // namespace numreason
