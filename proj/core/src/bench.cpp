#include "clover/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace clover {

namespace {

std::string row_prefix(std::optional<std::size_t> row) {
  return row ? "row " + std::to_string(*row) + ": " : std::string();
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw SchemaError("grid value must be a string or number, got " + v.dump());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string join_sorted(std::vector<std::string> lines) {
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += (out.empty() ? "" : "\n") + l;
  return out;
}

double as_double(const Ratio& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

nlohmann::json ratio_json(const std::optional<Ratio>& r) {
  return r ? nlohmann::json(as_double(*r)) : nlohmann::json(nullptr);
}

nlohmann::json ratio_exact(const std::optional<Ratio>& r) {
  if (!r) return nullptr;
  return std::to_string(r->numerator()) + "/" + std::to_string(r->denominator());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::optional<Ratio> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return Ratio(static_cast<long long>(num), static_cast<long long>(den));
}

}  // namespace

SchemaError::SchemaError(const std::string& what, std::optional<std::size_t> row)
    : Error(row_prefix(row) + what), row_(row) {}

const char* to_string(AnswerKind kind) {
  return kind == AnswerKind::MultipleChoice ? "multiple-choice" : "zebra-grid";
}

std::optional<AnswerKind> answer_kind_from_string(std::string_view name) {
  if (name == "multiple-choice") return AnswerKind::MultipleChoice;
  if (name == "zebra-grid") return AnswerKind::ZebraGrid;
  return std::nullopt;
}

std::string normalize_grid(const nlohmann::json& gold) {
  std::vector<std::string> lines;
  if (gold.is_string()) {
    std::istringstream in(gold.get<std::string>());
    std::string line;
    while (std::getline(in, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  } else if (gold.is_object() && gold.contains("header") && gold.contains("rows")) {
    auto header = gold.at("header").get<std::vector<std::string>>();
    if (header.size() < 2) throw SchemaError("grid header needs a house column and a feature");
    for (const auto& row : gold.at("rows")) {
      if (!row.is_array() || row.size() != header.size()) throw SchemaError("grid row does not match header");
      std::string house = scalar_text(row[0]);
      for (std::size_t j = 1; j < header.size(); ++j)
        lines.push_back(lower(header[j]) + "(" + house + ") = " + scalar_text(row[j]));
    }
  } else if (gold.is_object()) {
    for (const auto& [cell, value] : gold.items()) lines.push_back(cell + " = " + scalar_text(value));
  } else {
    throw SchemaError("grid answer must be an object or a string");
  }
  if (lines.empty()) throw SchemaError("empty grid answer");
  return join_sorted(std::move(lines));
}

Dataset parse_dataset(const nlohmann::json& doc, std::optional<AnswerKind> expect) {
  if (!doc.is_object() || !doc.contains("problems") || !doc.at("problems").is_array())
    throw SchemaError("dataset must be an object with a `problems` array");
  Dataset ds;
  ds.name = doc.value("name", "");
  std::set<std::string> ids;
  std::set<AnswerKind> kinds;
  const auto& rows = doc.at("problems");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto text = [&](const char* key, bool required) -> std::string {
      if (!r.contains(key)) {
        if (required) throw SchemaError(std::string("missing `") + key + "`", i);
        return {};
      }
      if (!r.at(key).is_string()) throw SchemaError(std::string("`") + key + "` must be a string", i);
      return r.at(key).get<std::string>();
    };
    if (!r.is_object()) throw SchemaError("problem must be an object", i);
    Problem p;
    p.id = text("id", true);
    p.context = text("context", true);
    p.question = text("question", true);
    p.task = r.contains("task") ? text("task", true) : ds.name;
    if (!ids.insert(p.id).second) throw SchemaError("duplicate id " + p.id, i);
    if (r.contains("options")) {
      if (!r.at("options").is_array()) throw SchemaError("`options` must be an array", i);
      for (const auto& o : r.at("options")) {
        if (!o.is_object() || !o.contains("label") || !o.contains("text") || !o.at("label").is_string() ||
            !o.at("text").is_string())
          throw SchemaError("option needs string `label` and `text`", i);
        p.options.push_back({o.at("label").get<std::string>(), o.at("text").get<std::string>()});
      }
    }
    AnswerKind kind = p.options.empty() ? AnswerKind::ZebraGrid : AnswerKind::MultipleChoice;
    if (expect && kind != *expect)
      throw SchemaError(std::string("expected a ") + to_string(*expect) + " problem", i);
    if (!r.contains("answer") || r.at("answer").is_null()) throw SchemaError("missing gold `answer`", i);
    const auto& answer = r.at("answer");
    if (kind == AnswerKind::MultipleChoice) {
      if (!answer.is_string()) throw SchemaError("multiple-choice answer must be an option label", i);
      std::string label = answer.get<std::string>();
      bool known = std::any_of(p.options.begin(), p.options.end(),
                               [&](const OptionChoice& o) { return o.label == label; });
      if (!known) throw SchemaError("answer " + label + " is not an option label", i);
      p.gold = label;
    } else {
      try {
        p.gold = normalize_grid(answer);
      } catch (const SchemaError& e) {
        throw SchemaError(e.what(), i);
      }
    }
    kinds.insert(kind);
    ds.problems.push_back(std::move(p));
  }
  if (kinds.size() == 1) ds.kind = *kinds.begin();
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<AnswerKind> expect) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open dataset " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("dataset " + path.string() + " is not JSON: " + e.what());
  }
  return parse_dataset(doc, expect);
}

std::optional<Ratio> MetricsReport::accuracy() const { return ratio(correct, total); }
std::optional<Ratio> MetricsReport::execution_rate() const { return ratio(executable, total); }
std::optional<Ratio> MetricsReport::execution_accuracy() const { return ratio(correct_executable, executable); }
std::optional<Ratio> MetricsReport::program_accuracy() const { return ratio(correct_executable, total); }

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"id", r.id},
                         {"executable", r.executable},
                         {"usedFallback", r.used_fallback},
                         {"predicted", r.predicted ? nlohmann::json(*r.predicted) : nlohmann::json(nullptr)},
                         {"gold", r.gold ? nlohmann::json(*r.gold) : nlohmann::json(nullptr)},
                         {"correct", r.correct}});
  return {{"counts",
           {{"total", total}, {"executable", executable}, {"correct", correct},
            {"correctExecutable", correct_executable}}},
          {"accuracy", ratio_json(accuracy())},
          {"programAccuracy", ratio_json(program_accuracy())},
          {"executionRate", ratio_json(execution_rate())},
          {"executionAccuracy", ratio_json(execution_accuracy())},
          {"exact",
           {{"accuracy", ratio_exact(accuracy())},
            {"programAccuracy", ratio_exact(program_accuracy())},
            {"executionRate", ratio_exact(execution_rate())},
            {"executionAccuracy", ratio_exact(execution_accuracy())}}},
          {"problems", rows_json}};
}

std::string MetricsReport::to_csv() const {
  std::string out = "id,executable,usedFallback,predicted,gold,correct\n";
  auto flag = [](bool b) { return b ? "true" : "false"; };
  for (const auto& r : rows)
    out += csv_field(r.id) + "," + flag(r.executable) + "," + flag(r.used_fallback) + "," +
           csv_field(r.predicted.value_or("")) + "," + csv_field(r.gold.value_or("")) + "," + flag(r.correct) + "\n";
  return out;
}

MetricsReport score(const std::vector<ProblemResult>& results, const Dataset& dataset) {
  std::map<std::string, const ProblemResult*> by_id;
  for (const auto& r : results)
    if (!by_id.emplace(r.id, &r).second) throw IdMismatch("result " + r.id + " appears twice");
  if (results.size() != dataset.problems.size())
    throw IdMismatch(std::to_string(results.size()) + " results for " + std::to_string(dataset.problems.size()) +
                     " problems");
  MetricsReport report;
  for (const auto& p : dataset.problems) {
    auto it = by_id.find(p.id);
    if (it == by_id.end()) throw IdMismatch("no result for problem " + p.id);
    const ProblemResult& r = *it->second;
    ScoreRow row{p.id, r.executable, r.used_fallback, r.answer, p.gold, false};
    row.correct = row.predicted && row.gold && same_answer(*row.predicted, *row.gold);
    ++report.total;
    report.executable += row.executable;
    report.correct += row.correct;
    report.correct_executable += row.correct && row.executable;
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::json results_to_json(const std::vector<ProblemResult>& results) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : results)
    out.push_back({{"id", r.id},
                   {"answer", r.answer ? nlohmann::json(*r.answer) : nlohmann::json(nullptr)},
                   {"executable", r.executable},
                   {"usedFallback", r.used_fallback},
                   {"digest", r.digest}});
  return out;
}

std::vector<ProblemResult> results_from_json(const nlohmann::json& doc) {
  const nlohmann::json& rows = doc.is_object() && doc.contains("results") ? doc.at("results") : doc;
  if (!rows.is_array()) throw SchemaError("results must be an array");
  std::vector<ProblemResult> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.is_object() || !r.contains("id") || !r.at("id").is_string())
      throw SchemaError("result needs a string `id`", i);
    ProblemResult p;
    p.id = r.at("id").get<std::string>();
    if (r.contains("answer") && !r.at("answer").is_null()) {
      if (!r.at("answer").is_string()) throw SchemaError("`answer` must be a string", i);
      p.answer = r.at("answer").get<std::string>();
    }
    p.executable = r.value("executable", false);
    p.used_fallback = r.value("usedFallback", false);
    p.digest = r.value("digest", "");
    out.push_back(std::move(p));
  }
  return out;
}

std::string percent(const std::optional<Ratio>& r) {
  if (!r) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * as_double(*r));
  return buf;
}

std::vector<AblationSetting> ablation_grid() {
  return {
      {"direct", "none", TranslationMode::Direct, 1, VerificationMode::None},
      {"direct (5x)", "logical consistency", TranslationMode::Direct, 5, VerificationMode::Consistency},
      {"compositional", "none", TranslationMode::Clover, 1, VerificationMode::None},
      {"compositional", "logical consistency", TranslationMode::Clover, 1, VerificationMode::Consistency},
      {"compositional", "disproving", TranslationMode::Clover, 1, VerificationMode::Disprove},
  };
}

std::vector<AblationRow> run_ablation_grid(const Dataset& dataset, LlmClient& llm, const PromptAssets& assets,
                                           const PipelineConfig& base,
                                           const std::map<std::string, std::string>& fallbacks,
                                           std::size_t workers) {
  std::vector<AblationRow> rows;
  for (const auto& setting : ablation_grid()) {
    PipelineConfig config = base;
    config.translation = setting.translation_mode;
    config.direct_repeats = setting.direct_repeats;
    config.verification = setting.verification_mode;
    auto results = run_problems(dataset.problems, llm, assets, config, fallbacks, workers);
    rows.push_back({setting, score(results, dataset)});
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "translation,verification,accuracy,programAccuracy,executionRate,executionAccuracy\n";
  for (const auto& r : rows)
    out += csv_field(r.setting.translation) + "," + csv_field(r.setting.verification) + "," +
           percent(r.report.accuracy()) + "," + percent(r.report.program_accuracy()) + "," +
           percent(r.report.execution_rate()) + "," + percent(r.report.execution_accuracy()) + "\n";
  return out;
}

nlohmann::json ablation_json(const std::vector<AblationRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json m = r.report.to_json();
    m.erase("problems");
    out.push_back({{"translation", r.setting.translation}, {"verification", r.setting.verification}, {"metrics", m}});
  }
  return out;
}

}  // namespace clover
