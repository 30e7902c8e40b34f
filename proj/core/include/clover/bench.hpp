#ifndef CLOVER_BENCH_HPP
#define CLOVER_BENCH_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <nlohmann/json.hpp>

#include "clover/pipeline.hpp"

namespace clover {

class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::optional<std::size_t> row = std::nullopt);
  std::optional<std::size_t> row() const { return row_; }

 private:
  std::optional<std::size_t> row_;
};

class IdMismatch : public Error {
 public:
  using Error::Error;
};

enum class AnswerKind { MultipleChoice, ZebraGrid };
const char* to_string(AnswerKind kind);
std::optional<AnswerKind> answer_kind_from_string(std::string_view name);

struct Dataset {
  std::string name;
  std::optional<AnswerKind> kind;  // set when every row has the same kind
  std::vector<Problem> problems;
};

// Gold grids become sorted "feature(house) = value" lines. Accepts a
// {"cell": value} object, a {"header": [...], "rows": [[house, ...]]} table or
// a string of lines.
std::string normalize_grid(const nlohmann::json& gold);

// Rows: {id, context, question, options?: [{label, text}], answer, task}.
// With `expect`, every row must be of that kind. Throws SchemaError.
Dataset parse_dataset(const nlohmann::json& doc, std::optional<AnswerKind> expect = std::nullopt);
Dataset load_dataset(const std::filesystem::path& path, std::optional<AnswerKind> expect = std::nullopt);

using Ratio = boost::rational<long long>;

struct ScoreRow {
  std::string id;
  bool executable = false;
  bool used_fallback = false;
  std::optional<std::string> predicted;
  std::optional<std::string> gold;
  bool correct = false;
};

struct MetricsReport {
  std::size_t total = 0;
  std::size_t executable = 0;
  std::size_t correct = 0;             // fallback answers included
  std::size_t correct_executable = 0;
  std::vector<ScoreRow> rows;

  // Absent on a zero denominator.
  std::optional<Ratio> accuracy() const;
  std::optional<Ratio> execution_rate() const;
  std::optional<Ratio> execution_accuracy() const;
  std::optional<Ratio> program_accuracy() const;

  nlohmann::json to_json() const;
  // id,executable,usedFallback,predicted,gold,correct
  std::string to_csv() const;
};

// Correctness is judged against the dataset's gold, not the result's copy.
// Throws IdMismatch unless results and dataset cover the same ids.
MetricsReport score(const std::vector<ProblemResult>& results, const Dataset& dataset);

// {id, answer, executable, usedFallback} per result; enough to rescore.
nlohmann::json results_to_json(const std::vector<ProblemResult>& results);
std::vector<ProblemResult> results_from_json(const nlohmann::json& doc);

// Percent with one decimal, "-" when absent.
std::string percent(const std::optional<Ratio>& r);

struct AblationSetting {
  std::string translation;   // row label
  std::string verification;  // row label
  TranslationMode translation_mode = TranslationMode::Clover;
  std::size_t direct_repeats = 1;
  VerificationMode verification_mode = VerificationMode::Disprove;
};

// direct/none, direct (5x)/logical consistency, compositional/none,
// compositional/logical consistency, compositional/disproving.
std::vector<AblationSetting> ablation_grid();

struct AblationRow {
  AblationSetting setting;
  MetricsReport report;
};

std::vector<AblationRow> run_ablation_grid(const Dataset& dataset, LlmClient& llm, const PromptAssets& assets,
                                           const PipelineConfig& base,
                                           const std::map<std::string, std::string>& fallbacks = {},
                                           std::size_t workers = 1);

// translation,verification,accuracy,programAccuracy,executionRate,executionAccuracy
std::string ablation_csv(const std::vector<AblationRow>& rows);
nlohmann::json ablation_json(const std::vector<AblationRow>& rows);

}  // namespace clover

#endif  // CLOVER_BENCH_HPP
