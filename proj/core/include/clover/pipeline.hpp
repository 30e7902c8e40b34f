#ifndef CLOVER_PIPELINE_HPP
#define CLOVER_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "clover/decide.hpp"
#include "clover/llm.hpp"
#include "clover/prompts.hpp"
#include "clover/theory.hpp"
#include "clover/verify.hpp"

namespace clover {

class PipelineError : public Error {
 public:
  using Error::Error;
};
class PrepFailed : public PipelineError {
 public:
  using PipelineError::PipelineError;
};
class EmptyParse : public PipelineError {
 public:
  using PipelineError::PipelineError;
};
class AccumulationMismatch : public PipelineError {
 public:
  using PipelineError::PipelineError;
};
class MissingFormula : public PipelineError {
 public:
  using PipelineError::PipelineError;
};
class EmptyPool : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

struct OptionChoice {
  std::string label;
  std::string text;
};

struct Problem {
  std::string id;
  std::string context;
  std::string question;
  std::vector<OptionChoice> options;  // empty for grid puzzles
  std::optional<std::string> gold;
  std::string task;
};

// PerOption: each option is checked with a solver function. ThreeValued: the
// options read true / false / unknown. Grid: no options, the answer is the
// model itself.
enum class TaskKind { PerOption, ThreeValued, Grid };
TaskKind task_kind(const Problem& problem);
const char* to_string(TaskKind kind);

struct Prep {
  std::string theory_source;
  Theory theory;
  std::vector<std::string> sentences;   // constraints
  std::optional<std::string> query;     // ThreeValued
  std::vector<OptionChoice> options;    // PerOption, restated as sentences
  int retries = 0;
};

// Everything a stage needs besides its inputs.
struct StageContext {
  LlmClient& llm;
  const PromptAssets& assets;
  LlmParams params;
  std::string task;
};

// Text between the last "```tag" line and the following "```" line.
std::optional<std::string> last_fenced_block(std::string_view text, std::string_view tag);

Prep preprocess(const Problem& problem, StageContext& ctx, int max_retries = 2);

std::optional<SolverFunction> solver_function_from_keywords(std::string_view question);
// LLM first, keywords second; `source` receives "llm" or "keywords".
std::optional<SolverFunction> select_solver_function(std::string_view question, StageContext& ctx,
                                                     std::string* source = nullptr);

struct Component {
  enum class Kind { Unit, Coupler, Dependent };
  std::string id;
  Kind kind = Kind::Unit;
  std::string text;
  bool merge = false;       // couplers: merge instead of a conjunction word
  std::string conjunction;  // couplers: the word
};

struct DependencyStructure {
  std::vector<Component> components;
  std::vector<std::pair<std::string, std::string>> edges;  // dependent -> head

  // Reason the structure breaks an invariant, if any.
  std::optional<std::string> violation() const;
  std::string to_text() const;
};

// Parses the `structures` block format; throws PipelineError on bad lines.
std::vector<DependencyStructure> parse_structures(std::string_view block);

struct ParsedStructures {
  std::vector<DependencyStructure> structures;
  std::vector<std::string> dropped;  // one reason per rejected structure
};

ParsedStructures parse_dependencies(const Theory& theory, const std::string& sentence,
                                    StageContext& ctx);

struct AccumulationSequence {
  std::size_t structure = 0;
  std::vector<std::string> sentences;
};

// Single-component structures need no accumulation and skip the LLM.
AccumulationSequence accumulate(const std::string& sentence, const DependencyStructure& structure,
                                std::size_t structure_index, StageContext& ctx);

std::vector<std::string> translate_sequence(const Theory& theory, const AccumulationSequence& accum,
                                            StageContext& ctx);

struct CloverConfig {
  std::size_t samples_per_structure = 2;
  std::size_t pool_target = 5;
};

struct Translation {
  CandidateSet set;
  nlohmann::json log;  // structures, samples with prompts' digests, skips
};

Translation clover_translate(const Theory& theory, const std::string& sentence, StageContext& ctx,
                             const CloverConfig& config = {}, const SolverOptions& solver = {});

Translation direct_translate(const Theory& theory, const std::string& sentence, StageContext& ctx,
                             std::size_t repeats = 1, const SolverOptions& solver = {});

// Judges interpretations with the disprove prompt.
class LlmOracle final : public TruthOracle {
 public:
  LlmOracle(StageContext& ctx) : ctx_(ctx) {}
  std::string label() const override { return "llm"; }
  bool judge(std::string_view sentence, const Interpretation& interp) override;

 private:
  StageContext& ctx_;
};

enum class TranslationMode { Clover, Direct };
enum class VerificationMode { Disprove, Consistency, None };

const char* to_string(TranslationMode mode);
const char* to_string(VerificationMode mode);
std::optional<TranslationMode> translation_mode_from_string(std::string_view name);
std::optional<VerificationMode> verification_mode_from_string(std::string_view name);

struct PipelineConfig {
  TranslationMode translation = TranslationMode::Clover;
  VerificationMode verification = VerificationMode::Disprove;
  CloverConfig clover;
  std::size_t direct_repeats = 1;
  int max_retries = 2;
  std::uint64_t seed = 0;
  LlmParams llm;
  SolverOptions solver;

  nlohmann::json to_json() const;
  // Same keys as to_json, all optional; unknown keys throw PipelineError.
  static PipelineConfig from_json(const nlohmann::json& doc);
};

struct ProblemResult {
  std::string id;
  std::optional<std::string> answer;
  std::optional<std::string> gold;
  bool executable = false;
  bool used_fallback = false;
  nlohmann::json trace;
  std::string digest;  // SHA-256 of the serialized trace

  bool correct() const;
};

// Compares answers line by line, ignoring case, surrounding space and line
// order (grid answers are unordered cell lists).
bool same_answer(std::string_view a, std::string_view b);

// Never throws for problem-level failures; they land in the result.
ProblemResult run_problem(const Problem& problem, LlmClient& llm, const PromptAssets& assets,
                          const PipelineConfig& config,
                          const std::optional<std::string>& fallback = std::nullopt);

// Results come back in input order regardless of `workers`.
std::vector<ProblemResult> run_problems(const std::vector<Problem>& problems, LlmClient& llm,
                                        const PromptAssets& assets, const PipelineConfig& config,
                                        const std::map<std::string, std::string>& fallbacks = {},
                                        std::size_t workers = 1);

}  // namespace clover

#endif  // CLOVER_PIPELINE_HPP
