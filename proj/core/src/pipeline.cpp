#include "clover/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "clover/interpretation.hpp"
#include "clover/text.hpp"

namespace clover {

namespace {

std::string trim(std::string_view s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  auto b = std::find_if_not(s.begin(), s.end(), ws);
  auto e = std::find_if_not(s.rbegin(), std::string_view::reverse_iterator(b), ws).base();
  return std::string(b, e);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// Drops "1. ", "2) " or "- " list markers.
std::string strip_marker(const std::string& line) {
  static const std::regex marker(R"(^(\d+[.)]|-)\s+)");
  return std::regex_replace(line, marker, "", std::regex_constants::format_first_only);
}

// Case, spacing and final punctuation do not matter.
std::string normalize_sentence(std::string_view s) {
  std::string out;
  bool space = false;
  for (unsigned char c : trim(s)) {
    if (std::isspace(c)) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == '?')) out.pop_back();
  return out;
}

std::string require_block(std::string_view response, std::string_view tag) {
  auto block = last_fenced_block(response, tag);
  if (!block) throw PipelineError("reply has no ```" + std::string(tag) + " block");
  return *block;
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view id, std::size_t index) {
  // FNV-1a over the id, then one splitmix64 round.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : id) h = (h ^ c) * 1099511628211ull;
  std::uint64_t z = seed + h + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

enum class Truth { True, False, Unknown };

std::optional<Truth> option_truth(const std::string& text) {
  std::string t = normalize_sentence(text);
  if (t == "true" || t == "yes") return Truth::True;
  if (t == "false" || t == "no") return Truth::False;
  if (t == "unknown" || t == "uncertain" || t == "cannot be determined") return Truth::Unknown;
  return std::nullopt;
}

}  // namespace

TaskKind task_kind(const Problem& problem) {
  if (problem.options.empty()) return TaskKind::Grid;
  std::set<Truth> seen;
  for (const auto& o : problem.options) {
    auto t = option_truth(o.text);
    if (!t) return TaskKind::PerOption;
    seen.insert(*t);
  }
  return seen.size() == problem.options.size() && seen.size() >= 2 ? TaskKind::ThreeValued
                                                                   : TaskKind::PerOption;
}

const char* to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::PerOption: return "per-option";
    case TaskKind::ThreeValued: return "three-valued";
    case TaskKind::Grid: return "grid";
  }
  return "?";
}

std::optional<std::string> last_fenced_block(std::string_view text, std::string_view tag) {
  std::optional<std::string> found;
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<std::string> current;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (current) {
      if (t == "```") {
        found = std::move(*current);
        current.reset();
      } else {
        *current += line + "\n";
      }
    } else if (t.rfind("```", 0) == 0 && trim(std::string_view(t).substr(3)) == tag) {
      current.emplace();
    }
  }
  return found;
}

Prep preprocess(const Problem& problem, StageContext& ctx, int max_retries) {
  TaskKind kind = task_kind(problem);
  std::string options;
  for (const auto& o : problem.options) options += o.label + ") " + o.text + "\n";
  std::string exemplars = ctx.assets.exemplar_block("preprocess", ctx.task);
  std::string feedback, last_error;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    std::string prompt = ctx.assets.render(
        "preprocess", {{"exemplars", exemplars}, {"context", problem.context},
                       {"question", problem.question}, {"options", options}, {"feedback", feedback}});
    std::string response = ctx.llm.complete(prompt, ctx.params);
    try {
      Prep prep;
      prep.theory_source = require_block(response, "theory");
      prep.theory = parse_theory(prep.theory_source);
      if (auto block = last_fenced_block(response, "sentences"))
        for (const auto& line : lines_of(*block)) prep.sentences.push_back(strip_marker(line));
      if (kind != TaskKind::PerOption && prep.sentences.empty())
        throw PipelineError("no constraint sentences");
      if (kind == TaskKind::ThreeValued) {
        auto q = lines_of(require_block(response, "query"));
        if (q.size() != 1) throw PipelineError("query block must hold one sentence");
        prep.query = q.front();
      }
      if (kind == TaskKind::PerOption) {
        static const std::regex option_line(R"(^\(?([A-Za-z0-9]+)\)?\s*[:.)]\s*(.+)$)");
        for (const auto& line : lines_of(require_block(response, "options"))) {
          std::smatch m;
          if (!std::regex_match(line, m, option_line)) throw PipelineError("bad option line: " + line);
          prep.options.push_back({m[1].str(), trim(m[2].str())});
        }
        for (const auto& o : problem.options) {
          bool present = std::any_of(prep.options.begin(), prep.options.end(),
                                     [&](const OptionChoice& p) { return p.label == o.label; });
          if (!present) throw PipelineError("option " + o.label + " missing from reply");
        }
      }
      prep.retries = attempt;
      return prep;
    } catch (const Error& e) {
      last_error = e.what();
      feedback = "Your previous reply could not be used: " + last_error +
                 "\nReply again and follow the block format exactly.";
    }
  }
  throw PrepFailed("preprocessing failed after " + std::to_string(max_retries + 1) +
                   " attempts: " + last_error);
}

std::optional<SolverFunction> solver_function_from_keywords(std::string_view question) {
  std::string q = lower(std::string(question));
  auto has = [&](std::initializer_list<const char*> keys) {
    return std::any_of(keys.begin(), keys.end(),
                       [&](const char* k) { return q.find(k) != std::string::npos; });
  };
  std::optional<SolverFunction> fn;
  if (has({"cannot be true", "could not be true", "must be false", "can't be true"}))
    fn = SolverFunction::MustBeFalse;
  else if (has({"could be false", "can be false", "need not be true", "could also be false"}))
    fn = SolverFunction::CouldBeFalse;
  else if (has({"must be true", "must also be true", "must be the case", "which of the following is true",
                "which one of the following is true"}))
    fn = SolverFunction::MustBeTrue;
  else if (has({"could be true", "can be true", "could also be true", "is possible"}))
    fn = SolverFunction::CouldBeTrue;
  if (fn && q.find("except") != std::string::npos) {
    switch (*fn) {
      case SolverFunction::CouldBeTrue: fn = SolverFunction::MustBeFalse; break;
      case SolverFunction::MustBeFalse: fn = SolverFunction::CouldBeTrue; break;
      case SolverFunction::MustBeTrue: fn = SolverFunction::CouldBeFalse; break;
      case SolverFunction::CouldBeFalse: fn = SolverFunction::MustBeTrue; break;
    }
  }
  return fn;
}

std::optional<SolverFunction> select_solver_function(std::string_view question, StageContext& ctx,
                                                     std::string* source) {
  try {
    std::string prompt = ctx.assets.render("solver_function", {{"question", std::string(question)}});
    std::string response = ctx.llm.complete(prompt, ctx.params);
    if (auto block = last_fenced_block(response, "function")) {
      if (auto fn = solver_function_from_string(lower(trim(*block)))) {
        if (source) *source = "llm";
        return fn;
      }
    }
  } catch (const LlmError&) {
    // fall through to keywords
  }
  if (source) *source = "keywords";
  return solver_function_from_keywords(question);
}

std::optional<std::string> DependencyStructure::violation() const {
  if (components.empty()) return "no components";
  std::map<std::string, const Component*> by_id;
  for (const auto& c : components)
    if (!by_id.emplace(c.id, &c).second) return "duplicate component " + c.id;
  std::map<std::string, std::vector<std::string>> heads;
  for (const auto& [from, to] : edges) {
    if (!by_id.count(from) || !by_id.count(to)) return "edge " + from + " -> " + to + " names an unknown component";
    if (from == to) return "component " + from + " depends on itself";
    if (by_id[from]->kind == Component::Kind::Dependent && by_id[to]->kind == Component::Kind::Coupler)
      return "dependent " + from + " depends on coupler " + to;
    heads[from].push_back(to);
  }
  std::vector<std::string> roots;
  for (const auto& c : components)
    if (!heads.count(c.id)) roots.push_back(c.id);
  if (roots.size() != 1) return std::to_string(roots.size()) + " roots, expected one";
  // Every path of heads must reach the root.
  std::map<std::string, int> state;
  std::function<bool(const std::string&)> cyclic = [&](const std::string& id) {
    if (state[id] == 1) return true;
    if (state[id] == 2) return false;
    state[id] = 1;
    for (const auto& h : heads[id])
      if (cyclic(h)) return true;
    state[id] = 2;
    return false;
  };
  for (const auto& c : components)
    if (cyclic(c.id)) return "dependency cycle through " + c.id;
  return std::nullopt;
}

std::string DependencyStructure::to_text() const {
  std::string out;
  for (const auto& c : components) {
    switch (c.kind) {
      case Component::Kind::Unit: out += "unit " + c.id; break;
      case Component::Kind::Dependent: out += "dependent " + c.id; break;
      case Component::Kind::Coupler:
        out += "coupler " + c.id + (c.merge ? " merge" : " conjunction " + c.conjunction);
        break;
    }
    out += ": " + c.text + "\n";
  }
  for (const auto& [from, to] : edges) out += "edge " + from + " -> " + to + "\n";
  return out;
}

std::vector<DependencyStructure> parse_structures(std::string_view block) {
  static const std::regex component(
      R"(^(unit|dependent|coupler)\s+([^\s:]+)(?:\s+(merge|conjunction)(?:\s+([^\s:]+))?)?\s*:\s*(.*)$)");
  static const std::regex edge(R"(^edge\s+(\S+)\s*->\s*(\S+)$)");
  std::vector<DependencyStructure> out(1);
  for (const auto& line : lines_of(block)) {
    if (line.rfind("---", 0) == 0) {
      if (!out.back().components.empty() || !out.back().edges.empty()) out.emplace_back();
      continue;
    }
    if (line.front() == '#') continue;
    std::smatch m;
    if (std::regex_match(line, m, edge)) {
      out.back().edges.emplace_back(m[1].str(), m[2].str());
    } else if (std::regex_match(line, m, component)) {
      Component c;
      c.id = m[2].str();
      c.text = m[5].str();
      std::string kind = m[1].str();
      bool coupled = m[3].matched;
      if (kind == "coupler") {
        if (!coupled) throw PipelineError("coupler " + c.id + " needs `merge` or `conjunction WORD`");
        c.kind = Component::Kind::Coupler;
        c.merge = m[3].str() == "merge";
        c.conjunction = m[4].str();
        if (!c.merge && c.conjunction.empty()) throw PipelineError("conjunction coupler " + c.id + " has no word");
      } else {
        if (coupled) throw PipelineError(kind + " " + c.id + " cannot take a coupler kind");
        c.kind = kind == "unit" ? Component::Kind::Unit : Component::Kind::Dependent;
      }
      out.back().components.push_back(std::move(c));
    } else {
      throw PipelineError("bad structure line: " + line);
    }
  }
  if (out.back().components.empty() && out.back().edges.empty()) out.pop_back();
  return out;
}

ParsedStructures parse_dependencies(const Theory& theory, const std::string& sentence,
                                    StageContext& ctx) {
  std::string prompt = ctx.assets.render(
      "parse", {{"definitions", ctx.assets.text("definitions")},
                {"exemplars", ctx.assets.exemplar_block("parse", ctx.task)},
                {"theory", print_theory(theory)},
                {"sentence", sentence}});
  std::string response = ctx.llm.complete(prompt, ctx.params);
  ParsedStructures parsed;
  std::vector<DependencyStructure> all;
  try {
    all = parse_structures(require_block(response, "structures"));
  } catch (const PipelineError& e) {
    throw EmptyParse(std::string("unusable structures reply: ") + e.what());
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (auto why = all[i].violation())
      parsed.dropped.push_back("structure " + std::to_string(i) + ": " + *why);
    else
      parsed.structures.push_back(std::move(all[i]));
  }
  if (parsed.structures.empty()) {
    std::string reasons;
    for (const auto& d : parsed.dropped) reasons += "; " + d;
    throw EmptyParse("no valid dependency structure" + reasons);
  }
  return parsed;
}

namespace {

AccumulationSequence accumulate_logged(const std::string& sentence, const DependencyStructure& structure,
                                       std::size_t index, StageContext& ctx, std::string* prompt_digest) {
  if (structure.components.size() == 1) return {index, {sentence}};
  std::string prompt = ctx.assets.render(
      "accumulate", {{"definitions", ctx.assets.text("definitions")},
                     {"rules", ctx.assets.text("accumulation_rules")},
                     {"exemplars", ctx.assets.exemplar_block("accumulate", ctx.task)},
                     {"sentence", sentence},
                     {"structure", structure.to_text()}});
  if (prompt_digest) *prompt_digest = sha256_hex(prompt);
  std::string response = ctx.llm.complete(prompt, ctx.params);
  AccumulationSequence seq{index, {}};
  for (const auto& line : lines_of(require_block(response, "sentences")))
    seq.sentences.push_back(strip_marker(line));
  if (seq.sentences.empty() || normalize_sentence(seq.sentences.back()) != normalize_sentence(sentence))
    throw AccumulationMismatch("accumulation does not end with the target sentence");
  return seq;
}

std::vector<std::string> translate_logged(const Theory& theory, const AccumulationSequence& accum,
                                          StageContext& ctx, std::string* prompt_digest) {
  std::string numbered;
  for (std::size_t i = 0; i < accum.sentences.size(); ++i)
    numbered += std::to_string(i + 1) + ". " + accum.sentences[i] + "\n";
  std::string prompt = ctx.assets.render(
      "translate", {{"exemplars", ctx.assets.exemplar_block("translate", ctx.task)},
                    {"theory", print_theory(theory)},
                    {"sentences", numbered}});
  if (prompt_digest) *prompt_digest = sha256_hex(prompt);
  std::string response = ctx.llm.complete(prompt, ctx.params);
  auto block = last_fenced_block(response, "formulas");
  if (!block) throw MissingFormula("reply has no ```formulas block");
  std::vector<std::string> formulas;
  for (const auto& line : lines_of(*block)) formulas.push_back(strip_marker(line));
  if (formulas.size() != accum.sentences.size())
    throw MissingFormula(std::to_string(formulas.size()) + " formulas for " +
                         std::to_string(accum.sentences.size()) + " sentences");
  return formulas;
}

Translation finish(const Theory& theory, const std::string& sentence,
                   const std::vector<RawCandidate>& raw, nlohmann::json log,
                   const SolverOptions& solver) {
  CandidateSet set = filter_satisfiable(theory, sentence, raw, solver);
  bool parsed = std::any_of(set.candidates.begin(), set.candidates.end(), [](const Candidate& c) {
    return c.status != CandidateStatus::SyntaxError && c.status != CandidateStatus::IllTyped;
  });
  if (!parsed)
    throw EmptyPool(std::to_string(raw.size()) + " samples, none parsed as a well-typed formula");
  return {std::move(set), std::move(log)};
}

}  // namespace

AccumulationSequence accumulate(const std::string& sentence, const DependencyStructure& structure,
                                std::size_t structure_index, StageContext& ctx) {
  return accumulate_logged(sentence, structure, structure_index, ctx, nullptr);
}

std::vector<std::string> translate_sequence(const Theory& theory, const AccumulationSequence& accum,
                                            StageContext& ctx) {
  return translate_logged(theory, accum, ctx, nullptr);
}

Translation clover_translate(const Theory& theory, const std::string& sentence, StageContext& ctx,
                             const CloverConfig& config, const SolverOptions& solver) {
  using nlohmann::json;
  ParsedStructures parsed = parse_dependencies(theory, sentence, ctx);
  json log{{"mode", "clover"}, {"structures", json::array()}, {"dropped", parsed.dropped},
           {"samples", json::array()}, {"skipped", json::array()}};
  for (const auto& s : parsed.structures) log["structures"].push_back(s.to_text());

  std::vector<RawCandidate> raw;
  for (std::size_t l = 0; l < parsed.structures.size(); ++l) {
    if (raw.size() >= config.pool_target) {
      log["skipped"].push_back({{"structure", l}, {"reason", "pool target reached"}});
      continue;
    }
    for (std::size_t s = 0; s < config.samples_per_structure && raw.size() < config.pool_target; ++s) {
      StageContext sample{ctx.llm, ctx.assets, ctx.params, ctx.task};
      sample.params.seed = ctx.params.seed + s;
      json entry{{"structure", l}, {"sample", s}};
      try {
        std::string accum_digest, trans_digest;
        AccumulationSequence seq = accumulate_logged(sentence, parsed.structures[l], l, sample, &accum_digest);
        entry["sentences"] = seq.sentences;
        if (!accum_digest.empty()) entry["accumulatePrompt"] = accum_digest;
        auto formulas = translate_logged(theory, seq, sample, &trans_digest);
        entry["formulas"] = formulas;
        entry["translatePrompt"] = trans_digest;
        raw.push_back({formulas.back(), {l, s}});
      } catch (const Error& e) {
        entry["error"] = e.what();
      }
      log["samples"].push_back(std::move(entry));
    }
  }
  return finish(theory, sentence, raw, std::move(log), solver);
}

Translation direct_translate(const Theory& theory, const std::string& sentence, StageContext& ctx,
                             std::size_t repeats, const SolverOptions& solver) {
  using nlohmann::json;
  json log{{"mode", "direct"}, {"samples", json::array()}};
  std::vector<RawCandidate> raw;
  for (std::size_t s = 0; s < repeats; ++s) {
    StageContext sample{ctx.llm, ctx.assets, ctx.params, ctx.task};
    sample.params.seed = ctx.params.seed + s;
    json entry{{"structure", 0}, {"sample", s}};
    try {
      std::string digest;
      auto formulas = translate_logged(theory, {0, {sentence}}, sample, &digest);
      entry["formulas"] = formulas;
      entry["translatePrompt"] = digest;
      raw.push_back({formulas.back(), {0, s}});
    } catch (const Error& e) {
      entry["error"] = e.what();
    }
    log["samples"].push_back(std::move(entry));
  }
  return finish(theory, sentence, raw, std::move(log), solver);
}

bool LlmOracle::judge(std::string_view sentence, const Interpretation& interp) {
  std::string prompt = ctx_.assets.render(
      "disprove", {{"exemplars", ctx_.assets.exemplar_block("disprove", ctx_.task)},
                   {"sentence", std::string(sentence)},
                   {"interpretation", to_text(interp)}});
  std::string response = ctx_.llm.complete(prompt, ctx_.params);
  std::string verdict = lower(trim(last_fenced_block(response, "verdict").value_or(response)));
  if (verdict == "true") return true;
  if (verdict == "false") return false;
  throw OracleError("unreadable verdict: " + verdict.substr(0, 80));
}

const char* to_string(TranslationMode mode) {
  return mode == TranslationMode::Clover ? "clover" : "direct";
}

const char* to_string(VerificationMode mode) {
  switch (mode) {
    case VerificationMode::Disprove: return "disprove";
    case VerificationMode::Consistency: return "consistency";
    case VerificationMode::None: return "none";
  }
  return "?";
}

std::optional<TranslationMode> translation_mode_from_string(std::string_view name) {
  if (name == "clover") return TranslationMode::Clover;
  if (name == "direct") return TranslationMode::Direct;
  return std::nullopt;
}

std::optional<VerificationMode> verification_mode_from_string(std::string_view name) {
  for (auto m : {VerificationMode::Disprove, VerificationMode::Consistency, VerificationMode::None})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

nlohmann::json PipelineConfig::to_json() const {
  return {{"translation", to_string(translation)},
          {"verification", to_string(verification)},
          {"samplesPerStructure", clover.samples_per_structure},
          {"poolTarget", clover.pool_target},
          {"directRepeats", direct_repeats},
          {"maxRetries", max_retries},
          {"seed", seed},
          {"model", llm.model},
          {"temperature", llm.temperature},
          {"maxTokens", llm.max_tokens},
          {"conflictBudget", solver.conflict_budget}};
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw PipelineError("pipeline config must be an object");
  PipelineConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "translation") {
        auto m = translation_mode_from_string(value.get<std::string>());
        if (!m) throw PipelineError("unknown translation mode " + value.dump());
        c.translation = *m;
      } else if (key == "verification") {
        auto m = verification_mode_from_string(value.get<std::string>());
        if (!m) throw PipelineError("unknown verification mode " + value.dump());
        c.verification = *m;
      } else if (key == "samplesPerStructure") {
        c.clover.samples_per_structure = value.get<std::size_t>();
      } else if (key == "poolTarget") {
        c.clover.pool_target = value.get<std::size_t>();
      } else if (key == "directRepeats") {
        c.direct_repeats = value.get<std::size_t>();
      } else if (key == "maxRetries") {
        c.max_retries = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "model") {
        c.llm.model = value.get<std::string>();
      } else if (key == "temperature") {
        c.llm.temperature = value.get<double>();
      } else if (key == "maxTokens") {
        c.llm.max_tokens = value.get<int>();
      } else if (key == "conflictBudget") {
        c.solver.conflict_budget = value.get<std::uint64_t>();
      } else {
        throw PipelineError("unknown pipeline config key " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError(std::string("bad pipeline config: ") + e.what());
  }
  return c;
}

bool same_answer(std::string_view a, std::string_view b) {
  auto canon = [](std::string_view s) {
    std::vector<std::string> lines;
    for (const auto& l : lines_of(s)) lines.push_back(lower(l));
    std::sort(lines.begin(), lines.end());
    return lines;
  };
  return canon(a) == canon(b);
}

bool ProblemResult::correct() const { return answer && gold && same_answer(*answer, *gold); }

namespace {

struct StageFailure {
  std::string reason;
};

// Conjunction of every table entry; its negation excludes exactly this model.
// Nothing when the theory has no symbols, so there is only one model.
std::optional<Formula> describe(const Interpretation& interp) {
  const Theory& th = interp.theory();
  std::vector<Formula> parts;
  auto args_of = [&](const std::vector<SortId>& sorts, std::size_t index) {
    std::vector<ElemId> tuple = th.tuple_at(sorts, index);
    std::vector<Term> args;
    for (std::size_t i = 0; i < sorts.size(); ++i)
      args.push_back(Term::constant(th.element_name(sorts[i], tuple[i]), th.sort(sorts[i]).name));
    return args;
  };
  for (SymbolId f = 0; f < th.functions().size(); ++f) {
    const FunctionDecl& d = th.function(f);
    auto table = interp.function_table(f);
    for (std::size_t i = 0; i < table.size(); ++i)
      parts.push_back(Formula::equal(Term::apply(d.name, args_of(d.args, i)),
                                     Term::constant(th.element_name(d.result, table[i]), th.sort(d.result).name)));
  }
  for (SymbolId p = 0; p < th.predicates().size(); ++p) {
    const PredicateDecl& d = th.predicate(p);
    const auto& table = interp.predicate_table(p);
    for (std::size_t i = 0; i < table.size(); ++i) {
      Formula atom = Formula::predicate(d.name, args_of(d.args, i));
      parts.push_back(table[i] ? atom : Formula::negation(atom));
    }
  }
  if (parts.empty()) return std::nullopt;
  Formula all = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) all = Formula::conjunction(parts[i], all);
  return all;
}

class ProblemRun {
 public:
  ProblemRun(const Problem& problem, LlmClient& llm, const PromptAssets& assets, const PipelineConfig& config)
      : problem_(problem), config_(config), ctx_{llm, assets, config.llm, problem.task} {}

  nlohmann::json& trace() { return trace_; }

  std::string run() {
    TaskKind kind = task_kind(problem_);
    trace_["kind"] = to_string(kind);
    Prep prep = preprocess(problem_, ctx_, config_.max_retries);
    theory_ = prep.theory;
    trace_["prep"] = {{"theory", prep.theory_source}, {"sentences", prep.sentences}, {"retries", prep.retries}};
    if (prep.query) trace_["prep"]["query"] = *prep.query;
    for (const auto& o : prep.options) trace_["prep"]["options"][o.label] = o.text;
    trace_["sentences"] = nlohmann::json::array();

    std::vector<Formula> constraints;
    for (const auto& s : prep.sentences) constraints.push_back(translate("constraint", s));

    switch (kind) {
      case TaskKind::PerOption: return per_option(prep, constraints);
      case TaskKind::ThreeValued: return three_valued(prep, constraints);
      case TaskKind::Grid: return grid(constraints);
    }
    throw StageFailure{"unknown task kind"};
  }

 private:
  Formula translate(const std::string& role, const std::string& sentence) {
    std::size_t index = trace_["sentences"].size();
    nlohmann::json entry{{"role", role}, {"sentence", sentence}};
    auto fail = [&](const std::string& why) {
      entry["failure"] = why;
      trace_["sentences"].push_back(entry);
      throw StageFailure{role + " '" + sentence + "': " + why};
    };
    std::optional<Translation> t;
    try {
      t = config_.translation == TranslationMode::Clover
              ? clover_translate(theory_, sentence, ctx_, config_.clover, config_.solver)
              : direct_translate(theory_, sentence, ctx_, config_.direct_repeats, config_.solver);
    } catch (const Error& e) {
      fail(e.what());
    }
    entry["translation"] = t->log;
    std::uint64_t seed = mix_seed(config_.seed, problem_.id, index);
    VerificationOutcome outcome;
    switch (config_.verification) {
      case VerificationMode::Disprove: {
        LlmOracle oracle(ctx_);
        outcome = select_by_disproving(t->set, oracle, seed, config_.solver);
        break;
      }
      case VerificationMode::Consistency:
        outcome = select_by_consistency(t->set, seed, config_.solver);
        break;
      case VerificationMode::None:
        outcome = select_random(t->set, seed);
        break;
    }
    entry["verification"] = to_json(t->set, outcome);
    const Formula* chosen = selected_formula(t->set, outcome);
    if (!chosen) fail("no satisfiable candidate");
    trace_["sentences"].push_back(entry);
    return *chosen;
  }

  std::string per_option(const Prep& prep, const std::vector<Formula>& constraints) {
    std::string source;
    auto fn = select_solver_function(problem_.question, ctx_, &source);
    if (!fn) throw StageFailure{"no solver function for the question"};
    trace_["solverFunction"] = {{"function", to_string(*fn)}, {"source", source}};
    std::vector<std::string> passing;
    nlohmann::json verdicts = nlohmann::json::object();
    for (const auto& o : problem_.options) {
      auto it = std::find_if(prep.options.begin(), prep.options.end(),
                             [&](const OptionChoice& p) { return p.label == o.label; });
      Formula q = translate("option " + o.label, it->text);
      Verdict v = evaluate_option(SatProblem{theory_, constraints, q}, *fn, config_.solver);
      if (auto* u = std::get_if<Unexecutable>(&v)) throw StageFailure{"option " + o.label + ": " + u->reason};
      verdicts[o.label] = std::get<bool>(v);
      if (std::get<bool>(v)) passing.push_back(o.label);
    }
    trace_["optionVerdicts"] = verdicts;
    if (passing.size() != 1)
      throw StageFailure{std::to_string(passing.size()) + " options pass " + to_string(*fn)};
    return passing.front();
  }

  std::string three_valued(const Prep& prep, const std::vector<Formula>& constraints) {
    Formula q = translate("query", *prep.query);
    QueryOutcome out = answer_query(SatProblem{theory_, constraints, q}, config_.solver);
    if (auto* u = std::get_if<Unexecutable>(&out)) throw StageFailure{"query: " + u->reason};
    QueryVerdict v = std::get<QueryVerdict>(out);
    trace_["queryVerdict"] = to_string(v);
    std::optional<Truth> want;
    switch (v) {
      case QueryVerdict::Entailed: want = Truth::True; break;
      case QueryVerdict::Contradicted: want = Truth::False; break;
      case QueryVerdict::Unknown: want = Truth::Unknown; break;
      case QueryVerdict::InconsistentConstraints: throw StageFailure{"constraints are inconsistent"};
    }
    for (const auto& o : problem_.options)
      if (option_truth(o.text) == want) return o.label;
    throw StageFailure{std::string("no option reads ") + to_string(v)};
  }

  std::string grid(const std::vector<Formula>& constraints) {
    SatOutcome out = is_satisfiable(theory_, constraints, config_.solver);
    if (auto* u = std::get_if<Unexecutable>(&out)) throw StageFailure{u->reason};
    if (std::holds_alternative<Unsatisfiable>(out)) throw StageFailure{"constraints are unsatisfiable"};
    const Interpretation& model = std::get<Satisfiable>(out).model;
    auto self = describe(model);
    if (!self) {
      trace_["unique"] = true;
      return to_text(model);
    }
    std::vector<Formula> others = constraints;
    others.push_back(Formula::negation(*self));
    SatOutcome second = is_satisfiable(theory_, others, config_.solver);
    if (std::holds_alternative<Unexecutable>(second))
      trace_["unique"] = nullptr;
    else
      trace_["unique"] = std::holds_alternative<Unsatisfiable>(second);
    return to_text(model);
  }

  const Problem& problem_;
  const PipelineConfig& config_;
  StageContext ctx_;
  Theory theory_;
  nlohmann::json trace_ = nlohmann::json::object();
};

}  // namespace

ProblemResult run_problem(const Problem& problem, LlmClient& llm, const PromptAssets& assets,
                          const PipelineConfig& config, const std::optional<std::string>& fallback) {
  ProblemResult result;
  result.id = problem.id;
  result.gold = problem.gold;
  ProblemRun run(problem, llm, assets, config);
  nlohmann::json& trace = run.trace();
  trace["id"] = problem.id;
  trace["task"] = problem.task;
  trace["config"] = config.to_json();
  std::optional<std::string> failure;
  try {
    result.answer = run.run();
    result.executable = true;
  } catch (const StageFailure& f) {
    failure = f.reason;
  } catch (const Error& e) {
    failure = e.what();
  }
  if (failure) {
    trace["failure"] = *failure;
    result.answer = fallback;
    result.used_fallback = fallback.has_value();
  }
  trace["answer"] = result.answer ? nlohmann::json(*result.answer) : nlohmann::json(nullptr);
  trace["gold"] = result.gold ? nlohmann::json(*result.gold) : nlohmann::json(nullptr);
  trace["executable"] = result.executable;
  trace["usedFallback"] = result.used_fallback;
  trace["correct"] = result.correct();
  result.trace = std::move(trace);
  result.digest = sha256_hex(result.trace.dump());
  return result;
}

std::vector<ProblemResult> run_problems(const std::vector<Problem>& problems, LlmClient& llm,
                                        const PromptAssets& assets, const PipelineConfig& config,
                                        const std::map<std::string, std::string>& fallbacks,
                                        std::size_t workers) {
  std::vector<ProblemResult> results(problems.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < problems.size(); i = next++) {
      auto it = fallbacks.find(problems[i].id);
      std::optional<std::string> fallback;
      if (it != fallbacks.end()) fallback = it->second;
      results[i] = run_problem(problems[i], llm, assets, config, fallback);
    }
  };
  std::size_t n = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(problems.size(), 1));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < n; ++k) pool.emplace_back(work);
  }
  return results;
}

}  // namespace clover
