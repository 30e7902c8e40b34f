#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clover/bench.hpp"
#include "clover/decide.hpp"
#include "clover/ground.hpp"
#include "clover/interpretation.hpp"
#include "clover/pipeline.hpp"
#include "clover/text.hpp"
#include "clover/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace clover;

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct Globals {
  std::uint64_t seed = 0;
  std::uint64_t budget = SolverOptions{}.conflict_budget;
  std::size_t workers = 1;
  std::string out;

  SolverOptions solver() const {
    SolverOptions o;
    o.conflict_budget = budget;
    return o;
  }
};

// What a command produced: text for stdout and a document for --out.
struct Output {
  std::string text;
  json report = json::object();
  int code = kOk;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(path + " is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

FolDocument load_document(const std::string& path) { return parse_document(read_text(path)); }

const Theory& theory_of(const FolDocument& doc) {
  if (!doc.theory) throw Error("document has no theory block");
  return *doc.theory;
}

// A formula block name from the document, or formula text.
Formula formula_arg(const FolDocument& doc, const std::string& arg) {
  if (const Formula* f = doc.find(arg)) return *f;
  return parse_formula(theory_of(doc), arg);
}

// Trace files are named after problem ids; keep them path-safe.
std::string file_stem(const std::string& id) {
  std::string out;
  for (unsigned char c : id) out.push_back(std::isalnum(c) || c == '-' || c == '_' || c == '.' ? c : '_');
  return out.empty() ? "_" : out;
}

std::string unexecutable_text(const Unexecutable& u) { return "unexecutable: " + u.reason; }

struct LlmChoice {
  std::string spec;  // stub:PATH or http
  std::string mapping;
  std::string cache;
};

struct LlmStack {
  std::unique_ptr<LlmClient> base;
  std::unique_ptr<CachingLlm> cache;
  LlmClient& client() { return cache ? static_cast<LlmClient&>(*cache) : *base; }
};

LlmStack make_llm(const LlmChoice& choice) {
  LlmStack stack;
  if (choice.spec.rfind("stub:", 0) == 0) {
    stack.base = StubLlm::load(choice.spec.substr(5));
  } else if (choice.spec == "http") {
    HttpConfig config = HttpConfig::from_env();
    if (!choice.mapping.empty()) config.mapping = HttpMapping::from_json(read_json(choice.mapping));
    stack.base = std::make_unique<HttpLlm>(config);
  } else {
    throw Error("--llm must be stub:PATH or http, got " + choice.spec);
  }
  if (!choice.cache.empty()) stack.cache = std::make_unique<CachingLlm>(*stack.base, choice.cache);
  return stack;
}

void add_llm_options(CLI::App* cmd, LlmChoice& choice) {
  cmd->add_option("--llm", choice.spec, "stub:PATH (canned responses) or http (CLOVER_LLM_* environment)")
      ->required();
  cmd->add_option("--http-mapping", choice.mapping, "JSON file mapping request/response fields");
  cmd->add_option("--cache", choice.cache, "JSONL response cache");
}

PromptAssets load_assets(const std::string& dir) {
  return dir.empty() ? PromptAssets::builtin() : PromptAssets::from_directory(dir);
}

std::map<std::string, std::string> load_fallbacks(const std::string& path) {
  std::map<std::string, std::string> out;
  if (path.empty()) return out;
  for (const auto& [id, answer] : read_json(path).items()) out[id] = answer.get<std::string>();
  return out;
}

Output cmd_solve(const Globals& g, const std::string& doc_path, const std::vector<std::string>& picked,
                 const std::string& query, const std::string& mode) {
  FolDocument doc = load_document(doc_path);
  const Theory& th = theory_of(doc);
  std::vector<Formula> constraints;
  if (picked.empty()) {
    for (const auto& [name, f] : doc.formulas)
      if (name != query) constraints.push_back(f);
  }
  for (const auto& c : picked) constraints.push_back(formula_arg(doc, c));
  Output out;
  out.report["constraints"] = constraints.size();
  if (query.empty()) {
    SatOutcome r = is_satisfiable(th, constraints, g.solver());
    if (auto* sat = std::get_if<Satisfiable>(&r)) {
      out.text = "satisfiable\n" + to_text(sat->model);
      out.report["result"] = "satisfiable";
      out.report["model"] = to_json(sat->model);
    } else if (std::holds_alternative<Unsatisfiable>(r)) {
      out.text = "unsatisfiable\n";
      out.report["result"] = "unsatisfiable";
    } else {
      out.text = unexecutable_text(std::get<Unexecutable>(r)) + "\n";
      out.report["result"] = "unexecutable";
      out.code = kDomainError;
    }
    return out;
  }
  SatProblem problem{th, constraints, formula_arg(doc, query)};
  out.report["query"] = print_formula(problem.query);
  if (!mode.empty()) {
    auto fn = solver_function_from_string(mode);
    if (!fn) throw CLI::ValidationError("--mode", "unknown solver function " + mode);
    Verdict v = evaluate_option(problem, *fn, g.solver());
    out.report["mode"] = mode;
    if (auto* b = std::get_if<bool>(&v)) {
      out.text = *b ? "true\n" : "false\n";
      out.report["result"] = *b;
    } else {
      out.text = unexecutable_text(std::get<Unexecutable>(v)) + "\n";
      out.report["result"] = "unexecutable";
      out.code = kDomainError;
    }
    return out;
  }
  QueryOutcome q = answer_query(problem, g.solver());
  if (auto* v = std::get_if<QueryVerdict>(&q)) {
    out.text = std::string(to_string(*v)) + "\n";
    out.report["result"] = to_string(*v);
  } else {
    out.text = unexecutable_text(std::get<Unexecutable>(q)) + "\n";
    out.report["result"] = "unexecutable";
    out.code = kDomainError;
  }
  return out;
}

Output cmd_equiv(const Globals& g, const std::string& doc_path, const std::string& a, const std::string& b) {
  FolDocument doc = load_document(doc_path);
  const Theory& th = theory_of(doc);
  Formula fa = formula_arg(doc, a), fb = formula_arg(doc, b);
  Output out;
  Verdict v = equivalent(th, fa, fb, g.solver());
  if (auto* u = std::get_if<Unexecutable>(&v)) {
    out.text = unexecutable_text(*u) + "\n";
    out.report["result"] = "unexecutable";
    out.code = kDomainError;
    return out;
  }
  out.report["equivalent"] = std::get<bool>(v);
  if (std::get<bool>(v)) {
    out.text = "equivalent\n";
    return out;
  }
  out.text = "not equivalent\n";
  for (auto [p, q, label] : {std::tuple{&fa, &fb, "first"}, std::tuple{&fb, &fa, "second"}}) {
    CounterOutcome c = counter_interpretation(th, *p, *q, g.solver());
    if (auto* found = std::get_if<std::optional<Interpretation>>(&c); found && *found) {
      out.text += std::string("separating interpretation (") + label + " holds):\n" + to_text(**found);
      out.report["separating"] = {{"holds", label}, {"interpretation", to_json(**found)}};
      break;
    }
  }
  return out;
}

Output cmd_counter(const Globals& g, const std::string& doc_path, const std::string& p, const std::string& q) {
  FolDocument doc = load_document(doc_path);
  Output out;
  CounterOutcome c = counter_interpretation(theory_of(doc), formula_arg(doc, p), formula_arg(doc, q), g.solver());
  if (auto* u = std::get_if<Unexecutable>(&c)) {
    out.text = unexecutable_text(*u) + "\n";
    out.report["result"] = "unexecutable";
    out.code = kDomainError;
  } else if (const auto& found = std::get<std::optional<Interpretation>>(c)) {
    out.text = to_text(*found);
    out.report["interpretation"] = to_json(*found);
  } else {
    out.text = "none\n";
    out.report["interpretation"] = nullptr;
  }
  return out;
}

Output cmd_cnf(const std::string& doc_path, const std::vector<std::string>& names) {
  FolDocument doc = load_document(doc_path);
  std::vector<Formula> formulas;
  if (names.empty())
    for (const auto& [name, f] : doc.formulas) formulas.push_back(f);
  for (const auto& n : names) formulas.push_back(formula_arg(doc, n));
  Encoding enc = ground(theory_of(doc), formulas);
  Output out;
  auto comments = dimacs_comments(enc.vars);
  out.text = write_dimacs(enc.cnf, comments);
  out.report["variables"] = enc.cnf.num_vars;
  out.report["clauses"] = enc.cnf.clauses.size();
  return out;
}

struct VerifyArgs {
  std::string doc;
  std::string sentence;
  std::string candidates;
  std::string method = "disprove";
  std::string oracle;
  std::string answers;
  std::string task = "ar-lsat";
  std::string prompts;
  LlmChoice llm;
};

Output cmd_verify(const Globals& g, const VerifyArgs& a) {
  FolDocument doc = load_document(a.doc);
  const Theory& th = theory_of(doc);
  std::vector<std::string> raw;
  std::istringstream lines(read_text(a.candidates));
  for (std::string line; std::getline(lines, line);)
    if (line.find_first_not_of(" \t\r") != std::string::npos && line.front() != '#') raw.push_back(line);
  CandidateSet set = filter_satisfiable(th, a.sentence, raw, g.solver());

  VerificationOutcome outcome;
  if (a.method == "consistency") {
    outcome = select_by_consistency(set, g.seed, g.solver());
  } else {
    std::unique_ptr<TruthOracle> oracle;
    LlmStack stack;
    PromptAssets assets = load_assets(a.prompts);
    std::optional<StageContext> ctx;
    if (a.oracle.rfind("truth:", 0) == 0) {
      oracle = std::make_unique<GroundTruthOracle>(formula_arg(doc, a.oracle.substr(6)));
    } else if (a.oracle == "stub") {
      if (a.answers.empty()) throw CLI::ValidationError("--answers", "--oracle stub needs --answers FILE");
      std::map<std::string, bool> answers;
      for (const auto& [interp, verdict] : read_json(a.answers).items()) answers[interp] = verdict.get<bool>();
      oracle = std::make_unique<FixtureOracle>(std::move(answers));
    } else if (a.oracle == "llm") {
      if (a.llm.spec.empty()) throw CLI::ValidationError("--llm", "--oracle llm needs --llm");
      stack = make_llm(a.llm);
      ctx.emplace(StageContext{stack.client(), assets, {}, a.task});
      oracle = std::make_unique<LlmOracle>(*ctx);
    } else {
      throw CLI::ValidationError("--oracle", "expected stub, llm or truth:<formula>");
    }
    outcome = select_by_disproving(set, *oracle, g.seed, g.solver());
  }
  Output out;
  out.report = to_json(set, outcome);
  const Formula* chosen = selected_formula(set, outcome);
  out.text = chosen ? std::to_string(*outcome.selected) + " " + print_formula(*chosen) + "\n" : "none\n";
  return out;
}

struct RunArgs {
  std::string dataset;
  std::string config;
  std::string translation;
  std::string verification;
  std::string fallbacks;
  std::string prompts;
  LlmChoice llm;
};

PipelineConfig pipeline_config(const Globals& g, const RunArgs& a, bool seed_given) {
  PipelineConfig c = a.config.empty() ? PipelineConfig{} : PipelineConfig::from_json(read_json(a.config));
  if (!a.translation.empty()) c.translation = *translation_mode_from_string(a.translation);
  if (!a.verification.empty()) c.verification = *verification_mode_from_string(a.verification);
  if (seed_given || a.config.empty()) c.seed = g.seed;
  c.solver.conflict_budget = g.budget;
  return c;
}

std::string summary_line(const MetricsReport& m) {
  return "accuracy " + percent(m.accuracy()) + "  programAccuracy " + percent(m.program_accuracy()) +
         "  executionRate " + percent(m.execution_rate()) + "  executionAccuracy " +
         percent(m.execution_accuracy()) + "\n";
}

Output cmd_pipeline_run(const Globals& g, const RunArgs& a, bool seed_given) {
  Dataset ds = load_dataset(a.dataset);
  PipelineConfig config = pipeline_config(g, a, seed_given);
  LlmStack stack = make_llm(a.llm);
  PromptAssets assets = load_assets(a.prompts);
  auto results = run_problems(ds.problems, stack.client(), assets, config, load_fallbacks(a.fallbacks), g.workers);
  MetricsReport metrics = score(results, ds);

  Output out;
  for (const auto& r : results)
    out.text += r.id + "  " + (r.executable ? "executable" : (r.used_fallback ? "fallback  " : "failed    ")) +
                "  " + r.digest + "\n";
  out.text += summary_line(metrics);
  out.report = {{"dataset", ds.name}, {"config", config.to_json()}, {"metrics", metrics.to_json()},
                {"results", results_to_json(results)}};
  if (!g.out.empty()) {
    fs::path dir(g.out);
    for (const auto& r : results) write_text(dir / "traces" / (file_stem(r.id) + ".json"), r.trace.dump(2) + "\n");
    write_text(dir / "results.json", results_to_json(results).dump(2) + "\n");
    write_text(dir / "report.csv", metrics.to_csv());
  }
  return out;
}

Output cmd_bench_score(const std::string& results_path, const std::string& dataset_path) {
  Dataset ds = load_dataset(dataset_path);
  MetricsReport metrics = score(results_from_json(read_json(results_path)), ds);
  Output out;
  out.text = summary_line(metrics);
  out.report = metrics.to_json();
  return out;
}

Output cmd_ablate(const Globals& g, const RunArgs& a, bool seed_given) {
  Dataset ds = load_dataset(a.dataset);
  PipelineConfig base = pipeline_config(g, a, seed_given);
  LlmStack stack = make_llm(a.llm);
  PromptAssets assets = load_assets(a.prompts);
  auto rows = run_ablation_grid(ds, stack.client(), assets, base, load_fallbacks(a.fallbacks), g.workers);
  Output out;
  out.text = ablation_csv(rows);
  out.report = {{"dataset", ds.name}, {"rows", ablation_json(rows)}};
  if (!g.out.empty()) write_text(fs::path(g.out) / "ablation.csv", out.text);
  return out;
}

// The report always lands in --out, including on failure.
void write_report(const Globals& g, const std::string& command, const Output* out, const std::string& error,
                  int code) {
  if (g.out.empty()) return;
  json doc{{"command", command}, {"exitCode", code}};
  if (out) doc["report"] = out->report;
  if (!error.empty()) doc["error"] = error;
  try {
    write_text(fs::path(g.out) / "report.json", doc.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "clover: " << e.what() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Many-sorted first-order logic toolkit and translation pipeline runner", "clover"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for selection and sampling")->capture_default_str();
  app.add_option("--budget", g.budget, "SAT conflict budget per call")->capture_default_str();
  app.add_option("--workers", g.workers, "Problems processed in parallel")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Directory for report.json and other outputs");

  std::string doc, query, mode, a, b;
  std::vector<std::string> names;

  auto* solve = app.add_subcommand("solve", "Decide a document's formulas, optionally against a query");
  solve->add_option("document", doc, ".fol document")->required();
  solve->add_option("--constraint", names, "Block names or formula texts (default: every block but the query)");
  solve->add_option("--query", query, "Formula text or block name");
  solve->add_option("--mode", mode, "Solver function: could-be-true, must-be-true, could-be-false, must-be-false");

  auto* equiv = app.add_subcommand("equiv", "Check two formulas for equivalence");
  equiv->add_option("document", doc)->required();
  equiv->add_option("first", a, "Formula text or block name")->required();
  equiv->add_option("second", b, "Formula text or block name")->required();

  auto* counter = app.add_subcommand("counter", "Interpretation where the first holds and the second fails");
  counter->add_option("document", doc)->required();
  counter->add_option("first", a)->required();
  counter->add_option("second", b)->required();

  auto* cnf = app.add_subcommand("cnf", "Export the grounded formulas as DIMACS");
  cnf->add_option("document", doc)->required();
  cnf->add_option("--formula", names, "Block names or formula texts (default: all blocks)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Select one translation from a candidate pool");
  verify->add_option("document", va.doc, ".fol document with the theory")->required();
  verify->add_option("--sentence", va.sentence, "The natural-language sentence")->required();
  verify->add_option("--candidates", va.candidates, "One formula per line")->required();
  verify->add_option("--method", va.method)->check(CLI::IsMember({"consistency", "disprove"}))->capture_default_str();
  verify->add_option("--oracle", va.oracle, "stub, llm or truth:<formula>");
  verify->add_option("--answers", va.answers, "JSON map from interpretation text to verdict (stub oracle)");
  verify->add_option("--llm", va.llm.spec, "stub:PATH or http (llm oracle)");
  verify->add_option("--cache", va.llm.cache);
  verify->add_option("--task", va.task)->capture_default_str();
  verify->add_option("--prompts", va.prompts, "Directory overriding built-in prompt assets");

  RunArgs ra;
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("dataset", ra.dataset, "Dataset JSON")->required();
    cmd->add_option("--config", ra.config, "Pipeline config JSON");
    add_llm_options(cmd, ra.llm);
    cmd->add_option("--fallbacks", ra.fallbacks, "JSON map from problem id to fallback answer");
    cmd->add_option("--prompts", ra.prompts, "Directory overriding built-in prompt assets");
  };
  auto* pipeline = app.add_subcommand("pipeline", "Run the translation pipeline");
  pipeline->require_subcommand(1);
  auto* run = pipeline->add_subcommand("run", "Solve every problem of a dataset");
  add_run_options(run);
  run->add_option("--translation", ra.translation)->check(CLI::IsMember({"clover", "direct"}));
  run->add_option("--verification", ra.verification)->check(CLI::IsMember({"disprove", "consistency", "none"}));

  std::string results_path, dataset_path;
  auto* bench = app.add_subcommand("bench", "Evaluation");
  bench->require_subcommand(1);
  auto* bscore = bench->add_subcommand("score", "Metrics for a results file");
  bscore->add_option("results", results_path, "results.json from pipeline run")->required();
  bscore->add_option("dataset", dataset_path)->required();

  auto* ablate = app.add_subcommand("ablate", "Run the five-row ablation grid");
  add_run_options(ablate);

  for (auto* sub : {solve, equiv, counter, cnf, verify, pipeline, run, bench, bscore, ablate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "clover: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  std::string command = app.get_subcommands().front()->get_name();
  bool seed_given = app.count("--seed") > 0;
  try {
    Output out;
    if (*solve) out = cmd_solve(g, doc, names, query, mode);
    else if (*equiv) out = cmd_equiv(g, doc, a, b);
    else if (*counter) out = cmd_counter(g, doc, a, b);
    else if (*cnf) out = cmd_cnf(doc, names);
    else if (*verify) out = cmd_verify(g, va);
    else if (*run) command = "pipeline run", out = cmd_pipeline_run(g, ra, seed_given);
    else if (*bscore) command = "bench score", out = cmd_bench_score(results_path, dataset_path);
    else if (*ablate) out = cmd_ablate(g, ra, seed_given);
    std::cout << out.text;
    write_report(g, command, &out, "", out.code);
    return out.code;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "clover: " << e.what() << "\n";
    write_report(g, command, nullptr, e.what(), kUsageError);
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "clover: " << e.what() << "\n";
    write_report(g, command, nullptr, e.what(), kDomainError);
    return kDomainError;
  }
}
