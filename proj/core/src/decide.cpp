#include "clover/decide.hpp"

#include "clover/error.hpp"
#include "clover/ground.hpp"
#include "clover/semantics.hpp"

namespace clover {

const char* to_string(QueryVerdict verdict) {
  switch (verdict) {
    case QueryVerdict::Entailed: return "entailed";
    case QueryVerdict::Contradicted: return "contradicted";
    case QueryVerdict::Unknown: return "unknown";
    case QueryVerdict::InconsistentConstraints: return "inconsistent-constraints";
  }
  return "?";
}

const char* to_string(SolverFunction fn) {
  switch (fn) {
    case SolverFunction::CouldBeTrue: return "could-be-true";
    case SolverFunction::MustBeTrue: return "must-be-true";
    case SolverFunction::CouldBeFalse: return "could-be-false";
    case SolverFunction::MustBeFalse: return "must-be-false";
  }
  return "?";
}

std::optional<SolverFunction> solver_function_from_string(std::string_view name) {
  for (auto fn : {SolverFunction::CouldBeTrue, SolverFunction::MustBeTrue,
                  SolverFunction::CouldBeFalse, SolverFunction::MustBeFalse})
    if (name == to_string(fn)) return fn;
  return std::nullopt;
}

SatOutcome is_satisfiable(const Theory& theory, const std::vector<Formula>& formulas,
                          const SolverOptions& options) {
  Encoding enc = ground(theory, formulas);
  SolveResult result = solve(enc.cnf, {}, options);
  switch (result.status) {
    case SatStatus::Unsat:
      return Unsatisfiable{};
    case SatStatus::BudgetExceeded:
      return Unexecutable{"conflict budget of " + std::to_string(options.conflict_budget) +
                          " exhausted"};
    case SatStatus::Sat:
      break;
  }
  Interpretation model = decode_model(enc.vars, result.model);
  for (const Formula& f : formulas)
    if (!evaluate_unchecked(model, f))
      throw InconsistentModel("decoded model falsifies an input formula");
  return Satisfiable{std::move(model)};
}

namespace {

// true: no model. Unexecutable passes through.
Verdict unsatisfiable(const Theory& theory, const std::vector<Formula>& formulas,
                      const SolverOptions& options) {
  SatOutcome out = is_satisfiable(theory, formulas, options);
  if (auto* u = std::get_if<Unexecutable>(&out)) return *u;
  return std::holds_alternative<Unsatisfiable>(out);
}

}  // namespace

Verdict entails(const Theory& theory, const std::vector<Formula>& constraints, const Formula& phi,
                const SolverOptions& options) {
  std::vector<Formula> formulas = constraints;
  formulas.push_back(Formula::negation(phi));
  return unsatisfiable(theory, formulas, options);
}

Verdict equivalent(const Theory& theory, const Formula& a, const Formula& b,
                   const SolverOptions& options) {
  Verdict forward = unsatisfiable(theory, {a, Formula::negation(b)}, options);
  if (!executable(forward) || !std::get<bool>(forward)) return forward;
  return unsatisfiable(theory, {b, Formula::negation(a)}, options);
}

CounterOutcome counter_interpretation(const Theory& theory, const Formula& p, const Formula& q,
                                      const SolverOptions& options) {
  SatOutcome out = is_satisfiable(theory, {p, Formula::negation(q)}, options);
  if (auto* u = std::get_if<Unexecutable>(&out)) return *u;
  if (auto* s = std::get_if<Satisfiable>(&out)) return std::optional<Interpretation>(s->model);
  return std::optional<Interpretation>{};
}

QueryOutcome answer_query(const SatProblem& problem, const SolverOptions& options) {
  Verdict inconsistent = unsatisfiable(problem.theory, problem.constraints, options);
  if (auto* u = std::get_if<Unexecutable>(&inconsistent)) return *u;
  if (std::get<bool>(inconsistent)) return QueryVerdict::InconsistentConstraints;

  Verdict entailed = entails(problem.theory, problem.constraints, problem.query, options);
  if (auto* u = std::get_if<Unexecutable>(&entailed)) return *u;
  if (std::get<bool>(entailed)) return QueryVerdict::Entailed;

  Verdict refuted =
      entails(problem.theory, problem.constraints, Formula::negation(problem.query), options);
  if (auto* u = std::get_if<Unexecutable>(&refuted)) return *u;
  return std::get<bool>(refuted) ? QueryVerdict::Contradicted : QueryVerdict::Unknown;
}

Verdict evaluate_option(const SatProblem& problem, SolverFunction mode,
                        const SolverOptions& options) {
  auto with = [&](const Formula& extra) {
    std::vector<Formula> formulas = problem.constraints;
    formulas.push_back(extra);
    return formulas;
  };
  auto negate = [](Verdict v) -> Verdict {
    if (auto* b = std::get_if<bool>(&v)) return !*b;
    return v;
  };
  switch (mode) {
    case SolverFunction::CouldBeTrue:
      return negate(unsatisfiable(problem.theory, with(problem.query), options));
    case SolverFunction::MustBeTrue:
      return entails(problem.theory, problem.constraints, problem.query, options);
    case SolverFunction::CouldBeFalse:
      return negate(unsatisfiable(problem.theory, with(Formula::negation(problem.query)), options));
    case SolverFunction::MustBeFalse:
      return entails(problem.theory, problem.constraints, Formula::negation(problem.query),
                     options);
  }
  throw Error("unknown solver function");
}

}  // namespace clover
