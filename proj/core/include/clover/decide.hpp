#ifndef CLOVER_DECIDE_HPP
#define CLOVER_DECIDE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clover/formula.hpp"
#include "clover/interpretation.hpp"
#include "clover/sat.hpp"
#include "clover/theory.hpp"

namespace clover {

// The solver gave up (conflict budget). Callers treat the problem as not
// executable rather than as an error.
struct Unexecutable {
  std::string reason;
};

struct Satisfiable {
  Interpretation model;
};
struct Unsatisfiable {};

using SatOutcome = std::variant<Satisfiable, Unsatisfiable, Unexecutable>;
using Verdict = std::variant<bool, Unexecutable>;
// nullopt: no separating interpretation exists.
using CounterOutcome = std::variant<std::optional<Interpretation>, Unexecutable>;

enum class QueryVerdict { Entailed, Contradicted, Unknown, InconsistentConstraints };
using QueryOutcome = std::variant<QueryVerdict, Unexecutable>;

enum class SolverFunction { CouldBeTrue, MustBeTrue, CouldBeFalse, MustBeFalse };

const char* to_string(QueryVerdict verdict);
const char* to_string(SolverFunction fn);
std::optional<SolverFunction> solver_function_from_string(std::string_view name);

struct SatProblem {
  Theory theory;
  std::vector<Formula> constraints;
  Formula query;
};

// All operations sort-check their inputs (IllTyped on failure), solve with a
// private solver instance, and re-check any returned model with evaluate().

SatOutcome is_satisfiable(const Theory& theory, const std::vector<Formula>& formulas,
                          const SolverOptions& options = {});

// constraints |= phi, i.e. constraints & ~phi has no model.
Verdict entails(const Theory& theory, const std::vector<Formula>& constraints, const Formula& phi,
                const SolverOptions& options = {});

Verdict equivalent(const Theory& theory, const Formula& a, const Formula& b,
                   const SolverOptions& options = {});

// An interpretation making p true and q false.
CounterOutcome counter_interpretation(const Theory& theory, const Formula& p, const Formula& q,
                                      const SolverOptions& options = {});

QueryOutcome answer_query(const SatProblem& problem, const SolverOptions& options = {});

Verdict evaluate_option(const SatProblem& problem, SolverFunction mode,
                        const SolverOptions& options = {});

inline bool executable(const Verdict& v) { return std::holds_alternative<bool>(v); }

}  // namespace clover

#endif  // CLOVER_DECIDE_HPP
