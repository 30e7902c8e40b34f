#ifndef CLOVER_SAT_HPP
#define CLOVER_SAT_HPP

#include <cstdint>
#include <span>

#include <nlohmann/json_fwd.hpp>

#include "clover/cnf.hpp"

namespace clover {

struct SolverOptions {
  std::uint64_t conflict_budget = 1'000'000;
  // Zero keeps the initial branching order by variable id; any other value
  // perturbs initial activities deterministically.
  std::uint64_t seed = 0;
  double var_decay = 0.95;
  double clause_decay = 0.999;
  std::uint32_t restart_base = 100;  // conflicts per Luby unit
  double learnt_growth = 1.1;        // learned-clause cap factor per reduction
  bool phase_saving = true;
};

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned = 0;
  double wall_millis = 0;

  // Everything except wall time, which is the only nondeterministic field.
  bool same_counts(const SolverStats& other) const;
};

nlohmann::json to_json(const SolverStats& stats);

enum class SatStatus { Sat, Unsat, BudgetExceeded };

const char* to_string(SatStatus status);

struct SolveResult {
  SatStatus status = SatStatus::Unsat;
  Assignment model;  // filled for Sat; index 0 unused
  SolverStats stats;
};

// CDCL with two watched literals, first-UIP learning, activity branching,
// phase saving, Luby restarts and activity-based learned-clause deletion.
// Unsat under assumptions means the CNF has no model extending them. A Sat
// model is checked against every clause before it is returned.
SolveResult solve(const Cnf& cnf, std::span<const Lit> assumptions = {},
                  const SolverOptions& options = {});

}  // namespace clover

#endif  // CLOVER_SAT_HPP
