#ifndef CLOVER_VERIFY_HPP
#define CLOVER_VERIFY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clover/decide.hpp"
#include "clover/formula.hpp"
#include "clover/interpretation.hpp"
#include "clover/theory.hpp"

namespace clover {

enum class CandidateStatus { Accepted, SyntaxError, IllTyped, Unsatisfiable, Unexecutable };

const char* to_string(CandidateStatus status);

// Which dependency structure and which sample produced a candidate. Earlier
// provenance sorts first.
struct Provenance {
  std::size_t structure = 0;
  std::size_t sample = 0;

  auto operator<=>(const Provenance&) const = default;
};

struct RawCandidate {
  std::string text;
  Provenance provenance;
};

struct Candidate {
  std::string raw;
  CandidateStatus status = CandidateStatus::SyntaxError;
  std::optional<Formula> formula;  // set iff Accepted
  Provenance provenance;
  std::string detail;              // rejection reason
};

struct CandidateSet {
  Theory theory;
  std::string sentence;
  std::vector<Candidate> candidates;

  // Indices of accepted candidates, in input order.
  std::vector<std::size_t> accepted() const;
};

CandidateSet filter_satisfiable(const Theory& theory, std::string sentence,
                                const std::vector<RawCandidate>& raw,
                                const SolverOptions& options = {});
// Provenance (0, i) for the i-th text.
CandidateSet filter_satisfiable(const Theory& theory, std::string sentence,
                                const std::vector<std::string>& raw,
                                const SolverOptions& options = {});

class OracleError : public Error {
 public:
  using Error::Error;
};

// Judges whether an interpretation makes a natural-language sentence true.
// judge() may throw; the verifier records the failure and moves on.
class TruthOracle {
 public:
  virtual ~TruthOracle() = default;
  virtual std::string label() const = 0;
  virtual bool judge(std::string_view sentence, const Interpretation& interp) = 0;
};

class GroundTruthOracle final : public TruthOracle {
 public:
  explicit GroundTruthOracle(Formula truth) : truth_(std::move(truth)) {}
  std::string label() const override;
  bool judge(std::string_view sentence, const Interpretation& interp) override;

 private:
  Formula truth_;
};

// Scripted answers keyed by the interpretation's text form. Unknown keys fall
// back to `fallback`, or throw OracleError when there is none.
class FixtureOracle final : public TruthOracle {
 public:
  explicit FixtureOracle(std::map<std::string, bool> answers,
                         std::optional<bool> fallback = std::nullopt)
      : answers_(std::move(answers)), fallback_(fallback) {}
  std::string label() const override { return "fixture"; }
  bool judge(std::string_view sentence, const Interpretation& interp) override;

 private:
  std::map<std::string, bool> answers_;
  std::optional<bool> fallback_;
};

enum class VerificationMethod { LogicalConsistency, Disproving, RandomFallback };

const char* to_string(VerificationMethod method);

// One trace record. For consistency checks `first`/`second` are the compared
// candidates; for disproving they are the incumbent and the challenger, and
// `direction` says which one plays phi_p.
struct Comparison {
  enum class Kind { Equivalent, Inequivalent, NoCounter, Judged, Skipped };
  enum class Direction { None, IncumbentFirst, ChallengerFirst };

  std::size_t first = 0;
  std::size_t second = 0;
  Direction direction = Direction::None;
  Kind kind = Kind::Skipped;
  std::optional<Interpretation> counter;
  std::optional<bool> verdict;     // oracle answer when Judged
  std::optional<std::size_t> survivor;
  std::string note;
};

struct VerificationOutcome {
  VerificationMethod method = VerificationMethod::LogicalConsistency;
  std::uint64_t seed = 0;
  std::optional<std::size_t> selected;  // index into CandidateSet::candidates
  std::vector<Comparison> trace;
  std::size_t oracle_calls = 0;
};

const Formula* selected_formula(const CandidateSet& set, const VerificationOutcome& outcome);

// Largest equivalence class among accepted candidates; ties go to the class
// holding the earliest-provenance candidate, and its earliest member wins.
VerificationOutcome select_by_consistency(const CandidateSet& set, std::uint64_t seed,
                                          const SolverOptions& options = {});

VerificationOutcome select_by_disproving(const CandidateSet& set, TruthOracle& oracle,
                                         std::uint64_t seed, const SolverOptions& options = {});

// Seeded uniform choice among accepted candidates, no verification.
VerificationOutcome select_random(const CandidateSet& set, std::uint64_t seed);

// {method, seed, sentence, candidates: [{raw, status, formula?, provenance,
// detail?}], comparisons: [...], selected, selectedFormula, oracleCalls}
nlohmann::json to_json(const CandidateSet& set, const VerificationOutcome& outcome);

}  // namespace clover

#endif  // CLOVER_VERIFY_HPP
