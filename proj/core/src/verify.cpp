#include "clover/verify.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "clover/semantics.hpp"
#include "clover/text.hpp"

namespace clover {

const char* to_string(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::Accepted: return "accepted";
    case CandidateStatus::SyntaxError: return "syntax-error";
    case CandidateStatus::IllTyped: return "ill-typed";
    case CandidateStatus::Unsatisfiable: return "unsatisfiable";
    case CandidateStatus::Unexecutable: return "unexecutable";
  }
  return "?";
}

const char* to_string(VerificationMethod method) {
  switch (method) {
    case VerificationMethod::LogicalConsistency: return "logical-consistency";
    case VerificationMethod::Disproving: return "disproving";
    case VerificationMethod::RandomFallback: return "random-fallback";
  }
  return "?";
}

std::vector<std::size_t> CandidateSet::accepted() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i].status == CandidateStatus::Accepted) out.push_back(i);
  return out;
}

CandidateSet filter_satisfiable(const Theory& theory, std::string sentence,
                                const std::vector<RawCandidate>& raw,
                                const SolverOptions& options) {
  CandidateSet set{theory, std::move(sentence), {}};
  set.candidates.reserve(raw.size());
  for (const RawCandidate& r : raw) {
    Candidate c{r.text, CandidateStatus::SyntaxError, std::nullopt, r.provenance, {}};
    std::optional<Formula> f;
    try {
      f = parse_formula(theory, r.text);
    } catch (const ParseError& e) {
      bool syntax = e.kind() == ParseErrorKind::Lexical || e.kind() == ParseErrorKind::Syntax;
      c.status = syntax ? CandidateStatus::SyntaxError : CandidateStatus::IllTyped;
      c.detail = e.what();
    }
    if (f) {
      try {
        SatOutcome out = is_satisfiable(theory, {*f}, options);
        if (std::holds_alternative<Satisfiable>(out)) {
          c.status = CandidateStatus::Accepted;
          c.formula = std::move(f);
        } else if (auto* u = std::get_if<Unexecutable>(&out)) {
          c.status = CandidateStatus::Unexecutable;
          c.detail = u->reason;
        } else {
          c.status = CandidateStatus::Unsatisfiable;
        }
      } catch (const TooLarge& e) {
        c.status = CandidateStatus::Unexecutable;
        c.detail = e.what();
      }
    }
    set.candidates.push_back(std::move(c));
  }
  return set;
}

CandidateSet filter_satisfiable(const Theory& theory, std::string sentence,
                                const std::vector<std::string>& raw,
                                const SolverOptions& options) {
  std::vector<RawCandidate> tagged;
  for (std::size_t i = 0; i < raw.size(); ++i) tagged.push_back({raw[i], {0, i}});
  return filter_satisfiable(theory, std::move(sentence), tagged, options);
}

std::string GroundTruthOracle::label() const { return "truth:" + print_formula(truth_); }

bool GroundTruthOracle::judge(std::string_view, const Interpretation& interp) {
  return evaluate(interp, truth_);
}

bool FixtureOracle::judge(std::string_view sentence, const Interpretation& interp) {
  auto it = answers_.find(to_text(interp));
  if (it != answers_.end()) return it->second;
  if (fallback_) return *fallback_;
  throw OracleError("no scripted answer for sentence '" + std::string(sentence) + "'");
}

const Formula* selected_formula(const CandidateSet& set, const VerificationOutcome& outcome) {
  if (!outcome.selected) return nullptr;
  const auto& f = set.candidates.at(*outcome.selected).formula;
  return f ? &*f : nullptr;
}

namespace {

bool earlier(const CandidateSet& set, std::size_t a, std::size_t b) {
  const Provenance& pa = set.candidates[a].provenance;
  const Provenance& pb = set.candidates[b].provenance;
  return pa != pb ? pa < pb : a < b;
}

std::size_t seeded_pick(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  return static_cast<std::size_t>(rng() % n);
}

}  // namespace

VerificationOutcome select_by_consistency(const CandidateSet& set, std::uint64_t seed,
                                          const SolverOptions& options) {
  VerificationOutcome out;
  out.method = VerificationMethod::LogicalConsistency;
  out.seed = seed;

  // Compare each candidate with one representative per class; equivalence is
  // transitive so this partitions the pool.
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t idx : set.accepted()) {
    const Formula& f = *set.candidates[idx].formula;
    bool placed = false;
    for (auto& cls : classes) {
      Comparison cmp;
      cmp.first = cls.front();
      cmp.second = idx;
      Verdict v = equivalent(set.theory, *set.candidates[cls.front()].formula, f, options);
      if (auto* u = std::get_if<Unexecutable>(&v)) {
        cmp.kind = Comparison::Kind::Skipped;
        cmp.note = u->reason;
      } else {
        cmp.kind = std::get<bool>(v) ? Comparison::Kind::Equivalent : Comparison::Kind::Inequivalent;
      }
      out.trace.push_back(std::move(cmp));
      if (out.trace.back().kind == Comparison::Kind::Equivalent) {
        cls.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({idx});
  }
  if (classes.empty()) return out;

  auto first_of = [&](const std::vector<std::size_t>& cls) {
    return *std::min_element(cls.begin(), cls.end(),
                             [&](std::size_t a, std::size_t b) { return earlier(set, a, b); });
  };
  const std::vector<std::size_t>* best = &classes.front();
  for (const auto& cls : classes) {
    if (cls.size() > best->size() ||
        (cls.size() == best->size() && earlier(set, first_of(cls), first_of(*best))))
      best = &cls;
  }
  out.selected = first_of(*best);
  return out;
}

VerificationOutcome select_by_disproving(const CandidateSet& set, TruthOracle& oracle,
                                         std::uint64_t seed, const SolverOptions& options) {
  VerificationOutcome out;
  out.method = VerificationMethod::Disproving;
  out.seed = seed;
  std::vector<std::size_t> pool = set.accepted();
  if (pool.empty()) return out;

  std::size_t start = seeded_pick(seed, pool.size());
  std::size_t best = pool[start];
  for (std::size_t k = 0; k < pool.size(); ++k) {
    if (k == start) continue;
    std::size_t challenger = pool[k];
    std::size_t temp = best;
    for (auto dir : {Comparison::Direction::IncumbentFirst, Comparison::Direction::ChallengerFirst}) {
      bool incumbent_first = dir == Comparison::Direction::IncumbentFirst;
      const Formula& p = *set.candidates[incumbent_first ? best : challenger].formula;
      const Formula& q = *set.candidates[incumbent_first ? challenger : best].formula;
      Comparison cmp;
      cmp.first = best;
      cmp.second = challenger;
      cmp.direction = dir;

      CounterOutcome found = counter_interpretation(set.theory, p, q, options);
      if (auto* u = std::get_if<Unexecutable>(&found)) {
        cmp.kind = Comparison::Kind::Skipped;
        cmp.note = u->reason;
      } else if (auto& interp = std::get<std::optional<Interpretation>>(found); !interp) {
        cmp.kind = Comparison::Kind::NoCounter;
      } else {
        cmp.counter = std::move(*interp);
        ++out.oracle_calls;
        try {
          bool verdict = oracle.judge(set.sentence, *cmp.counter);
          cmp.kind = Comparison::Kind::Judged;
          cmp.verdict = verdict;
          // A witness for the incumbent the oracle rejects, or one for the
          // challenger it accepts, hands the lead to the challenger.
          if (incumbent_first != verdict) temp = challenger;
        } catch (const std::exception& e) {
          cmp.kind = Comparison::Kind::Skipped;
          cmp.note = std::string("oracle failed: ") + e.what();
        }
      }
      cmp.survivor = temp;
      out.trace.push_back(std::move(cmp));
    }
    best = temp;
  }
  out.selected = best;
  return out;
}

VerificationOutcome select_random(const CandidateSet& set, std::uint64_t seed) {
  VerificationOutcome out;
  out.method = VerificationMethod::RandomFallback;
  out.seed = seed;
  std::vector<std::size_t> pool = set.accepted();
  if (!pool.empty()) out.selected = pool[seeded_pick(seed, pool.size())];
  return out;
}

namespace {

const char* kind_name(Comparison::Kind kind) {
  switch (kind) {
    case Comparison::Kind::Equivalent: return "equivalent";
    case Comparison::Kind::Inequivalent: return "inequivalent";
    case Comparison::Kind::NoCounter: return "no-counter";
    case Comparison::Kind::Judged: return "judged";
    case Comparison::Kind::Skipped: return "skipped";
  }
  return "?";
}

const char* direction_name(Comparison::Direction dir) {
  switch (dir) {
    case Comparison::Direction::None: return "none";
    case Comparison::Direction::IncumbentFirst: return "incumbent-first";
    case Comparison::Direction::ChallengerFirst: return "challenger-first";
  }
  return "?";
}

}  // namespace

nlohmann::json to_json(const CandidateSet& set, const VerificationOutcome& outcome) {
  using nlohmann::json;
  json candidates = json::array();
  for (const Candidate& c : set.candidates) {
    json entry{{"raw", c.raw},
               {"status", to_string(c.status)},
               {"provenance", {{"structure", c.provenance.structure}, {"sample", c.provenance.sample}}}};
    if (c.formula) entry["formula"] = print_formula(*c.formula);
    if (!c.detail.empty()) entry["detail"] = c.detail;
    candidates.push_back(std::move(entry));
  }
  json comparisons = json::array();
  for (const Comparison& cmp : outcome.trace) {
    json entry{{"first", cmp.first},
               {"second", cmp.second},
               {"direction", direction_name(cmp.direction)},
               {"kind", kind_name(cmp.kind)}};
    if (cmp.counter) entry["counterInterpretation"] = to_text(*cmp.counter);
    if (cmp.verdict) entry["verdict"] = *cmp.verdict;
    if (cmp.survivor) entry["survivor"] = *cmp.survivor;
    if (!cmp.note.empty()) entry["note"] = cmp.note;
    comparisons.push_back(std::move(entry));
  }
  json doc{{"method", to_string(outcome.method)},
           {"seed", outcome.seed},
           {"sentence", set.sentence},
           {"candidates", std::move(candidates)},
           {"comparisons", std::move(comparisons)},
           {"oracleCalls", outcome.oracle_calls}};
  doc["selected"] = outcome.selected ? json(*outcome.selected) : json(nullptr);
  const Formula* f = selected_formula(set, outcome);
  doc["selectedFormula"] = f ? json(print_formula(*f)) : json(nullptr);
  return doc;
}

}  // namespace clover
