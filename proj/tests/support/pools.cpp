#include "pools.hpp"

#include <algorithm>
#include <map>

#include "clover/text.hpp"
#include "oracle.hpp"

namespace clover::testing {

namespace {

TheoryShape small_shape() {
  TheoryShape shape;
  shape.max_interpretations = 4096;
  return shape;
}

// A satisfiable formula inequivalent to everything in `avoid`, or nullopt.
std::optional<Formula> fresh_formula(Rng& rng, const Theory& th, const std::vector<Formula>& avoid) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    Formula f = random_formula(rng, th, 3);
    if (!oracle_satisfiable(th, {f})) continue;
    bool clash = std::any_of(avoid.begin(), avoid.end(),
                             [&](const Formula& g) { return oracle_equivalent(th, f, g); });
    if (!clash) return f;
  }
  return std::nullopt;
}

}  // namespace

DisprovingTrial random_disproving_trial(Rng& rng) {
  for (;;) {
    Theory th = random_theory(rng, small_shape());
    auto truth = fresh_formula(rng, th, {});
    if (!truth) continue;
    int distractors = std::uniform_int_distribution<int>(2, 5)(rng);
    std::vector<std::string> pool{print_formula(*truth)};
    bool ok = true;
    for (int k = 0; k < distractors && ok; ++k) {
      auto d = fresh_formula(rng, th, {*truth});
      if (d) pool.push_back(print_formula(*d));
      ok = d.has_value();
    }
    if (!ok) continue;
    std::shuffle(pool.begin(), pool.end(), rng);
    return {th, *truth, pool};
  }
}

ConsistencyTrial random_consistency_trial(Rng& rng) {
  for (;;) {
    Theory th = random_theory(rng, small_shape());
    int nbases = std::uniform_int_distribution<int>(2, 4)(rng);
    std::vector<Formula> bases;
    for (int k = 0; k < nbases; ++k) {
      auto f = fresh_formula(rng, th, bases);
      if (!f) break;
      bases.push_back(*f);
    }
    if (static_cast<int>(bases.size()) < nbases) continue;

    ConsistencyTrial trial{th, bases, {}, {}};
    for (std::size_t b = 0; b < bases.size(); ++b) {
      std::string t = print_formula(bases[b]);
      const std::string variants[] = {t, "~~(" + t + ")", "(" + t + ") & (" + t + ")",
                                      "(" + t + ") | (" + t + ")"};
      int copies = std::uniform_int_distribution<int>(1, 4)(rng);
      for (int c = 0; c < copies; ++c) {
        trial.pool.push_back({variants[c], {}});
        trial.class_of.push_back(b);
      }
    }
    std::vector<std::size_t> order(trial.pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    ConsistencyTrial shuffled{th, bases, {}, {}};
    for (std::size_t i : order) {
      RawCandidate r = trial.pool[i];
      // Few distinct structures so provenance ties are common.
      r.provenance = {rng() % 3, rng() % 2};
      shuffled.pool.push_back(r);
      shuffled.class_of.push_back(trial.class_of[i]);
    }
    return shuffled;
  }
}

std::size_t expected_consistency_pick(const ConsistencyTrial& trial) {
  auto before = [&](std::size_t a, std::size_t b) {
    const Provenance& pa = trial.pool[a].provenance;
    const Provenance& pb = trial.pool[b].provenance;
    if (pa.structure != pb.structure) return pa.structure < pb.structure;
    if (pa.sample != pb.sample) return pa.sample < pb.sample;
    return a < b;
  };
  std::map<std::size_t, std::size_t> size;
  std::map<std::size_t, std::size_t> first;
  for (std::size_t i = 0; i < trial.pool.size(); ++i) {
    std::size_t c = trial.class_of[i];
    ++size[c];
    if (!first.count(c) || before(i, first[c])) first[c] = i;
  }
  std::size_t best = first.begin()->second;
  std::size_t best_size = size.begin()->second;
  for (const auto& [c, n] : size) {
    if (n > best_size || (n == best_size && before(first[c], best))) {
      best = first[c];
      best_size = n;
    }
  }
  return best;
}

bool retention_holds(const CandidateSet& set, const VerificationOutcome& outcome,
                     const Formula& truth) {
  std::map<std::size_t, bool> matches;
  auto good = [&](std::size_t idx) {
    auto it = matches.find(idx);
    if (it != matches.end()) return it->second;
    bool eq = oracle_equivalent(set.theory, *set.candidates[idx].formula, truth);
    return matches[idx] = eq;
  };
  for (const Comparison& cmp : outcome.trace) {
    if (!cmp.survivor) return false;
    if (good(cmp.first) && !good(*cmp.survivor)) return false;
  }
  return true;
}

}  // namespace clover::testing
