#include "clover/sat.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "clover/error.hpp"

namespace clover {

bool SolverStats::same_counts(const SolverStats& o) const {
  return conflicts == o.conflicts && decisions == o.decisions && propagations == o.propagations &&
         restarts == o.restarts && learned == o.learned;
}

nlohmann::json to_json(const SolverStats& s) {
  return {{"conflicts", s.conflicts},     {"decisions", s.decisions},
          {"propagations", s.propagations}, {"restarts", s.restarts},
          {"learned", s.learned},         {"wallMillis", s.wall_millis}};
}

const char* to_string(SatStatus status) {
  switch (status) {
    case SatStatus::Sat: return "sat";
    case SatStatus::Unsat: return "unsat";
    case SatStatus::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

namespace {

// Internal literals: 2*(v-1) + sign, so x and ~x differ in the low bit.
using ILit = std::uint32_t;
using CRef = std::uint32_t;
constexpr CRef kNoReason = std::numeric_limits<CRef>::max();

inline ILit to_ilit(Lit l) { return 2 * (var_of(l) - 1) + (l < 0 ? 1 : 0); }
inline ILit neg(ILit l) { return l ^ 1; }
inline std::uint32_t ivar(ILit l) { return l >> 1; }

// lbool: 0 false, 1 true, 2 unassigned.
constexpr std::uint8_t kFalse = 0, kTrue = 1, kUndef = 2;

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

class Cdcl {
 public:
  Cdcl(std::uint32_t num_vars, const SolverOptions& options)
      : opts_(options),
        n_(num_vars),
        assigns_(num_vars, kUndef),
        level_(num_vars, 0),
        reason_(num_vars, kNoReason),
        phase_(num_vars, 0),
        activity_(num_vars, 0.0),
        seen_(num_vars, 0),
        watches_(2 * static_cast<std::size_t>(num_vars)),
        heap_pos_(num_vars, -1) {
    if (opts_.seed != 0) {
      std::mt19937_64 rng(opts_.seed);
      std::uniform_real_distribution<double> jitter(0.0, 1e-5);
      for (double& a : activity_) a = jitter(rng);
    }
    for (std::uint32_t v = 0; v < n_; ++v) heap_insert(v);
  }

  bool add_clause(const std::vector<Lit>& clause) {
    std::vector<ILit> lits;
    for (Lit l : clause) {
      ILit il = to_ilit(l);
      if (std::find(lits.begin(), lits.end(), neg(il)) != lits.end()) return true;
      if (std::find(lits.begin(), lits.end(), il) == lits.end()) lits.push_back(il);
    }
    if (lits.size() == 1) {
      if (value(lits[0]) == kFalse) return false;
      if (value(lits[0]) == kUndef) enqueue(lits[0], kNoReason);
      return true;
    }
    attach(store(std::move(lits), false));
    return true;
  }

  SatStatus run(std::span<const Lit> assumptions, SolverStats& stats) {
    for (Lit a : assumptions) assumptions_.push_back(to_ilit(a));
    max_learnts_ = std::max<double>(100.0, static_cast<double>(clauses_.size()) / 3.0);
    std::uint64_t restart_index = 0;
    while (true) {
      auto limit = static_cast<std::uint64_t>(luby(2.0, restart_index) * opts_.restart_base);
      SatStatus status;
      if (search(limit, stats, status)) return status;
      ++restart_index;
      ++stats.restarts;
    }
  }

  Assignment model() const {
    Assignment out(n_ + 1, false);
    for (std::uint32_t v = 0; v < n_; ++v) out[v + 1] = assigns_[v] == kTrue;
    return out;
  }

 private:
  struct Clause {
    std::vector<ILit> lits;
    double activity = 0;
    bool learnt = false;
    bool removed = false;
  };
  struct Watcher {
    CRef cref;
    ILit blocker;
  };

  std::uint8_t value(ILit l) const {
    std::uint8_t a = assigns_[ivar(l)];
    return a == kUndef ? kUndef : static_cast<std::uint8_t>(a ^ (l & 1));
  }
  std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

  CRef store(std::vector<ILit> lits, bool learnt) {
    clauses_.push_back({std::move(lits), 0.0, learnt, false});
    return static_cast<CRef>(clauses_.size() - 1);
  }

  void attach(CRef cr) {
    const Clause& c = clauses_[cr];
    watches_[neg(c.lits[0])].push_back({cr, c.lits[1]});
    watches_[neg(c.lits[1])].push_back({cr, c.lits[0]});
  }

  void enqueue(ILit l, CRef reason) {
    std::uint32_t v = ivar(l);
    assigns_[v] = static_cast<std::uint8_t>((l & 1) ? kFalse : kTrue);
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  CRef propagate(SolverStats& stats) {
    CRef conflict = kNoReason;
    while (qhead_ < trail_.size()) {
      ILit p = trail_[qhead_++];
      ILit false_lit = neg(p);
      auto& ws = watches_[p];
      ++stats.propagations;
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watcher w = ws[i];
        if (value(w.blocker) == kTrue) {
          ws[j++] = ws[i++];
          continue;
        }
        Clause& c = clauses_[w.cref];
        if (c.removed) {
          ++i;
          continue;
        }
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        ++i;
        ILit first = c.lits[0];
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != kFalse) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[neg(c.lits[1])].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == kFalse) {
          conflict = w.cref;
          qhead_ = trail_.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason) break;
    }
    return conflict;
  }

  // First-UIP learning. Returns the learnt clause (asserting literal first)
  // and the backjump level.
  std::pair<std::vector<ILit>, std::uint32_t> analyze(CRef conflict) {
    std::vector<ILit> learnt{0};
    int path = 0;
    ILit p = 0;
    bool have_p = false;
    std::size_t index = trail_.size();
    CRef cr = conflict;
    do {
      Clause& c = clauses_[cr];
      if (c.learnt) bump_clause(c);
      for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
        ILit q = c.lits[k];
        std::uint32_t v = ivar(q);
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump_var(v);
        if (level_[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
      while (!seen_[ivar(trail_[--index])]) {
      }
      p = trail_[index];
      have_p = true;
      cr = reason_[ivar(p)];
      seen_[ivar(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = neg(p);

    // Drop literals implied by the rest of the clause through their reason.
    std::vector<ILit> kept{learnt[0]};
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      CRef r = reason_[ivar(learnt[k])];
      bool redundant = r != kNoReason;
      if (redundant) {
        for (std::size_t m = 1; m < clauses_[r].lits.size(); ++m) {
          std::uint32_t u = ivar(clauses_[r].lits[m]);
          if (!seen_[u] && level_[u] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) kept.push_back(learnt[k]);
    }
    for (ILit l : learnt) seen_[ivar(l)] = 0;

    std::uint32_t back = 0;
    if (kept.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < kept.size(); ++k)
        if (level_[ivar(kept[k])] > level_[ivar(kept[max_i])]) max_i = k;
      std::swap(kept[1], kept[max_i]);
      back = level_[ivar(kept[1])];
    }
    return {std::move(kept), back};
  }

  void backtrack(std::uint32_t level) {
    if (decision_level() <= level) return;
    for (std::size_t k = trail_.size(); k-- > trail_lim_[level];) {
      std::uint32_t v = ivar(trail_[k]);
      if (opts_.phase_saving) phase_[v] = static_cast<std::uint8_t>(trail_[k] & 1);
      assigns_[v] = kUndef;
      reason_[v] = kNoReason;
      if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[level]);
    trail_lim_.resize(level);
    qhead_ = trail_.size();
  }

  // Returns true when the search reached a verdict (written to `status`),
  // false when it is time to restart.
  bool search(std::uint64_t conflict_limit, SolverStats& stats, SatStatus& status) {
    std::uint64_t local = 0;
    while (true) {
      CRef conflict = propagate(stats);
      if (conflict != kNoReason) {
        ++stats.conflicts;
        ++local;
        if (decision_level() == 0) {
          status = SatStatus::Unsat;
          return true;
        }
        auto [learnt, back] = analyze(conflict);
        backtrack(back);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          CRef cr = store(std::move(learnt), true);
          attach(cr);
          bump_clause(clauses_[cr]);
          enqueue(clauses_[cr].lits[0], cr);
          ++num_learnts_;
        }
        ++stats.learned;
        var_inc_ /= opts_.var_decay;
        clause_inc_ /= opts_.clause_decay;
        if (stats.conflicts >= opts_.conflict_budget) {
          status = SatStatus::BudgetExceeded;
          return true;
        }
        continue;
      }

      if (local >= conflict_limit) {
        backtrack(0);
        return false;
      }
      if (static_cast<double>(num_learnts_) >= max_learnts_ + static_cast<double>(trail_.size())) {
        reduce_db();
        max_learnts_ *= opts_.learnt_growth;
      }

      ILit next = 0;
      bool have_next = false;
      while (decision_level() < assumptions_.size()) {
        ILit a = assumptions_[decision_level()];
        if (value(a) == kTrue) {
          trail_lim_.push_back(trail_.size());  // dummy level keeps indices aligned
        } else if (value(a) == kFalse) {
          status = SatStatus::Unsat;
          return true;
        } else {
          next = a;
          have_next = true;
          break;
        }
      }
      if (!have_next) {
        std::int64_t v = pick_branch_var();
        if (v < 0) {
          status = SatStatus::Sat;
          return true;
        }
        next = 2 * static_cast<ILit>(v) + phase_[v];
        ++stats.decisions;
      }
      trail_lim_.push_back(trail_.size());
      enqueue(next, kNoReason);
    }
  }

  void reduce_db() {
    std::vector<CRef> learnts;
    for (CRef cr = 0; cr < clauses_.size(); ++cr)
      if (clauses_[cr].learnt && !clauses_[cr].removed) learnts.push_back(cr);
    std::sort(learnts.begin(), learnts.end(), [&](CRef a, CRef b) {
      if (clauses_[a].activity != clauses_[b].activity)
        return clauses_[a].activity < clauses_[b].activity;
      return a < b;
    });
    std::size_t target = learnts.size() / 2;
    for (std::size_t k = 0; k < target; ++k) {
      Clause& c = clauses_[learnts[k]];
      if (c.lits.size() <= 2 || locked(learnts[k])) continue;
      c.removed = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
      --num_learnts_;
    }
    for (auto& ws : watches_)
      ws.erase(std::remove_if(ws.begin(), ws.end(),
                              [&](const Watcher& w) { return clauses_[w.cref].removed; }),
               ws.end());
  }

  bool locked(CRef cr) const {
    const Clause& c = clauses_[cr];
    std::uint32_t v = ivar(c.lits[0]);
    return reason_[v] == cr && value(c.lits[0]) == kTrue;
  }

  void bump_var(std::uint32_t v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
  }

  void bump_clause(Clause& c) {
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
      for (Clause& d : clauses_)
        if (d.learnt) d.activity *= 1e-20;
      clause_inc_ *= 1e-20;
    }
  }

  std::int64_t pick_branch_var() {
    while (!heap_.empty()) {
      std::uint32_t v = heap_pop();
      if (assigns_[v] == kUndef) return v;
    }
    return -1;
  }

  // Max-heap on activity; ties broken by smaller variable id.
  bool before(std::uint32_t a, std::uint32_t b) const {
    return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
  }
  void heap_insert(std::uint32_t v) {
    heap_pos_[v] = static_cast<std::int64_t>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
  }
  void heap_up(std::size_t i) {
    std::uint32_t v = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!before(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
      i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<std::int64_t>(i);
  }
  std::uint32_t heap_pop() {
    std::uint32_t top = heap_[0];
    heap_pos_[top] = -1;
    std::uint32_t last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      std::size_t i = 0;
      while (true) {
        std::size_t l = 2 * i + 1, r = l + 1, best = i;
        std::uint32_t best_v = last;
        if (l < heap_.size() && before(heap_[l], best_v)) best = l, best_v = heap_[l];
        if (r < heap_.size() && before(heap_[r], best_v)) best = r, best_v = heap_[r];
        if (best == i) break;
        heap_[i] = heap_[best];
        heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
        i = best;
      }
      heap_[i] = last;
      heap_pos_[last] = static_cast<std::int64_t>(i);
    }
    return top;
  }

  SolverOptions opts_;
  std::uint32_t n_;
  std::vector<std::uint8_t> assigns_;
  std::vector<std::uint32_t> level_;
  std::vector<CRef> reason_;
  std::vector<std::uint8_t> phase_;  // saved sign bit; 1 means negative
  std::vector<double> activity_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<Clause> clauses_;
  std::vector<ILit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<ILit> assumptions_;
  std::vector<std::uint32_t> heap_;
  std::vector<std::int64_t> heap_pos_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  double max_learnts_ = 0;
  std::size_t num_learnts_ = 0;
};

}  // namespace

SolveResult solve(const Cnf& cnf, std::span<const Lit> assumptions, const SolverOptions& options) {
  auto start = std::chrono::steady_clock::now();
  SolveResult result;
  for (const auto& clause : cnf.clauses) {
    if (clause.empty()) throw Error("solve: empty clause");
    for (Lit l : clause)
      if (l == 0 || var_of(l) > cnf.num_vars) throw Error("solve: literal out of range");
  }
  for (Lit a : assumptions)
    if (a == 0 || var_of(a) > cnf.num_vars) throw Error("solve: assumption out of range");

  Cdcl solver(cnf.num_vars, options);
  bool ok = true;
  for (const auto& clause : cnf.clauses)
    if (!solver.add_clause(clause)) {
      ok = false;
      break;
    }
  result.status = ok ? solver.run(assumptions, result.stats) : SatStatus::Unsat;
  if (result.status == SatStatus::Sat) {
    result.model = solver.model();
    bool assumptions_hold = std::all_of(assumptions.begin(), assumptions.end(), [&](Lit a) {
      return result.model[var_of(a)] == (a > 0);
    });
    if (!satisfies(cnf, result.model) || !assumptions_hold)
      throw InconsistentModel("solver model violates the input clauses");
  }
  result.stats.wall_millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace clover
