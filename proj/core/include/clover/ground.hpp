#ifndef CLOVER_GROUND_HPP
#define CLOVER_GROUND_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "clover/cnf.hpp"
#include "clover/formula.hpp"
#include "clover/interpretation.hpp"
#include "clover/theory.hpp"

namespace clover {

struct VarRole {
  enum class Kind { Selector, Predicate, Auxiliary };
  Kind kind = Kind::Auxiliary;
  SymbolId symbol = 0;
  std::size_t tuple = 0;  // Theory::tuple_index of the argument tuple
  ElemId value = 0;       // selectors only
};

// Propositional variables of a grounding. Ids are dense: selectors
// sel(f, tuple, v) come first (by function, tuple, value), then predicate
// variables pv(p, tuple), then Tseitin auxiliaries.
class VarMap {
 public:
  explicit VarMap(Theory theory);

  const Theory& theory() const { return theory_; }

  Var selector(SymbolId function, std::size_t tuple, ElemId value) const;
  Var predicate_var(SymbolId predicate, std::size_t tuple) const;
  Var new_auxiliary();

  std::uint32_t num_vars() const { return static_cast<std::uint32_t>(roles_.size() - 1); }
  std::uint32_t num_selectors() const { return num_selectors_; }
  std::uint32_t num_predicate_vars() const { return num_predicate_vars_; }
  const VarRole& role(Var v) const { return roles_.at(v); }

  // `sel f(a,b)=v` / `pv p(a,b)` / `aux`.
  std::string describe(Var v) const;

 private:
  Theory theory_;
  std::vector<std::uint32_t> function_base_;
  std::vector<std::uint32_t> predicate_base_;
  std::vector<VarRole> roles_;  // roles_[0] is a placeholder
  std::uint32_t num_selectors_ = 0;
  std::uint32_t num_predicate_vars_ = 0;
};

// Hash-consed boolean circuit over grounding variables. Construction
// simplifies constants, double negation, duplicate and complementary
// children, and flattens nested gates of the same kind.
class Circuit {
 public:
  using NodeId = std::uint32_t;
  enum class Kind : std::uint8_t { True, False, Var, Not, And, Or };

  struct Node {
    Kind kind;
    Var var = 0;
    std::vector<NodeId> children;
  };

  Circuit();

  NodeId constant(bool value) const { return value ? true_ : false_; }
  NodeId variable(Var v);
  NodeId negate(NodeId node);
  NodeId conjunction(std::vector<NodeId> children);
  NodeId disjunction(std::vector<NodeId> children);

  const Node& node(NodeId id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  // Value of `root` when grounding variables take `assignment`; auxiliaries
  // are never consulted.
  bool evaluate(NodeId root, const Assignment& assignment) const;

 private:
  NodeId intern(Node node);
  NodeId gate(Kind kind, std::vector<NodeId> children);

  struct KeyHash {
    std::size_t operator()(const Node& n) const;
  };
  struct KeyEq {
    bool operator()(const Node& a, const Node& b) const;
  };

  std::vector<Node> nodes_;
  std::unordered_map<Node, NodeId, KeyHash, KeyEq> index_;
  NodeId true_ = 0;
  NodeId false_ = 0;
};

struct Encoding {
  Cnf cnf;
  VarMap vars;
  Circuit circuit;
  std::vector<Circuit::NodeId> roots;  // one per input formula
};

// Replaces every quantifier by the conjunction (forall) or disjunction
// (exists) of its body instantiated with each domain element. The input must
// be closed and well typed.
Formula expand_quantifiers(const Theory& theory, const Formula& formula);

// Equisatisfiable CNF for the conjunction of the formulas: one term-value
// circuit per formula, polarity-aware Tseitin, and exactly-one clauses
// (at-least-one plus pairwise at-most-one) for every function point. Any
// remaining quantifiers are expanded first.
Encoding encode(const Theory& theory, const std::vector<Formula>& formulas);

// Sort-checks every formula (throws IllTyped) and encodes it.
Encoding ground(const Theory& theory, const std::vector<Formula>& formulas);

// Reads function tables off the true selectors and predicate tables off pv
// variables. Throws InconsistentModel if a function point does not have
// exactly one true selector.
Interpretation decode_model(const VarMap& vars, const Assignment& assignment);

// `sel f(args)=v <id>` and `pv p(args) <id>` lines for DIMACS export.
std::vector<std::string> dimacs_comments(const VarMap& vars);

}  // namespace clover

#endif  // CLOVER_GROUND_HPP
