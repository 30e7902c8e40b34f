#include "clover/ground.hpp"

#include <algorithm>
#include <map>

#include "clover/error.hpp"
#include "clover/semantics.hpp"

namespace clover {

// ---------------------------------------------------------------- VarMap

VarMap::VarMap(Theory theory) : theory_(std::move(theory)) {
  roles_.emplace_back();
  for (SymbolId f = 0; f < theory_.functions().size(); ++f) {
    const FunctionDecl& decl = theory_.function(f);
    function_base_.push_back(static_cast<std::uint32_t>(roles_.size()));
    std::size_t tuples = theory_.tuple_count(decl.args);
    std::size_t values = theory_.domain_size(decl.result);
    for (std::size_t t = 0; t < tuples; ++t)
      for (ElemId v = 0; v < values; ++v)
        roles_.push_back({VarRole::Kind::Selector, f, t, v});
  }
  num_selectors_ = static_cast<std::uint32_t>(roles_.size() - 1);
  for (SymbolId p = 0; p < theory_.predicates().size(); ++p) {
    predicate_base_.push_back(static_cast<std::uint32_t>(roles_.size()));
    std::size_t tuples = theory_.tuple_count(theory_.predicate(p).args);
    for (std::size_t t = 0; t < tuples; ++t) roles_.push_back({VarRole::Kind::Predicate, p, t, 0});
  }
  num_predicate_vars_ = static_cast<std::uint32_t>(roles_.size() - 1) - num_selectors_;
}

Var VarMap::selector(SymbolId function, std::size_t tuple, ElemId value) const {
  std::size_t width = theory_.domain_size(theory_.function(function).result);
  return static_cast<Var>(function_base_[function] + tuple * width + value);
}

Var VarMap::predicate_var(SymbolId predicate, std::size_t tuple) const {
  return static_cast<Var>(predicate_base_[predicate] + tuple);
}

Var VarMap::new_auxiliary() {
  roles_.emplace_back();
  return static_cast<Var>(roles_.size() - 1);
}

std::string VarMap::describe(Var v) const {
  const VarRole& r = role(v);
  auto args = [&](const std::vector<SortId>& sorts) {
    std::string out = "(";
    auto tuple = theory_.tuple_at(sorts, r.tuple);
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) out += ',';
      out += theory_.element_name(sorts[i], tuple[i]);
    }
    return out + ")";
  };
  switch (r.kind) {
    case VarRole::Kind::Selector: {
      const FunctionDecl& decl = theory_.function(r.symbol);
      return "sel " + decl.name + args(decl.args) + "=" + theory_.element_name(decl.result, r.value);
    }
    case VarRole::Kind::Predicate: {
      const PredicateDecl& decl = theory_.predicate(r.symbol);
      return "pv " + decl.name + args(decl.args);
    }
    case VarRole::Kind::Auxiliary:
      break;
  }
  return "aux";
}

// --------------------------------------------------------------- Circuit

std::size_t Circuit::KeyHash::operator()(const Node& n) const {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x9e3779b97f4a7c15ULL ^ n.var;
  for (NodeId c : n.children) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

bool Circuit::KeyEq::operator()(const Node& a, const Node& b) const {
  return a.kind == b.kind && a.var == b.var && a.children == b.children;
}

Circuit::Circuit() {
  true_ = intern({Kind::True, 0, {}});
  false_ = intern({Kind::False, 0, {}});
}

Circuit::NodeId Circuit::intern(Node node) {
  auto it = index_.find(node);
  if (it != index_.end()) return it->second;
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(node);
  index_.emplace(std::move(node), id);
  return id;
}

Circuit::NodeId Circuit::variable(Var v) { return intern({Kind::Var, v, {}}); }

Circuit::NodeId Circuit::negate(NodeId id) {
  if (id == true_) return false_;
  if (id == false_) return true_;
  if (nodes_[id].kind == Kind::Not) return nodes_[id].children[0];
  return intern({Kind::Not, 0, {id}});
}

Circuit::NodeId Circuit::conjunction(std::vector<NodeId> children) {
  return gate(Kind::And, std::move(children));
}

Circuit::NodeId Circuit::disjunction(std::vector<NodeId> children) {
  return gate(Kind::Or, std::move(children));
}

Circuit::NodeId Circuit::gate(Kind kind, std::vector<NodeId> children) {
  NodeId absorbing = kind == Kind::And ? false_ : true_;
  NodeId identity = kind == Kind::And ? true_ : false_;
  std::vector<NodeId> flat;
  for (NodeId c : children) {
    if (c == absorbing) return absorbing;
    if (c == identity) continue;
    if (nodes_[c].kind == kind)
      flat.insert(flat.end(), nodes_[c].children.begin(), nodes_[c].children.end());
    else
      flat.push_back(c);
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  for (NodeId c : flat)
    if (nodes_[c].kind == Kind::Not &&
        std::binary_search(flat.begin(), flat.end(), nodes_[c].children[0]))
      return absorbing;
  if (flat.empty()) return identity;
  if (flat.size() == 1) return flat[0];
  return intern({kind, 0, std::move(flat)});
}

bool Circuit::evaluate(NodeId root, const Assignment& assignment) const {
  std::vector<std::int8_t> memo(nodes_.size(), -1);
  auto eval = [&](auto&& self, NodeId id) -> bool {
    if (memo[id] >= 0) return memo[id] != 0;
    const Node& n = nodes_[id];
    bool value = false;
    switch (n.kind) {
      case Kind::True: value = true; break;
      case Kind::False: value = false; break;
      case Kind::Var: value = n.var < assignment.size() && assignment[n.var]; break;
      case Kind::Not: value = !self(self, n.children[0]); break;
      case Kind::And:
        value = std::all_of(n.children.begin(), n.children.end(),
                            [&](NodeId c) { return self(self, c); });
        break;
      case Kind::Or:
        value = std::any_of(n.children.begin(), n.children.end(),
                            [&](NodeId c) { return self(self, c); });
        break;
    }
    memo[id] = value ? 1 : 0;
    return value;
  };
  return eval(eval, root);
}

// ------------------------------------------------------------- expansion

Formula expand_quantifiers(const Theory& theory, const Formula& formula) {
  return std::visit(
      [&](const auto& node) -> Formula {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Negation>) {
          return Formula::negation(expand_quantifiers(theory, node.operand), formula.span());
        } else if constexpr (std::is_same_v<T, BinaryFormula>) {
          return Formula::binary(node.op, expand_quantifiers(theory, node.lhs),
                                 expand_quantifiers(theory, node.rhs), formula.span());
        } else if constexpr (std::is_same_v<T, QuantifiedFormula>) {
          auto sort = theory.find_sort(node.sort);
          if (!sort)
            throw IllTyped({{SortErrorKind::UnknownSymbol, node.sort,
                             "unknown sort '" + node.sort + "'", formula.span()}});
          // Expanding the body first handles shadowing: inner binders of the
          // same name have already been replaced.
          Formula body = expand_quantifiers(theory, node.body);
          std::vector<Formula> instances;
          for (ElemId e = 0; e < theory.domain_size(*sort); ++e)
            instances.push_back(substitute(
                body, node.variable, Term::constant(theory.element_name(*sort, e), node.sort)));
          return node.quantifier == Quantifier::Forall ? conjoin(instances) : disjoin(instances);
        } else {
          return formula;
        }
      },
      formula.node().value);
}

// --------------------------------------------------------------- encoder

namespace {

using NodeId = Circuit::NodeId;

class Encoder {
 public:
  Encoder(const Theory& theory, VarMap& vars, Circuit& circuit)
      : theory_(theory), vars_(vars), c_(circuit) {}

  NodeId formula(const Formula& f) {
    return std::visit(
        [&](const auto& node) -> NodeId {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, EqualAtom>) {
            return relation(node.lhs, node.rhs, [](std::int64_t a, std::int64_t b) { return a == b; });
          } else if constexpr (std::is_same_v<T, CompareAtom>) {
            switch (node.op) {
              case CompareOp::Less:
                return relation(node.lhs, node.rhs, [](auto a, auto b) { return a < b; });
              case CompareOp::LessEqual:
                return relation(node.lhs, node.rhs, [](auto a, auto b) { return a <= b; });
              case CompareOp::Greater:
                return relation(node.lhs, node.rhs, [](auto a, auto b) { return a > b; });
              case CompareOp::GreaterEqual:
                return relation(node.lhs, node.rhs, [](auto a, auto b) { return a >= b; });
            }
            return c_.constant(false);
          } else if constexpr (std::is_same_v<T, PredicateAtom>) {
            SymbolId p = *theory_.find_predicate(node.name);
            const auto& sorts = theory_.predicate(p).args;
            std::vector<NodeId> cases;
            for_each_tuple(sorts, node.args, [&](const std::vector<ElemId>& tuple, NodeId cond) {
              NodeId pv = c_.variable(vars_.predicate_var(p, theory_.tuple_index(sorts, tuple)));
              cases.push_back(c_.conjunction({cond, pv}));
            });
            return c_.disjunction(std::move(cases));
          } else if constexpr (std::is_same_v<T, Negation>) {
            return c_.negate(formula(node.operand));
          } else if constexpr (std::is_same_v<T, BinaryFormula>) {
            NodeId a = formula(node.lhs);
            NodeId b = formula(node.rhs);
            switch (node.op) {
              case Connective::And: return c_.conjunction({a, b});
              case Connective::Or: return c_.disjunction({a, b});
              case Connective::Implies: return c_.disjunction({c_.negate(a), b});
              case Connective::Iff:
                return c_.conjunction(
                    {c_.disjunction({c_.negate(a), b}), c_.disjunction({a, c_.negate(b)})});
            }
            return c_.constant(false);
          } else {
            throw Error("encode: formula still contains a quantifier");
          }
        },
        f.node().value);
  }

 private:
  // Candidate values of a term, each with the condition under which the term
  // takes it. Values absent from the list are impossible; when no condition
  // holds the term is undefined.
  using Values = std::vector<std::pair<std::int64_t, NodeId>>;

  Values term(const Term& t) {
    return std::visit(
        [&](const auto& node) -> Values {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ConstantTerm>) {
            SortId sort = *theory_.find_sort(node.sort);
            return {{theory_.value_of(sort, *theory_.element_index(sort, node.element)),
                     c_.constant(true)}};
          } else if constexpr (std::is_same_v<T, ApplyTerm>) {
            SymbolId f = *theory_.find_function(node.function);
            const FunctionDecl& decl = theory_.function(f);
            std::size_t width = theory_.domain_size(decl.result);
            std::vector<std::vector<NodeId>> cases(width);
            for_each_tuple(decl.args, node.args, [&](const std::vector<ElemId>& tuple, NodeId cond) {
              std::size_t index = theory_.tuple_index(decl.args, tuple);
              for (ElemId v = 0; v < width; ++v)
                cases[v].push_back(c_.conjunction({cond, c_.variable(vars_.selector(f, index, v))}));
            });
            Values out;
            for (ElemId v = 0; v < width; ++v) {
              NodeId g = c_.disjunction(std::move(cases[v]));
              if (g != c_.constant(false)) out.emplace_back(theory_.value_of(decl.result, v), g);
            }
            return out;
          } else if constexpr (std::is_same_v<T, OffsetTerm>) {
            Values out = term(node.base);
            for (auto& [value, cond] : out) value += node.delta;
            return out;
          } else {
            throw Error("encode: formula is not ground (variable '" + node.name + "')");
          }
        },
        t.node().value);
  }

  template <typename Op>
  NodeId relation(const Term& lhs, const Term& rhs, Op op) {
    Values a = term(lhs);
    Values b = term(rhs);
    std::vector<NodeId> cases;
    for (const auto& [va, ga] : a)
      for (const auto& [vb, gb] : b)
        if (op(va, vb)) cases.push_back(c_.conjunction({ga, gb}));
    return c_.disjunction(std::move(cases));
  }

  // Calls fn(tuple, condition) for every in-range argument tuple the terms
  // can denote. Out-of-range values make the application undefined and are
  // skipped.
  template <typename Fn>
  void for_each_tuple(const std::vector<SortId>& sorts, const std::vector<Term>& args, Fn fn) {
    std::vector<std::vector<std::pair<ElemId, NodeId>>> choices(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
      for (const auto& [value, cond] : term(args[i]))
        if (auto e = theory_.element_of(sorts[i], value)) choices[i].emplace_back(*e, cond);
      if (choices[i].empty()) return;
    }
    std::vector<std::size_t> pick(args.size(), 0);
    std::vector<ElemId> tuple(args.size());
    std::vector<NodeId> conds(args.size());
    while (true) {
      for (std::size_t i = 0; i < args.size(); ++i) {
        tuple[i] = choices[i][pick[i]].first;
        conds[i] = choices[i][pick[i]].second;
      }
      fn(tuple, c_.conjunction(conds));
      std::size_t i = args.size();
      while (i > 0 && ++pick[i - 1] == choices[i - 1].size()) pick[--i] = 0;
      if (i == 0) return;
    }
  }

  const Theory& theory_;
  VarMap& vars_;
  Circuit& c_;
};

class Tseitin {
 public:
  Tseitin(const Circuit& circuit, VarMap& vars, Cnf& cnf)
      : c_(circuit), vars_(vars), cnf_(cnf), gate_var_(circuit.size(), 0), done_(circuit.size(), 0) {}

  void assert_root(NodeId id) {
    const Circuit::Node& n = c_.node(id);
    switch (n.kind) {
      case Circuit::Kind::True:
        return;
      case Circuit::Kind::False: {
        // Clauses must be non-empty, so an unsatisfiable root is spelled
        // out with a fresh variable.
        Lit x = static_cast<Lit>(vars_.new_auxiliary());
        emit({x});
        emit({-x});
        return;
      }
      case Circuit::Kind::And:
        for (NodeId child : n.children) assert_root(child);
        return;
      case Circuit::Kind::Or: {
        std::vector<Lit> clause;
        for (NodeId child : n.children) clause.push_back(literal(child, true));
        emit(std::move(clause));
        return;
      }
      default:
        emit({literal(id, true)});
    }
  }

  void emit(std::vector<Lit> clause) {
    std::vector<Lit> out;
    for (Lit l : clause) {
      if (std::find(out.begin(), out.end(), -l) != out.end()) return;  // tautology
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    cnf_.clauses.push_back(std::move(out));
  }

 private:
  // Literal equivalent to the node in the requested polarity: a positive
  // gate only needs x -> gate, a negative one gate -> x.
  Lit literal(NodeId id, bool positive) {
    const Circuit::Node& n = c_.node(id);
    switch (n.kind) {
      case Circuit::Kind::Var:
        return static_cast<Lit>(n.var);
      case Circuit::Kind::Not:
        return -literal(n.children[0], !positive);
      case Circuit::Kind::True:
      case Circuit::Kind::False: {
        if (!gate_var_[id]) {
          gate_var_[id] = static_cast<Lit>(vars_.new_auxiliary());
          emit({n.kind == Circuit::Kind::True ? gate_var_[id] : -gate_var_[id]});
        }
        return gate_var_[id];
      }
      case Circuit::Kind::And:
      case Circuit::Kind::Or:
        break;
    }
    if (!gate_var_[id]) gate_var_[id] = static_cast<Lit>(vars_.new_auxiliary());
    Lit x = gate_var_[id];
    std::uint8_t bit = positive ? 1 : 2;
    if (done_[id] & bit) return x;
    done_[id] |= bit;

    bool conj = n.kind == Circuit::Kind::And;
    std::vector<Lit> kids;
    for (NodeId child : n.children) kids.push_back(literal(child, positive));
    if (conj == positive) {
      // And, positive: x -> c_i.   Or, negative: c_i -> x.
      for (Lit k : kids) emit(positive ? std::vector<Lit>{-x, k} : std::vector<Lit>{x, -k});
    } else {
      // And, negative: (c_1 & ... & c_n) -> x.   Or, positive: x -> (c_1 | ... | c_n).
      std::vector<Lit> clause{positive ? -x : x};
      for (Lit k : kids) clause.push_back(positive ? k : -k);
      emit(std::move(clause));
    }
    return x;
  }

  const Circuit& c_;
  VarMap& vars_;
  Cnf& cnf_;
  std::vector<Lit> gate_var_;
  std::vector<std::uint8_t> done_;
};

}  // namespace

Encoding encode(const Theory& theory, const std::vector<Formula>& formulas) {
  Encoding enc{Cnf{}, VarMap(theory), Circuit{}, {}};
  Encoder encoder(theory, enc.vars, enc.circuit);
  for (const Formula& f : formulas)
    enc.roots.push_back(encoder.formula(expand_quantifiers(theory, f)));

  Tseitin tseitin(enc.circuit, enc.vars, enc.cnf);
  for (NodeId root : enc.roots) tseitin.assert_root(root);

  for (SymbolId f = 0; f < theory.functions().size(); ++f) {
    const FunctionDecl& decl = theory.function(f);
    std::size_t width = theory.domain_size(decl.result);
    for (std::size_t t = 0; t < theory.tuple_count(decl.args); ++t) {
      std::vector<Lit> at_least_one;
      for (ElemId v = 0; v < width; ++v) at_least_one.push_back(static_cast<Lit>(enc.vars.selector(f, t, v)));
      tseitin.emit(at_least_one);
      for (std::size_t i = 0; i < width; ++i)
        for (std::size_t j = i + 1; j < width; ++j)
          tseitin.emit({-at_least_one[i], -at_least_one[j]});
    }
  }
  enc.cnf.num_vars = enc.vars.num_vars();
  return enc;
}

Encoding ground(const Theory& theory, const std::vector<Formula>& formulas) {
  for (const Formula& f : formulas) require_well_typed(theory, f);
  return encode(theory, formulas);
}

Interpretation decode_model(const VarMap& vars, const Assignment& assignment) {
  const Theory& theory = vars.theory();
  if (assignment.size() <= vars.num_selectors() + vars.num_predicate_vars())
    throw InconsistentModel("assignment is shorter than the variable map");
  Interpretation interp(theory);
  for (SymbolId f = 0; f < theory.functions().size(); ++f) {
    const FunctionDecl& decl = theory.function(f);
    std::size_t width = theory.domain_size(decl.result);
    auto table = interp.function_table(f);
    for (std::size_t t = 0; t < table.size(); ++t) {
      int count = 0;
      for (ElemId v = 0; v < width; ++v) {
        if (assignment[vars.selector(f, t, v)]) {
          table[t] = v;
          ++count;
        }
      }
      if (count != 1) {
        std::string point = vars.describe(vars.selector(f, t, 0));
        point = point.substr(4, point.rfind('=') - 4);
        throw InconsistentModel(std::to_string(count) + " true selectors for " + point);
      }
    }
  }
  for (SymbolId p = 0; p < theory.predicates().size(); ++p) {
    auto& table = interp.predicate_table(p);
    for (std::size_t t = 0; t < table.size(); ++t)
      table[t] = assignment[vars.predicate_var(p, t)] ? 1 : 0;
  }
  return interp;
}

std::vector<std::string> dimacs_comments(const VarMap& vars) {
  std::vector<std::string> out;
  Var last = vars.num_selectors() + vars.num_predicate_vars();
  for (Var v = 1; v <= last; ++v) out.push_back(vars.describe(v) + " " + std::to_string(v));
  return out;
}

}  // namespace clover
