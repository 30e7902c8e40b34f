#include "clover/semantics.hpp"

#include <string_view>

#include "clover/text.hpp"

namespace clover {

namespace {

struct Binding {
  std::string_view name;
  SortId sort;
};

class SortChecker {
 public:
  explicit SortChecker(const Theory& theory) : theory_(theory) {}

  void check(const Formula& f) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, EqualAtom>) {
            auto a = term(node.lhs);
            auto b = term(node.rhs);
            if (a && b && *a != *b &&
                !(theory_.sort(*a).is_integer() && theory_.sort(*b).is_integer()))
              report(SortErrorKind::SortMismatch, f,
                     "cannot equate sorts '" + theory_.sort(*a).name + "' and '" +
                         theory_.sort(*b).name + "'");
          } else if constexpr (std::is_same_v<T, CompareAtom>) {
            auto a = term(node.lhs);
            auto b = term(node.rhs);
            for (auto s : {a, b})
              if (s && !theory_.sort(*s).is_integer())
                report(SortErrorKind::SortMismatch, f,
                       "comparison needs integer sorts, found '" + theory_.sort(*s).name + "'");
          } else if constexpr (std::is_same_v<T, PredicateAtom>) {
            auto id = theory_.find_predicate(node.name);
            if (!id) {
              report(SortErrorKind::UnknownSymbol, f, "unknown predicate '" + node.name + "'");
              for (const Term& t : node.args) term(t);
              return;
            }
            arguments(theory_.predicate(*id).args, node.args, node.name, f.span(),
                      print_formula(f));
          } else if constexpr (std::is_same_v<T, Negation>) {
            check(node.operand);
          } else if constexpr (std::is_same_v<T, BinaryFormula>) {
            check(node.lhs);
            check(node.rhs);
          } else {
            auto sort = theory_.find_sort(node.sort);
            if (!sort) {
              report(SortErrorKind::UnknownSymbol, f, "unknown sort '" + node.sort + "'");
              return;
            }
            scope_.push_back({node.variable, *sort});
            check(node.body);
            scope_.pop_back();
          }
        },
        f.node().value);
  }

  std::optional<SortId> term(const Term& t) {
    return std::visit(
        [&](const auto& node) -> std::optional<SortId> {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, VariableTerm>) {
            const Binding* b = lookup(node.name);
            if (!b) {
              report(SortErrorKind::FreeVariable, t, "free variable '" + node.name + "'");
              return std::nullopt;
            }
            if (theory_.sort(b->sort).name != node.sort) {
              report(SortErrorKind::SortMismatch, t,
                     "variable '" + node.name + "' is bound with sort '" +
                         theory_.sort(b->sort).name + "'");
              return std::nullopt;
            }
            return b->sort;
          } else if constexpr (std::is_same_v<T, ConstantTerm>) {
            auto sort = theory_.find_sort(node.sort);
            if (!sort || !theory_.element_index(*sort, node.element)) {
              report(SortErrorKind::UnknownSymbol, t,
                     "unknown element '" + node.element + "' of sort '" + node.sort + "'");
              return std::nullopt;
            }
            return sort;
          } else if constexpr (std::is_same_v<T, ApplyTerm>) {
            auto id = theory_.find_function(node.function);
            if (!id) {
              report(SortErrorKind::UnknownSymbol, t, "unknown function '" + node.function + "'");
              for (const Term& a : node.args) term(a);
              return std::nullopt;
            }
            const FunctionDecl& decl = theory_.function(*id);
            bool ok = arguments(decl.args, node.args, node.function, t.span(), print_term(t));
            return ok ? std::optional(decl.result) : std::nullopt;
          } else {
            auto sort = term(node.base);
            if (!sort) return std::nullopt;
            if (!theory_.sort(*sort).is_integer()) {
              report(SortErrorKind::SortMismatch, t,
                     "offset applied to non-integer sort '" + theory_.sort(*sort).name + "'");
              return std::nullopt;
            }
            return sort;
          }
        },
        t.node().value);
  }

  std::vector<SortError> errors;

 private:
  bool arguments(const std::vector<SortId>& expected, const std::vector<Term>& args,
                 const std::string& symbol, const SourceSpan& span, const std::string& printed) {
    bool ok = true;
    if (expected.size() != args.size()) {
      errors.push_back({SortErrorKind::ArityMismatch, printed,
                        "'" + symbol + "' expects " + std::to_string(expected.size()) +
                            " argument(s), got " + std::to_string(args.size()),
                        span});
      ok = false;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto sort = term(args[i]);
      if (!sort) {
        ok = false;
        continue;
      }
      if (i < expected.size() && *sort != expected[i]) {
        report(SortErrorKind::SortMismatch, args[i],
               "argument " + std::to_string(i + 1) + " of '" + symbol + "' must have sort '" +
                   theory_.sort(expected[i]).name + "', found '" + theory_.sort(*sort).name + "'");
        ok = false;
      }
    }
    return ok;
  }

  const Binding* lookup(std::string_view name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  void report(SortErrorKind kind, const Term& t, std::string message) {
    errors.push_back({kind, print_term(t), std::move(message), t.span()});
  }
  void report(SortErrorKind kind, const Formula& f, std::string message) {
    errors.push_back({kind, print_formula(f), std::move(message), f.span()});
  }

  const Theory& theory_;
  std::vector<Binding> scope_;
};

// Evaluator over a fixed interpretation. Term values are integers for integer
// sorts and element indices otherwise; nullopt marks an undefined term.
class Evaluator {
 public:
  explicit Evaluator(const Interpretation& interp) : interp_(interp), theory_(interp.theory()) {}

  bool formula(const Formula& f) {
    return std::visit(
        [&](const auto& node) -> bool {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, EqualAtom>) {
            auto a = term(node.lhs);
            auto b = term(node.rhs);
            return a && b && *a == *b;
          } else if constexpr (std::is_same_v<T, CompareAtom>) {
            auto a = term(node.lhs);
            auto b = term(node.rhs);
            if (!a || !b) return false;
            switch (node.op) {
              case CompareOp::Less: return *a < *b;
              case CompareOp::LessEqual: return *a <= *b;
              case CompareOp::Greater: return *a > *b;
              case CompareOp::GreaterEqual: return *a >= *b;
            }
            return false;
          } else if constexpr (std::is_same_v<T, PredicateAtom>) {
            SymbolId id = *theory_.find_predicate(node.name);
            auto tuple = arguments(theory_.predicate(id).args, node.args);
            return tuple && interp_.predicate_value(id, *tuple);
          } else if constexpr (std::is_same_v<T, Negation>) {
            return !formula(node.operand);
          } else if constexpr (std::is_same_v<T, BinaryFormula>) {
            switch (node.op) {
              case Connective::And: return formula(node.lhs) && formula(node.rhs);
              case Connective::Or: return formula(node.lhs) || formula(node.rhs);
              case Connective::Implies: return !formula(node.lhs) || formula(node.rhs);
              case Connective::Iff: return formula(node.lhs) == formula(node.rhs);
            }
            return false;
          } else {
            SortId sort = *theory_.find_sort(node.sort);
            bool forall = node.quantifier == Quantifier::Forall;
            env_.push_back({node.variable, 0});
            bool result = forall;
            for (ElemId e = 0; e < theory_.domain_size(sort); ++e) {
              env_.back().value = theory_.value_of(sort, e);
              if (formula(node.body) != forall) {
                result = !forall;
                break;
              }
            }
            env_.pop_back();
            return result;
          }
        },
        f.node().value);
  }

 private:
  struct Slot {
    std::string_view name;
    std::int64_t value;
  };

  std::optional<std::int64_t> term(const Term& t) {
    return std::visit(
        [&](const auto& node) -> std::optional<std::int64_t> {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, VariableTerm>) {
            for (auto it = env_.rbegin(); it != env_.rend(); ++it)
              if (it->name == node.name) return it->value;
            return std::nullopt;
          } else if constexpr (std::is_same_v<T, ConstantTerm>) {
            SortId sort = *theory_.find_sort(node.sort);
            return theory_.value_of(sort, *theory_.element_index(sort, node.element));
          } else if constexpr (std::is_same_v<T, ApplyTerm>) {
            SymbolId id = *theory_.find_function(node.function);
            const FunctionDecl& decl = theory_.function(id);
            auto tuple = arguments(decl.args, node.args);
            if (!tuple) return std::nullopt;
            return theory_.value_of(decl.result, interp_.function_value(id, *tuple));
          } else {
            auto base = term(node.base);
            if (!base) return std::nullopt;
            return *base + node.delta;
          }
        },
        t.node().value);
  }

  std::optional<std::vector<ElemId>> arguments(const std::vector<SortId>& sorts,
                                               const std::vector<Term>& args) {
    std::vector<ElemId> tuple(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto value = term(args[i]);
      if (!value) return std::nullopt;
      auto element = theory_.element_of(sorts[i], *value);
      if (!element) return std::nullopt;
      tuple[i] = *element;
    }
    return tuple;
  }

  const Interpretation& interp_;
  const Theory& theory_;
  std::vector<Slot> env_;
};

Term substitute_term(const Term& t, std::string_view var, const Term& element,
                     const std::string& element_sort) {
  return std::visit(
      [&](const auto& node) -> Term {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VariableTerm>) {
          if (node.name != var) return t;
          if (node.sort != element_sort)
            throw IllTyped({{SortErrorKind::SortMismatch, print_term(t),
                             "cannot substitute element of sort '" + element_sort +
                                 "' for variable of sort '" + node.sort + "'",
                             t.span()}});
          return element;
        } else if constexpr (std::is_same_v<T, ConstantTerm>) {
          return t;
        } else if constexpr (std::is_same_v<T, ApplyTerm>) {
          std::vector<Term> args;
          args.reserve(node.args.size());
          for (const Term& a : node.args) args.push_back(substitute_term(a, var, element, element_sort));
          return Term::apply(node.function, std::move(args), t.span());
        } else {
          return Term::offset(substitute_term(node.base, var, element, element_sort), node.delta,
                              t.span());
        }
      },
      t.node().value);
}

Formula substitute_formula(const Formula& f, std::string_view var, const Term& element,
                           const std::string& element_sort) {
  auto sub = [&](const Term& t) { return substitute_term(t, var, element, element_sort); };
  auto subf = [&](const Formula& g) { return substitute_formula(g, var, element, element_sort); };
  return std::visit(
      [&](const auto& node) -> Formula {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, EqualAtom>) {
          return Formula::equal(sub(node.lhs), sub(node.rhs), f.span());
        } else if constexpr (std::is_same_v<T, CompareAtom>) {
          return Formula::compare(node.op, sub(node.lhs), sub(node.rhs), f.span());
        } else if constexpr (std::is_same_v<T, PredicateAtom>) {
          std::vector<Term> args;
          for (const Term& a : node.args) args.push_back(sub(a));
          return Formula::predicate(node.name, std::move(args), f.span());
        } else if constexpr (std::is_same_v<T, Negation>) {
          return Formula::negation(subf(node.operand), f.span());
        } else if constexpr (std::is_same_v<T, BinaryFormula>) {
          return Formula::binary(node.op, subf(node.lhs), subf(node.rhs), f.span());
        } else {
          if (node.variable == var) return f;  // rebinds the variable
          return Formula::quantified(node.quantifier, node.variable, node.sort, subf(node.body),
                                     f.span());
        }
      },
      f.node().value);
}

}  // namespace

CheckReport sort_check(const Theory& theory, const Formula& formula) {
  SortChecker checker(theory);
  checker.check(formula);
  return CheckReport{std::move(checker.errors)};
}

void require_well_typed(const Theory& theory, const Formula& formula) {
  CheckReport report = sort_check(theory, formula);
  if (!report.ok()) throw IllTyped(std::move(report.errors));
}

std::optional<SortId> sort_of(const Theory& theory, const Term& term) {
  // Free variables carry their declared sort; check them leniently here.
  if (const auto* v = term.as<VariableTerm>()) return theory.find_sort(v->sort);
  if (const auto* off = term.as<OffsetTerm>()) {
    auto base = sort_of(theory, off->base);
    return base && theory.sort(*base).is_integer() ? base : std::nullopt;
  }
  if (const auto* c = term.as<ConstantTerm>()) {
    auto sort = theory.find_sort(c->sort);
    return sort && theory.element_index(*sort, c->element) ? sort : std::nullopt;
  }
  const auto& app = *term.as<ApplyTerm>();
  auto id = theory.find_function(app.function);
  if (!id) return std::nullopt;
  const FunctionDecl& decl = theory.function(*id);
  if (decl.args.size() != app.args.size()) return std::nullopt;
  for (std::size_t i = 0; i < app.args.size(); ++i)
    if (sort_of(theory, app.args[i]) != decl.args[i]) return std::nullopt;
  return decl.result;
}

bool evaluate(const Interpretation& interp, const Formula& formula) {
  require_well_typed(interp.theory(), formula);
  return Evaluator(interp).formula(formula);
}

bool evaluate_unchecked(const Interpretation& interp, const Formula& formula) {
  return Evaluator(interp).formula(formula);
}

Formula substitute(const Formula& formula, std::string_view variable, const Term& element) {
  const auto* c = element.as<ConstantTerm>();
  if (!c)
    throw IllTyped({{SortErrorKind::SortMismatch, print_term(element),
                     "substitution requires a domain constant", element.span()}});
  return substitute_formula(formula, variable, element, c->sort);
}

}  // namespace clover
