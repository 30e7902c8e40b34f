#include "clover/formula.hpp"

#include <stdexcept>

namespace clover {

std::string to_string(const SourceSpan& span) {
  if (!span.known()) return "?";
  return std::to_string(span.line) + ":" + std::to_string(span.column);
}

const char* to_string(SortErrorKind kind) {
  switch (kind) {
    case SortErrorKind::UnknownSymbol: return "UnknownSymbol";
    case SortErrorKind::ArityMismatch: return "ArityMismatch";
    case SortErrorKind::SortMismatch: return "SortMismatch";
    case SortErrorKind::FreeVariable: return "FreeVariable";
  }
  return "?";
}

namespace {

std::string describe(const std::vector<SortError>& errors) {
  std::string out = "ill-typed formula";
  for (const SortError& e : errors) {
    out += "\n  ";
    out += to_string(e.kind);
    out += " at " + to_string(e.span) + ": " + e.message;
  }
  return out;
}

}  // namespace

IllTyped::IllTyped(std::vector<SortError> errors)
    : Error(describe(errors)), errors_(std::move(errors)) {}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEqual: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEqual: return ">=";
  }
  return "?";
}

const char* to_string(Connective op) {
  switch (op) {
    case Connective::And: return "&";
    case Connective::Or: return "|";
    case Connective::Implies: return "->";
    case Connective::Iff: return "<->";
  }
  return "?";
}

const char* to_string(Quantifier q) { return q == Quantifier::Forall ? "forall" : "exists"; }

Term Term::variable(std::string name, std::string sort, SourceSpan span) {
  return Term(std::make_shared<const TermNode>(
      TermNode{VariableTerm{std::move(name), std::move(sort)}, span}));
}

Term Term::constant(std::string element, std::string sort, SourceSpan span) {
  return Term(std::make_shared<const TermNode>(
      TermNode{ConstantTerm{std::move(element), std::move(sort)}, span}));
}

Term Term::apply(std::string function, std::vector<Term> args, SourceSpan span) {
  return Term(std::make_shared<const TermNode>(
      TermNode{ApplyTerm{std::move(function), std::move(args)}, span}));
}

Term Term::offset(Term base, std::int64_t delta, SourceSpan span) {
  return Term(std::make_shared<const TermNode>(TermNode{OffsetTerm{std::move(base), delta}, span}));
}

const SourceSpan& Term::span() const { return node_->span; }

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  const auto& a = node_->value;
  const auto& b = other.node_->value;
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const T& rhs = std::get<T>(b);
        if constexpr (std::is_same_v<T, VariableTerm>) {
          return lhs.name == rhs.name && lhs.sort == rhs.sort;
        } else if constexpr (std::is_same_v<T, ConstantTerm>) {
          return lhs.element == rhs.element && lhs.sort == rhs.sort;
        } else if constexpr (std::is_same_v<T, ApplyTerm>) {
          return lhs.function == rhs.function && lhs.args == rhs.args;
        } else {
          return lhs.delta == rhs.delta && lhs.base == rhs.base;
        }
      },
      a);
}

Formula Formula::equal(Term lhs, Term rhs, SourceSpan span) {
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{EqualAtom{std::move(lhs), std::move(rhs)}, span}));
}

Formula Formula::compare(CompareOp op, Term lhs, Term rhs, SourceSpan span) {
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{CompareAtom{op, std::move(lhs), std::move(rhs)}, span}));
}

Formula Formula::predicate(std::string name, std::vector<Term> args, SourceSpan span) {
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{PredicateAtom{std::move(name), std::move(args)}, span}));
}

Formula Formula::negation(Formula operand, SourceSpan span) {
  return Formula(
      std::make_shared<const FormulaNode>(FormulaNode{Negation{std::move(operand)}, span}));
}

Formula Formula::binary(Connective op, Formula lhs, Formula rhs, SourceSpan span) {
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{BinaryFormula{op, std::move(lhs), std::move(rhs)}, span}));
}

Formula Formula::quantified(Quantifier q, std::string variable, std::string sort, Formula body,
                            SourceSpan span) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{
      QuantifiedFormula{q, std::move(variable), std::move(sort), std::move(body)}, span}));
}

const SourceSpan& Formula::span() const { return node_->span; }

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  const auto& a = node_->value;
  const auto& b = other.node_->value;
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const T& rhs = std::get<T>(b);
        if constexpr (std::is_same_v<T, EqualAtom>) {
          return lhs.lhs == rhs.lhs && lhs.rhs == rhs.rhs;
        } else if constexpr (std::is_same_v<T, CompareAtom>) {
          return lhs.op == rhs.op && lhs.lhs == rhs.lhs && lhs.rhs == rhs.rhs;
        } else if constexpr (std::is_same_v<T, PredicateAtom>) {
          return lhs.name == rhs.name && lhs.args == rhs.args;
        } else if constexpr (std::is_same_v<T, Negation>) {
          return lhs.operand == rhs.operand;
        } else if constexpr (std::is_same_v<T, BinaryFormula>) {
          return lhs.op == rhs.op && lhs.lhs == rhs.lhs && lhs.rhs == rhs.rhs;
        } else {
          return lhs.quantifier == rhs.quantifier && lhs.variable == rhs.variable &&
                 lhs.sort == rhs.sort && lhs.body == rhs.body;
        }
      },
      a);
}

Formula conjoin(const std::vector<Formula>& formulas) {
  if (formulas.empty()) throw std::invalid_argument("conjoin of an empty list");
  Formula result = formulas.back();
  for (std::size_t i = formulas.size() - 1; i-- > 0;) result = Formula::conjunction(formulas[i], result);
  return result;
}

Formula disjoin(const std::vector<Formula>& formulas) {
  if (formulas.empty()) throw std::invalid_argument("disjoin of an empty list");
  Formula result = formulas.back();
  for (std::size_t i = formulas.size() - 1; i-- > 0;) result = Formula::disjunction(formulas[i], result);
  return result;
}

}  // namespace clover
