#ifndef CLOVER_FORMULA_HPP
#define CLOVER_FORMULA_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "clover/error.hpp"

namespace clover {

struct TermNode;
struct FormulaNode;

// Immutable sorted term. Symbols are referenced by name so that ill-typed
// input can be represented and reported by sort_check.
class Term {
 public:
  static Term variable(std::string name, std::string sort, SourceSpan span = {});
  static Term constant(std::string element, std::string sort, SourceSpan span = {});
  static Term apply(std::string function, std::vector<Term> args, SourceSpan span = {});
  static Term offset(Term base, std::int64_t delta, SourceSpan span = {});

  const TermNode& node() const { return *node_; }
  template <typename T>
  const T* as() const;
  const SourceSpan& span() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

 private:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
};

struct VariableTerm {
  std::string name;
  std::string sort;  // empty when the variable is unbound
};

// A domain element used as a constant of its sort. For integer sorts the
// element is its decimal spelling.
struct ConstantTerm {
  std::string element;
  std::string sort;
};

struct ApplyTerm {
  std::string function;
  std::vector<Term> args;
};

// base + delta, evaluated over the integers.
struct OffsetTerm {
  Term base;
  std::int64_t delta;
};

struct TermNode {
  std::variant<VariableTerm, ConstantTerm, ApplyTerm, OffsetTerm> value;
  SourceSpan span;
};

template <typename T>
const T* Term::as() const {
  return std::get_if<T>(&node_->value);
}

enum class CompareOp { Less, LessEqual, Greater, GreaterEqual };
enum class Connective { And, Or, Implies, Iff };
enum class Quantifier { Forall, Exists };

const char* to_string(CompareOp op);
const char* to_string(Connective op);
const char* to_string(Quantifier q);

class Formula {
 public:
  static Formula equal(Term lhs, Term rhs, SourceSpan span = {});
  static Formula compare(CompareOp op, Term lhs, Term rhs, SourceSpan span = {});
  static Formula predicate(std::string name, std::vector<Term> args, SourceSpan span = {});
  static Formula negation(Formula operand, SourceSpan span = {});
  static Formula binary(Connective op, Formula lhs, Formula rhs, SourceSpan span = {});
  static Formula conjunction(Formula lhs, Formula rhs) { return binary(Connective::And, lhs, rhs); }
  static Formula disjunction(Formula lhs, Formula rhs) { return binary(Connective::Or, lhs, rhs); }
  static Formula implication(Formula lhs, Formula rhs) {
    return binary(Connective::Implies, lhs, rhs);
  }
  static Formula biconditional(Formula lhs, Formula rhs) {
    return binary(Connective::Iff, lhs, rhs);
  }
  static Formula quantified(Quantifier q, std::string variable, std::string sort, Formula body,
                            SourceSpan span = {});
  static Formula forall(std::string variable, std::string sort, Formula body) {
    return quantified(Quantifier::Forall, std::move(variable), std::move(sort), std::move(body));
  }
  static Formula exists(std::string variable, std::string sort, Formula body) {
    return quantified(Quantifier::Exists, std::move(variable), std::move(sort), std::move(body));
  }

  const FormulaNode& node() const { return *node_; }
  template <typename T>
  const T* as() const;
  const SourceSpan& span() const;

  // Structural equality; source spans are ignored.
  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct EqualAtom {
  Term lhs;
  Term rhs;
};

struct CompareAtom {
  CompareOp op;
  Term lhs;
  Term rhs;
};

struct PredicateAtom {
  std::string name;
  std::vector<Term> args;
};

struct Negation {
  Formula operand;
};

struct BinaryFormula {
  Connective op;
  Formula lhs;
  Formula rhs;
};

struct QuantifiedFormula {
  Quantifier quantifier;
  std::string variable;
  std::string sort;
  Formula body;
};

struct FormulaNode {
  std::variant<EqualAtom, CompareAtom, PredicateAtom, Negation, BinaryFormula, QuantifiedFormula>
      value;
  SourceSpan span;
};

template <typename T>
const T* Formula::as() const {
  return std::get_if<T>(&node_->value);
}

// Conjunction of a non-empty list, folded to the right.
Formula conjoin(const std::vector<Formula>& formulas);
Formula disjoin(const std::vector<Formula>& formulas);

}  // namespace clover

#endif  // CLOVER_FORMULA_HPP
