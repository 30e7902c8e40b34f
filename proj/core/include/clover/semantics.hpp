#ifndef CLOVER_SEMANTICS_HPP
#define CLOVER_SEMANTICS_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "clover/error.hpp"
#include "clover/formula.hpp"
#include "clover/interpretation.hpp"
#include "clover/theory.hpp"

namespace clover {

struct CheckReport {
  std::vector<SortError> errors;
  bool ok() const { return errors.empty(); }
};

// Checks that every symbol is declared and applied with the right arity and
// sorts, and that the formula is closed.
CheckReport sort_check(const Theory& theory, const Formula& formula);

// Throws IllTyped when sort_check reports errors.
void require_well_typed(const Theory& theory, const Formula& formula);

// Sort of a term under the theory (integer offsets keep their base sort);
// nullopt when the term does not type.
std::optional<SortId> sort_of(const Theory& theory, const Term& term);

// Tarskian truth value of a closed, well-typed formula. Throws IllTyped
// otherwise.
//
// Integer-sorted terms denote integers; `t + k` may leave its sort's range.
// Such a value still compares over the integers, but applying a function or
// predicate to an out-of-range argument is undefined, and every atom that
// contains an undefined term is false.
bool evaluate(const Interpretation& interp, const Formula& formula);

// evaluate() without the sort check, for hot loops over many
// interpretations. The formula must already be closed and well typed.
bool evaluate_unchecked(const Interpretation& interp, const Formula& formula);

// Replaces free occurrences of `variable` with the constant term `element`.
// Throws IllTyped (SortMismatch) if an occurrence has a different sort.
Formula substitute(const Formula& formula, std::string_view variable, const Term& element);

}  // namespace clover

#endif  // CLOVER_SEMANTICS_HPP
