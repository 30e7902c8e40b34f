#ifndef CLOVER_TEXT_HPP
#define CLOVER_TEXT_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clover/error.hpp"
#include "clover/formula.hpp"
#include "clover/theory.hpp"

namespace clover {

enum class ParseErrorKind { Lexical, Syntax, UnknownSymbol, Arity, Sort };

const char* to_string(ParseErrorKind kind);

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, SourceSpan span, std::string message,
             std::optional<SortErrorKind> sort_kind = std::nullopt);

  ParseErrorKind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }
  // Set when the error came from sort checking.
  std::optional<SortErrorKind> sort_kind() const { return sort_kind_; }
  const std::string& detail() const { return detail_; }

 private:
  ParseErrorKind kind_;
  SourceSpan span_;
  std::string detail_;
  std::optional<SortErrorKind> sort_kind_;
};

// Theory declarations, one per line or free-form:
//
//   sort positions = 1..6
//   sort potters = {Larsen, Mills, Reigel}
//   func displayed : positions -> potters
//   func winner : -> potters
//   pred adjacent : positions * positions
Theory parse_theory(std::string_view source);

// A closed, sort-checked formula. Precedence from tightest to loosest:
// `~`, `&`, `|`, `->` (right associative), `<->`. Quantifier bodies extend
// as far right as possible.
Formula parse_formula(const Theory& theory, std::string_view source);

// Canonical text with minimal parentheses; parse_formula inverts it.
std::string print_formula(const Formula& formula);
std::string print_term(const Term& term);
std::string print_theory(const Theory& theory);

// A `.fol` document: an optional `theory { ... }` block followed by named
// `formula <name> { ... }` blocks.
struct FolDocument {
  std::optional<Theory> theory;
  std::vector<std::pair<std::string, Formula>> formulas;

  const Formula* find(std::string_view name) const;
};

// Formula blocks require a theory block; `theory` supplies one externally
// when the document has none.
FolDocument parse_document(std::string_view source,
                           const std::optional<Theory>& theory = std::nullopt);

}  // namespace clover

#endif  // CLOVER_TEXT_HPP
