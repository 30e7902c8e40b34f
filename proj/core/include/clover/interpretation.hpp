#ifndef CLOVER_INTERPRETATION_HPP
#define CLOVER_INTERPRETATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clover/theory.hpp"

namespace clover {

// Total function and predicate tables over a theory's domains. Tables are
// indexed by Theory::tuple_index; a fresh interpretation maps every function
// point to the first element of the result sort and every predicate point to
// false.
class Interpretation {
 public:
  explicit Interpretation(Theory theory);

  const Theory& theory() const { return theory_; }

  ElemId function_value(SymbolId function, std::span<const ElemId> args) const;
  void set_function_value(SymbolId function, std::span<const ElemId> args, ElemId value);
  bool predicate_value(SymbolId predicate, std::span<const ElemId> args) const;
  void set_predicate_value(SymbolId predicate, std::span<const ElemId> args, bool value);

  std::span<const ElemId> function_table(SymbolId function) const { return functions_[function]; }
  std::span<ElemId> function_table(SymbolId function) { return functions_[function]; }
  const std::vector<std::uint8_t>& predicate_table(SymbolId predicate) const {
    return predicates_[predicate];
  }
  std::vector<std::uint8_t>& predicate_table(SymbolId predicate) { return predicates_[predicate]; }

  bool operator==(const Interpretation& other) const;

 private:
  Theory theory_;
  std::vector<std::vector<ElemId>> functions_;
  std::vector<std::vector<std::uint8_t>> predicates_;
};

// Interchange: one line per table entry, `f(a1,...,an) = v` or
// `p(a1,...,an) = true|false`, lines sorted lexicographically. Constants
// (nullary functions) are written `f = v`.
std::string to_text(const Interpretation& interp);
Interpretation interpretation_from_text(const Theory& theory, std::string_view text);

// Structured form: {theory, functions: {name: {tupleKey: value}},
// predicates: {name: {tupleKey: bool}}}; tupleKey joins elements with commas.
nlohmann::json to_json(const Interpretation& interp);
Interpretation interpretation_from_json(const Theory& theory, const nlohmann::json& doc);

// Streams every total interpretation of a theory exactly once. Order is
// lexicographic over table entries, where entries are ordered by symbol name,
// then argument tuple; the last entry varies fastest.
class InterpretationEnumerator {
 public:
  static constexpr std::uint64_t kDefaultCap = 10'000'000;

  // Throws TooLarge if the theory has more than `cap` interpretations.
  explicit InterpretationEnumerator(const Theory& theory, std::uint64_t cap = kDefaultCap);

  // Advances to the next interpretation; returns nullptr when exhausted. The
  // returned reference is valid until the next call.
  const Interpretation* next();

  std::uint64_t total() const { return total_; }

 private:
  struct Digit {
    bool is_function;
    SymbolId symbol;
    std::size_t tuple;
    std::uint32_t radix;
  };
  Interpretation current_;
  std::vector<Digit> digits_;
  std::uint64_t total_ = 0;
  bool started_ = false;
  bool done_ = false;
};

// Exact number of interpretations, or nullopt if it exceeds `cap`.
std::optional<std::uint64_t> count_interpretations(const Theory& theory, std::uint64_t cap);

}  // namespace clover

#endif  // CLOVER_INTERPRETATION_HPP
