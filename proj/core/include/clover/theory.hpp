#ifndef CLOVER_THEORY_HPP
#define CLOVER_THEORY_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clover {

using SortId = std::uint32_t;
using SymbolId = std::uint32_t;
using ElemId = std::uint32_t;

struct IntRange {
  std::int64_t low = 0;
  std::int64_t high = 0;
};

struct SortDecl {
  std::string name;
  std::vector<std::string> elements;
  std::optional<IntRange> range;  // set for contiguous integer sorts

  bool is_integer() const { return range.has_value(); }
  std::size_t size() const { return elements.size(); }
};

struct FunctionDecl {
  std::string name;
  std::vector<SortId> args;
  SortId result = 0;
};

struct PredicateDecl {
  std::string name;
  std::vector<SortId> args;
};

// A finite many-sorted signature together with its single generating
// structure skeleton: every sort has a fixed finite domain, and every domain
// element is a constant interpreted as itself. Any total assignment of
// function and predicate tables over these domains is a model candidate.
//
// Theory is an immutable handle; copies share the same declarations.
class Theory {
 public:
  class Builder {
   public:
    Builder& add_sort(std::string name, std::vector<std::string> elements);
    Builder& add_integer_sort(std::string name, std::int64_t low, std::int64_t high);
    Builder& add_function(std::string name, std::vector<std::string> arg_sorts,
                          std::string result_sort);
    Builder& add_predicate(std::string name, std::vector<std::string> arg_sorts);

    // Validates every invariant and throws InvalidTheory on the first
    // violation.
    Theory build() const;

   private:
    struct PendingSymbol {
      std::string name;
      std::vector<std::string> args;
      std::string result;
    };
    std::vector<SortDecl> sorts_;
    std::vector<PendingSymbol> functions_;
    std::vector<PendingSymbol> predicates_;
  };

  Theory();  // the empty theory (no sorts, no symbols)

  const std::vector<SortDecl>& sorts() const;
  const std::vector<FunctionDecl>& functions() const;
  const std::vector<PredicateDecl>& predicates() const;

  const SortDecl& sort(SortId id) const { return sorts()[id]; }
  const FunctionDecl& function(SymbolId id) const { return functions()[id]; }
  const PredicateDecl& predicate(SymbolId id) const { return predicates()[id]; }

  std::optional<SortId> find_sort(std::string_view name) const;
  std::optional<SymbolId> find_function(std::string_view name) const;
  std::optional<SymbolId> find_predicate(std::string_view name) const;

  // Symbolic (non-integer) element lookup; symbolic names are unique across
  // sorts.
  struct ElementRef {
    SortId sort;
    ElemId element;
  };
  std::optional<ElementRef> find_symbolic_element(std::string_view name) const;

  // Element lookup within one sort; integer sorts accept decimal names.
  std::optional<ElemId> element_index(SortId sort, std::string_view name) const;

  // First declared integer sort whose range contains the value.
  std::optional<SortId> integer_sort_containing(std::int64_t value) const;

  std::size_t domain_size(SortId sort) const { return sorts()[sort].size(); }
  const std::string& element_name(SortId sort, ElemId element) const {
    return sorts()[sort].elements[element];
  }

  // Integer sorts: the integer denoted by an element. Symbolic sorts: the
  // element index.
  std::int64_t value_of(SortId sort, ElemId element) const;
  // Inverse of value_of; nullopt when the value lies outside the domain.
  std::optional<ElemId> element_of(SortId sort, std::int64_t value) const;

  // Number of argument tuples for the given argument sorts.
  std::size_t tuple_count(std::span<const SortId> args) const;
  // Mixed-radix index of a tuple; the first argument is most significant so
  // index order is lexicographic tuple order.
  std::size_t tuple_index(std::span<const SortId> args, std::span<const ElemId> tuple) const;
  std::vector<ElemId> tuple_at(std::span<const SortId> args, std::size_t index) const;

  bool operator==(const Theory& other) const;

 private:
  struct Data;
  explicit Theory(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

}  // namespace clover

#endif  // CLOVER_THEORY_HPP
