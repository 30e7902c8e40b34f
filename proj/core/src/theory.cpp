#include "clover/theory.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "clover/error.hpp"

namespace clover {

namespace {

// Integer sorts are materialized element by element, so keep them desk-sized.
constexpr std::int64_t kMaxIntegerSortSize = 100000;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

using NameIndex = std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>>;

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

template <typename Map>
std::optional<std::uint32_t> lookup(const Map& map, std::string_view name) {
  auto it = map.find(name);
  if (it == map.end()) return std::nullopt;
  return it->second;
}

}  // namespace

struct Theory::Data {
  std::vector<SortDecl> sorts;
  std::vector<FunctionDecl> functions;
  std::vector<PredicateDecl> predicates;
  NameIndex sort_index;
  NameIndex function_index;
  NameIndex predicate_index;
  std::unordered_map<std::string, ElementRef, StringHash, std::equal_to<>> symbolic_elements;
  std::vector<NameIndex> element_index;  // per symbolic sort
};

Theory::Builder& Theory::Builder::add_sort(std::string name, std::vector<std::string> elements) {
  sorts_.push_back(SortDecl{std::move(name), std::move(elements), std::nullopt});
  return *this;
}

Theory::Builder& Theory::Builder::add_integer_sort(std::string name, std::int64_t low,
                                                   std::int64_t high) {
  SortDecl decl{std::move(name), {}, IntRange{low, high}};
  if (low <= high && high - low < kMaxIntegerSortSize) {
    for (std::int64_t v = low; v <= high; ++v) decl.elements.push_back(std::to_string(v));
  }
  sorts_.push_back(std::move(decl));
  return *this;
}

Theory::Builder& Theory::Builder::add_function(std::string name, std::vector<std::string> arg_sorts,
                                               std::string result_sort) {
  functions_.push_back({std::move(name), std::move(arg_sorts), std::move(result_sort)});
  return *this;
}

Theory::Builder& Theory::Builder::add_predicate(std::string name,
                                                std::vector<std::string> arg_sorts) {
  predicates_.push_back({std::move(name), std::move(arg_sorts), {}});
  return *this;
}

Theory Theory::Builder::build() const {
  auto data = std::make_shared<Data>();
  std::unordered_set<std::string> symbol_names;

  for (const SortDecl& decl : sorts_) {
    if (decl.name.empty()) throw InvalidTheory("sort with empty name");
    if (decl.range) {
      if (decl.range->low > decl.range->high)
        throw InvalidTheory("integer sort '" + decl.name + "' has an empty range");
      if (decl.range->high - decl.range->low >= kMaxIntegerSortSize)
        throw InvalidTheory("integer sort '" + decl.name + "' is too large");
    }
    if (decl.elements.empty()) throw InvalidTheory("sort '" + decl.name + "' has an empty domain");
    SortId id = static_cast<SortId>(data->sorts.size());
    if (!data->sort_index.emplace(decl.name, id).second)
      throw InvalidTheory("duplicate sort '" + decl.name + "'");

    NameIndex local;
    for (std::size_t i = 0; i < decl.elements.size(); ++i) {
      const std::string& element = decl.elements[i];
      if (!local.emplace(element, static_cast<ElemId>(i)).second)
        throw InvalidTheory("duplicate element '" + element + "' in sort '" + decl.name + "'");
      if (decl.range) continue;
      if (parse_int(element))
        throw InvalidTheory("symbolic sort '" + decl.name + "' has numeric element '" + element + "'");
      auto [it, inserted] =
          data->symbolic_elements.emplace(element, ElementRef{id, static_cast<ElemId>(i)});
      if (!inserted)
        throw InvalidTheory("element '" + element + "' is declared in sorts '" +
                            data->sorts[it->second.sort].name + "' and '" + decl.name + "'");
    }
    data->element_index.push_back(decl.range ? NameIndex{} : std::move(local));
    data->sorts.push_back(decl);
  }

  auto resolve = [&](const std::string& sort, const std::string& owner) {
    auto id = lookup(data->sort_index, sort);
    if (!id) throw InvalidTheory("unknown sort '" + sort + "' in declaration of '" + owner + "'");
    return *id;
  };
  auto claim_name = [&](const std::string& name) {
    if (name.empty()) throw InvalidTheory("symbol with empty name");
    if (data->symbolic_elements.count(name))
      throw InvalidTheory("symbol '" + name + "' clashes with a domain element");
    if (!symbol_names.insert(name).second) throw InvalidTheory("duplicate symbol '" + name + "'");
  };

  for (const PendingSymbol& fn : functions_) {
    claim_name(fn.name);
    FunctionDecl decl{fn.name, {}, resolve(fn.result, fn.name)};
    for (const std::string& arg : fn.args) decl.args.push_back(resolve(arg, fn.name));
    data->function_index.emplace(fn.name, static_cast<SymbolId>(data->functions.size()));
    data->functions.push_back(std::move(decl));
  }
  for (const PendingSymbol& pred : predicates_) {
    claim_name(pred.name);
    if (pred.args.empty()) throw InvalidTheory("predicate '" + pred.name + "' needs arity >= 1");
    PredicateDecl decl{pred.name, {}};
    for (const std::string& arg : pred.args) decl.args.push_back(resolve(arg, pred.name));
    data->predicate_index.emplace(pred.name, static_cast<SymbolId>(data->predicates.size()));
    data->predicates.push_back(std::move(decl));
  }
  return Theory(std::move(data));
}

Theory::Theory() : data_(std::make_shared<Data>()) {}

Theory::Theory(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

const std::vector<SortDecl>& Theory::sorts() const { return data_->sorts; }
const std::vector<FunctionDecl>& Theory::functions() const { return data_->functions; }
const std::vector<PredicateDecl>& Theory::predicates() const { return data_->predicates; }

std::optional<SortId> Theory::find_sort(std::string_view name) const {
  return lookup(data_->sort_index, name);
}

std::optional<SymbolId> Theory::find_function(std::string_view name) const {
  return lookup(data_->function_index, name);
}

std::optional<SymbolId> Theory::find_predicate(std::string_view name) const {
  return lookup(data_->predicate_index, name);
}

std::optional<Theory::ElementRef> Theory::find_symbolic_element(std::string_view name) const {
  auto it = data_->symbolic_elements.find(name);
  if (it == data_->symbolic_elements.end()) return std::nullopt;
  return it->second;
}

std::optional<ElemId> Theory::element_index(SortId sort, std::string_view name) const {
  const SortDecl& decl = data_->sorts[sort];
  if (decl.range) {
    auto value = parse_int(name);
    if (!value) return std::nullopt;
    // Reject non-canonical spellings such as "+3" or "03".
    if (std::to_string(*value) != name) return std::nullopt;
    return element_of(sort, *value);
  }
  return lookup(data_->element_index[sort], name);
}

std::optional<SortId> Theory::integer_sort_containing(std::int64_t value) const {
  for (SortId id = 0; id < data_->sorts.size(); ++id) {
    const auto& range = data_->sorts[id].range;
    if (range && range->low <= value && value <= range->high) return id;
  }
  return std::nullopt;
}

std::int64_t Theory::value_of(SortId sort, ElemId element) const {
  const auto& range = data_->sorts[sort].range;
  return range ? range->low + static_cast<std::int64_t>(element) : static_cast<std::int64_t>(element);
}

std::optional<ElemId> Theory::element_of(SortId sort, std::int64_t value) const {
  const SortDecl& decl = data_->sorts[sort];
  std::int64_t index = decl.range ? value - decl.range->low : value;
  if (index < 0 || index >= static_cast<std::int64_t>(decl.size())) return std::nullopt;
  return static_cast<ElemId>(index);
}

std::size_t Theory::tuple_count(std::span<const SortId> args) const {
  std::size_t count = 1;
  for (SortId s : args) count *= domain_size(s);
  return count;
}

std::size_t Theory::tuple_index(std::span<const SortId> args, std::span<const ElemId> tuple) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < args.size(); ++i) index = index * domain_size(args[i]) + tuple[i];
  return index;
}

std::vector<ElemId> Theory::tuple_at(std::span<const SortId> args, std::size_t index) const {
  std::vector<ElemId> tuple(args.size());
  for (std::size_t i = args.size(); i-- > 0;) {
    std::size_t radix = domain_size(args[i]);
    tuple[i] = static_cast<ElemId>(index % radix);
    index /= radix;
  }
  return tuple;
}

bool Theory::operator==(const Theory& other) const {
  if (data_ == other.data_) return true;
  auto same_sorts = [](const SortDecl& a, const SortDecl& b) {
    bool ranges = a.range.has_value() == b.range.has_value() &&
                  (!a.range || (a.range->low == b.range->low && a.range->high == b.range->high));
    return a.name == b.name && a.elements == b.elements && ranges;
  };
  auto same_fns = [](const FunctionDecl& a, const FunctionDecl& b) {
    return a.name == b.name && a.args == b.args && a.result == b.result;
  };
  auto same_preds = [](const PredicateDecl& a, const PredicateDecl& b) {
    return a.name == b.name && a.args == b.args;
  };
  return std::equal(sorts().begin(), sorts().end(), other.sorts().begin(), other.sorts().end(),
                    same_sorts) &&
         std::equal(functions().begin(), functions().end(), other.functions().begin(),
                    other.functions().end(), same_fns) &&
         std::equal(predicates().begin(), predicates().end(), other.predicates().begin(),
                    other.predicates().end(), same_preds);
}

}  // namespace clover
