#include "clover/interpretation.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clover/error.hpp"
#include "clover/text.hpp"

namespace clover {

Interpretation::Interpretation(Theory theory) : theory_(std::move(theory)) {
  for (const FunctionDecl& f : theory_.functions())
    functions_.emplace_back(theory_.tuple_count(f.args), ElemId{0});
  for (const PredicateDecl& p : theory_.predicates())
    predicates_.emplace_back(theory_.tuple_count(p.args), std::uint8_t{0});
}

ElemId Interpretation::function_value(SymbolId function, std::span<const ElemId> args) const {
  return functions_[function][theory_.tuple_index(theory_.function(function).args, args)];
}

void Interpretation::set_function_value(SymbolId function, std::span<const ElemId> args,
                                        ElemId value) {
  functions_[function][theory_.tuple_index(theory_.function(function).args, args)] = value;
}

bool Interpretation::predicate_value(SymbolId predicate, std::span<const ElemId> args) const {
  return predicates_[predicate][theory_.tuple_index(theory_.predicate(predicate).args, args)] != 0;
}

void Interpretation::set_predicate_value(SymbolId predicate, std::span<const ElemId> args,
                                         bool value) {
  predicates_[predicate][theory_.tuple_index(theory_.predicate(predicate).args, args)] =
      value ? 1 : 0;
}

bool Interpretation::operator==(const Interpretation& other) const {
  return theory_ == other.theory_ && functions_ == other.functions_ &&
         predicates_ == other.predicates_;
}

namespace {

std::string tuple_key(const Theory& theory, std::span<const SortId> sorts,
                      const std::vector<ElemId>& tuple) {
  std::string key;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) key += ',';
    key += theory.element_name(sorts[i], tuple[i]);
  }
  return key;
}

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_key(std::string_view key) {
  std::vector<std::string> parts;
  if (trim(key).empty()) return parts;
  std::size_t start = 0;
  while (true) {
    auto comma = key.find(',', start);
    parts.push_back(trim(key.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

std::vector<ElemId> parse_tuple(const Theory& theory, std::span<const SortId> sorts,
                                std::string_view key, const std::string& symbol) {
  std::vector<std::string> parts = split_key(key);
  if (parts.size() != sorts.size())
    throw Error("entry for '" + symbol + "' has " + std::to_string(parts.size()) +
                " argument(s), expected " + std::to_string(sorts.size()));
  std::vector<ElemId> tuple;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto e = theory.element_index(sorts[i], parts[i]);
    if (!e)
      throw Error("'" + parts[i] + "' is not an element of sort '" + theory.sort(sorts[i]).name +
                  "'");
    tuple.push_back(*e);
  }
  return tuple;
}

ElemId parse_element(const Theory& theory, SortId sort, const std::string& value) {
  auto e = theory.element_index(sort, value);
  if (!e)
    throw Error("'" + value + "' is not an element of sort '" + theory.sort(sort).name + "'");
  return *e;
}

bool parse_bool(const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw Error("expected true or false, found '" + value + "'");
}

// Tracks which table entries have been assigned so totality can be checked.
struct Coverage {
  explicit Coverage(const Theory& theory) {
    for (const auto& f : theory.functions()) functions.emplace_back(theory.tuple_count(f.args));
    for (const auto& p : theory.predicates()) predicates.emplace_back(theory.tuple_count(p.args));
  }
  void check(const Theory& theory) const {
    for (std::size_t f = 0; f < functions.size(); ++f)
      if (std::count(functions[f].begin(), functions[f].end(), false))
        throw Error("table for '" + theory.function(static_cast<SymbolId>(f)).name +
                    "' is not total");
    for (std::size_t p = 0; p < predicates.size(); ++p)
      if (std::count(predicates[p].begin(), predicates[p].end(), false))
        throw Error("table for '" + theory.predicate(static_cast<SymbolId>(p)).name +
                    "' is not total");
  }
  std::vector<std::vector<bool>> functions;
  std::vector<std::vector<bool>> predicates;
};

}  // namespace

std::string to_text(const Interpretation& interp) {
  const Theory& theory = interp.theory();
  std::vector<std::string> lines;
  for (SymbolId f = 0; f < theory.functions().size(); ++f) {
    const FunctionDecl& decl = theory.function(f);
    auto table = interp.function_table(f);
    for (std::size_t i = 0; i < table.size(); ++i) {
      std::string head = decl.name;
      if (!decl.args.empty())
        head += "(" + tuple_key(theory, decl.args, theory.tuple_at(decl.args, i)) + ")";
      lines.push_back(head + " = " + theory.element_name(decl.result, table[i]));
    }
  }
  for (SymbolId p = 0; p < theory.predicates().size(); ++p) {
    const PredicateDecl& decl = theory.predicate(p);
    const auto& table = interp.predicate_table(p);
    for (std::size_t i = 0; i < table.size(); ++i) {
      lines.push_back(decl.name + "(" + tuple_key(theory, decl.args, theory.tuple_at(decl.args, i)) +
                      ") = " + (table[i] ? "true" : "false"));
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const std::string& line : lines) out += line + '\n';
  return out;
}

Interpretation interpretation_from_text(const Theory& theory, std::string_view text) {
  Interpretation interp(theory);
  Coverage coverage(theory);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    try {
      auto eq = line.rfind('=');
      if (eq == std::string::npos) throw Error("missing '='");
      std::string head = trim(std::string_view(line).substr(0, eq));
      std::string value = trim(std::string_view(line).substr(eq + 1));
      std::string name = head;
      std::string key;
      if (auto open = head.find('('); open != std::string::npos) {
        if (head.back() != ')') throw Error("unbalanced parentheses");
        name = trim(std::string_view(head).substr(0, open));
        key = head.substr(open + 1, head.size() - open - 2);
      }
      if (auto f = theory.find_function(name)) {
        const FunctionDecl& decl = theory.function(*f);
        auto tuple = parse_tuple(theory, decl.args, key, name);
        interp.set_function_value(*f, tuple, parse_element(theory, decl.result, value));
        coverage.functions[*f][theory.tuple_index(decl.args, tuple)] = true;
      } else if (auto p = theory.find_predicate(name)) {
        const PredicateDecl& decl = theory.predicate(*p);
        auto tuple = parse_tuple(theory, decl.args, key, name);
        interp.set_predicate_value(*p, tuple, parse_bool(value));
        coverage.predicates[*p][theory.tuple_index(decl.args, tuple)] = true;
      } else {
        throw Error("unknown symbol '" + name + "'");
      }
    } catch (const Error& e) {
      throw Error("interpretation line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  coverage.check(theory);
  return interp;
}

nlohmann::json to_json(const Interpretation& interp) {
  const Theory& theory = interp.theory();
  nlohmann::json functions = nlohmann::json::object();
  for (SymbolId f = 0; f < theory.functions().size(); ++f) {
    const FunctionDecl& decl = theory.function(f);
    nlohmann::json table = nlohmann::json::object();
    auto values = interp.function_table(f);
    for (std::size_t i = 0; i < values.size(); ++i)
      table[tuple_key(theory, decl.args, theory.tuple_at(decl.args, i))] =
          theory.element_name(decl.result, values[i]);
    functions[decl.name] = std::move(table);
  }
  nlohmann::json predicates = nlohmann::json::object();
  for (SymbolId p = 0; p < theory.predicates().size(); ++p) {
    const PredicateDecl& decl = theory.predicate(p);
    nlohmann::json table = nlohmann::json::object();
    const auto& values = interp.predicate_table(p);
    for (std::size_t i = 0; i < values.size(); ++i)
      table[tuple_key(theory, decl.args, theory.tuple_at(decl.args, i))] = values[i] != 0;
    predicates[decl.name] = std::move(table);
  }
  return {{"theory", print_theory(theory)}, {"functions", functions}, {"predicates", predicates}};
}

Interpretation interpretation_from_json(const Theory& theory, const nlohmann::json& doc) {
  Interpretation interp(theory);
  Coverage coverage(theory);
  if (doc.contains("functions")) {
    for (const auto& [name, table] : doc.at("functions").items()) {
      auto f = theory.find_function(name);
      if (!f) throw Error("unknown function '" + name + "'");
      const FunctionDecl& decl = theory.function(*f);
      for (const auto& [key, value] : table.items()) {
        auto tuple = parse_tuple(theory, decl.args, key, name);
        interp.set_function_value(*f, tuple,
                                  parse_element(theory, decl.result, value.get<std::string>()));
        coverage.functions[*f][theory.tuple_index(decl.args, tuple)] = true;
      }
    }
  }
  if (doc.contains("predicates")) {
    for (const auto& [name, table] : doc.at("predicates").items()) {
      auto p = theory.find_predicate(name);
      if (!p) throw Error("unknown predicate '" + name + "'");
      const PredicateDecl& decl = theory.predicate(*p);
      for (const auto& [key, value] : table.items()) {
        auto tuple = parse_tuple(theory, decl.args, key, name);
        interp.set_predicate_value(*p, tuple, value.get<bool>());
        coverage.predicates[*p][theory.tuple_index(decl.args, tuple)] = true;
      }
    }
  }
  coverage.check(theory);
  return interp;
}

std::optional<std::uint64_t> count_interpretations(const Theory& theory, std::uint64_t cap) {
  std::uint64_t total = 1;
  auto multiply = [&](std::uint64_t radix, std::size_t times) {
    for (std::size_t i = 0; i < times; ++i) {
      if (radix != 0 && total > cap / radix) return false;
      total *= radix;
    }
    return true;
  };
  for (const FunctionDecl& f : theory.functions())
    if (!multiply(theory.domain_size(f.result), theory.tuple_count(f.args))) return std::nullopt;
  for (const PredicateDecl& p : theory.predicates())
    if (!multiply(2, theory.tuple_count(p.args))) return std::nullopt;
  if (total > cap) return std::nullopt;
  return total;
}

InterpretationEnumerator::InterpretationEnumerator(const Theory& theory, std::uint64_t cap)
    : current_(theory) {
  auto total = count_interpretations(theory, cap);
  if (!total)
    throw TooLarge("theory has more than " + std::to_string(cap) + " interpretations");
  total_ = *total;

  struct Named {
    const std::string* name;
    bool is_function;
    SymbolId id;
  };
  std::vector<Named> symbols;
  for (SymbolId f = 0; f < theory.functions().size(); ++f)
    symbols.push_back({&theory.function(f).name, true, f});
  for (SymbolId p = 0; p < theory.predicates().size(); ++p)
    symbols.push_back({&theory.predicate(p).name, false, p});
  std::sort(symbols.begin(), symbols.end(),
            [](const Named& a, const Named& b) { return *a.name < *b.name; });
  for (const Named& s : symbols) {
    const auto& args = s.is_function ? theory.function(s.id).args : theory.predicate(s.id).args;
    auto radix = s.is_function
                     ? static_cast<std::uint32_t>(theory.domain_size(theory.function(s.id).result))
                     : 2u;
    for (std::size_t t = 0; t < theory.tuple_count(args); ++t)
      digits_.push_back({s.is_function, s.id, t, radix});
  }
}

const Interpretation* InterpretationEnumerator::next() {
  if (done_) return nullptr;
  if (!started_) {
    started_ = true;
    return &current_;
  }
  for (std::size_t i = digits_.size(); i-- > 0;) {
    const Digit& d = digits_[i];
    std::uint32_t value;
    if (d.is_function) {
      ElemId& slot = current_.function_table(d.symbol)[d.tuple];
      value = ++slot;
      if (value < d.radix) return &current_;
      slot = 0;
    } else {
      std::uint8_t& slot = current_.predicate_table(d.symbol)[d.tuple];
      value = ++slot;
      if (value < d.radix) return &current_;
      slot = 0;
    }
  }
  done_ = true;
  return nullptr;
}

}  // namespace clover
