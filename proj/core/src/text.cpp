#include "clover/text.hpp"

#include <cctype>
#include <charconv>
#include <unordered_set>

#include "clover/semantics.hpp"

namespace clover {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::Lexical: return "Lexical";
    case ParseErrorKind::Syntax: return "Syntax";
    case ParseErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ParseErrorKind::Arity: return "Arity";
    case ParseErrorKind::Sort: return "Sort";
  }
  return "?";
}

ParseError::ParseError(ParseErrorKind kind, SourceSpan span, std::string message,
                       std::optional<SortErrorKind> sort_kind)
    : Error(std::string(to_string(kind)) + " error at " + to_string(span) + ": " + message),
      kind_(kind),
      span_(span),
      detail_(std::move(message)),
      sort_kind_(sort_kind) {}

const Formula* FolDocument::find(std::string_view name) const {
  for (const auto& [n, f] : formulas)
    if (n == name) return &f;
  return nullptr;
}

namespace {

enum class Tok {
  Ident, Int, LParen, RParen, LBrace, RBrace, Comma, Colon, Dot, DotDot,
  Tilde, Amp, Bar, Arrow, DArrow, Eq, Neq, Lt, Le, Gt, Ge, Plus, Minus, Star, End
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Tilde: return "'~'";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::DArrow: return "'<->'";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string_view text;
  SourceSpan span;
};

const std::unordered_set<std::string_view> kKeywords = {"sort",   "func",    "pred",
                                                        "forall", "exists", "theory",
                                                        "formula"};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto emit = [&](Tok kind, std::size_t len) {
    out.push_back({kind, src.substr(i, len), SourceSpan{i, i + len, line, col}});
    advance(len);
  };
  auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };

  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#' || starts("//")) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      emit(Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      emit(Tok::Int, j - i);
      continue;
    }
    if (starts("<->")) { emit(Tok::DArrow, 3); continue; }
    if (starts("->")) { emit(Tok::Arrow, 2); continue; }
    if (starts("..")) { emit(Tok::DotDot, 2); continue; }
    if (starts("!=")) { emit(Tok::Neq, 2); continue; }
    if (starts("<=")) { emit(Tok::Le, 2); continue; }
    if (starts(">=")) { emit(Tok::Ge, 2); continue; }
    switch (c) {
      case '(': emit(Tok::LParen, 1); continue;
      case ')': emit(Tok::RParen, 1); continue;
      case '{': emit(Tok::LBrace, 1); continue;
      case '}': emit(Tok::RBrace, 1); continue;
      case ',': emit(Tok::Comma, 1); continue;
      case ':': emit(Tok::Colon, 1); continue;
      case '.': emit(Tok::Dot, 1); continue;
      case '~': emit(Tok::Tilde, 1); continue;
      case '&': emit(Tok::Amp, 1); continue;
      case '|': emit(Tok::Bar, 1); continue;
      case '=': emit(Tok::Eq, 1); continue;
      case '<': emit(Tok::Lt, 1); continue;
      case '>': emit(Tok::Gt, 1); continue;
      case '+': emit(Tok::Plus, 1); continue;
      case '-': emit(Tok::Minus, 1); continue;
      case '*': emit(Tok::Star, 1); continue;
      default: break;
    }
    std::string shown = c >= 0x20 && c < 0x7f ? std::string(1, static_cast<char>(c))
                                               : "\\x" + std::to_string(static_cast<int>(c));
    throw ParseError(ParseErrorKind::Lexical, SourceSpan{i, i + 1, line, col},
                     "unexpected character '" + shown + "'");
  }
  out.push_back({Tok::End, {}, SourceSpan{src.size(), src.size(), line, col}});
  return out;
}

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.end = b.end;
  return s;
}

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> tokens)
      : src_(src), toks_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  bool at(Tok t) const { return peek().kind == t; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok t) {
    if (!at(t)) return false;
    take();
    return true;
  }

  [[noreturn]] void fail(ParseErrorKind kind, const SourceSpan& span, std::string message) const {
    throw ParseError(kind, span, std::move(message));
  }
  [[noreturn]] void expected(std::string what) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
    fail(ParseErrorKind::Syntax, t.span, "expected " + what + ", found " + got);
  }
  const Token& expect(Tok t) {
    if (!at(t)) expected(describe(t));
    return take();
  }
  std::string expect_name(const char* what) {
    if (!at(Tok::Ident) || kKeywords.count(peek().text)) expected(what);
    return std::string(take().text);
  }

  std::int64_t parse_int_literal() {
    bool negative = accept(Tok::Minus);
    const Token& t = expect(Tok::Int);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
      fail(ParseErrorKind::Lexical, t.span, "integer literal out of range");
    return negative ? -value : value;
  }

  // ---- theory -----------------------------------------------------------

  Theory parse_theory_decls(Tok terminator) {
    Theory::Builder builder;
    std::unordered_set<std::string> sorts;
    auto require_sort = [&](const Token& t) {
      if (!sorts.count(std::string(t.text)))
        fail(ParseErrorKind::UnknownSymbol, t.span, "unknown sort '" + std::string(t.text) + "'");
      return std::string(t.text);
    };
    auto sort_name = [&]() -> const Token& {
      if (!at(Tok::Ident)) expected("sort name");
      return take();
    };

    SourceSpan first = peek().span;
    while (!at(terminator)) {
      if (at_keyword("sort")) {
        take();
        const Token& name_tok = peek();
        std::string name = expect_name("sort name");
        expect(Tok::Eq);
        if (accept(Tok::LBrace)) {
          std::vector<std::string> elements;
          if (at(Tok::RBrace))
            fail(ParseErrorKind::Syntax, peek().span, "sort '" + name + "' has an empty domain");
          std::unordered_set<std::string> seen;
          do {
            const Token& el = peek();
            std::string element = expect_name("domain element");
            if (!seen.insert(element).second)
              fail(ParseErrorKind::Syntax, el.span, "duplicate element '" + element + "'");
            elements.push_back(std::move(element));
          } while (accept(Tok::Comma));
          expect(Tok::RBrace);
          builder.add_sort(name, std::move(elements));
        } else if (at(Tok::Int) || at(Tok::Minus)) {
          const SourceSpan start = peek().span;
          std::int64_t low = parse_int_literal();
          expect(Tok::DotDot);
          std::int64_t high = parse_int_literal();
          if (low > high)
            fail(ParseErrorKind::Syntax, join(start, toks_[pos_ - 1].span),
                 "sort '" + name + "' has an empty domain");
          builder.add_integer_sort(name, low, high);
        } else {
          expected("'{' or integer range");
        }
        if (!sorts.insert(name).second)
          fail(ParseErrorKind::Syntax, name_tok.span, "duplicate sort '" + name + "'");
      } else if (at_keyword("func")) {
        take();
        std::string name = expect_name("function name");
        expect(Tok::Colon);
        std::vector<std::string> args;
        if (accept(Tok::Arrow)) {
          builder.add_function(name, {}, require_sort(sort_name()));
          continue;
        }
        do {
          args.push_back(require_sort(sort_name()));
        } while (accept(Tok::Star) || accept(Tok::Comma));
        if (accept(Tok::Arrow)) {
          builder.add_function(name, std::move(args), require_sort(sort_name()));
        } else if (args.size() == 1) {
          builder.add_function(name, {}, args.front());
        } else {
          expected("'->'");
        }
      } else if (at_keyword("pred")) {
        take();
        std::string name = expect_name("predicate name");
        expect(Tok::Colon);
        std::vector<std::string> args;
        do {
          args.push_back(require_sort(sort_name()));
        } while (accept(Tok::Star) || accept(Tok::Comma));
        builder.add_predicate(name, std::move(args));
      } else {
        expected("'sort', 'func' or 'pred'");
      }
    }
    try {
      return builder.build();
    } catch (const InvalidTheory& e) {
      fail(ParseErrorKind::Syntax, join(first, toks_[pos_ > 0 ? pos_ - 1 : 0].span), e.what());
    }
  }

  // ---- formulas ---------------------------------------------------------

  Formula parse_formula_expr(const Theory& theory) {
    theory_ = &theory;
    scope_.clear();
    return parse_iff();
  }

 private:
  struct Binding {
    std::string name;
    std::string sort;
  };

  Formula parse_iff() {
    Formula lhs = parse_implies();
    while (at(Tok::DArrow)) {
      take();
      Formula rhs = parse_implies();
      lhs = Formula::binary(Connective::Iff, lhs, rhs, join(lhs.span(), rhs.span()));
    }
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (!at(Tok::Arrow)) return lhs;
    take();
    Formula rhs = parse_implies();
    return Formula::binary(Connective::Implies, lhs, rhs, join(lhs.span(), rhs.span()));
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (at(Tok::Bar)) {
      take();
      Formula rhs = parse_and();
      lhs = Formula::binary(Connective::Or, lhs, rhs, join(lhs.span(), rhs.span()));
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (at(Tok::Amp)) {
      take();
      Formula rhs = parse_unary();
      lhs = Formula::binary(Connective::And, lhs, rhs, join(lhs.span(), rhs.span()));
    }
    return lhs;
  }

  Formula parse_unary() {
    if (at(Tok::Tilde)) {
      SourceSpan start = take().span;
      Formula operand = parse_unary();
      return Formula::negation(operand, join(start, operand.span()));
    }
    if (at_keyword("forall") || at_keyword("exists")) {
      const Token& kw = take();
      Quantifier q = kw.text == "forall" ? Quantifier::Forall : Quantifier::Exists;
      std::string var = expect_name("variable name");
      expect(Tok::Colon);
      const Token& sort_tok = peek();
      std::string sort = expect_name("sort name");
      if (!theory_->find_sort(sort))
        fail(ParseErrorKind::UnknownSymbol, sort_tok.span, "unknown sort '" + sort + "'");
      expect(Tok::Dot);
      scope_.push_back({var, sort});
      Formula body = parse_iff();
      scope_.pop_back();
      return Formula::quantified(q, std::move(var), std::move(sort), body,
                                 join(kw.span, body.span()));
    }
    if (at(Tok::LParen)) {
      SourceSpan start = take().span;
      Formula inner = parse_iff();
      expect(Tok::RParen);
      (void)start;
      return inner;
    }
    return parse_atom();
  }

  Formula parse_atom() {
    const Token& head = peek();
    if (head.kind == Tok::Ident && peek(1).kind == Tok::LParen && !bound(head.text) &&
        theory_->find_predicate(head.text)) {
      take();
      SymbolId pred = *theory_->find_predicate(head.text);
      std::vector<Term> args = parse_args();
      const auto& decl = theory_->predicate(pred);
      for (std::size_t k = 0; k < args.size() && k < decl.args.size(); ++k)
        args[k] = resolve(args[k], decl.args[k]);
      for (std::size_t k = decl.args.size(); k < args.size(); ++k)
        args[k] = resolve(args[k], std::nullopt);
      return Formula::predicate(std::string(head.text), std::move(args),
                                join(head.span, toks_[pos_ - 1].span));
    }
    Term lhs = parse_term();
    const Token& op = peek();
    bool is_relation = op.kind == Tok::Eq || op.kind == Tok::Neq || op.kind == Tok::Lt ||
                       op.kind == Tok::Le || op.kind == Tok::Gt || op.kind == Tok::Ge;
    if (!is_relation) expected("relation ('=', '!=', '<', '<=', '>', '>=')");
    take();
    Term rhs = parse_term();
    auto lhs_sort = known_sort(lhs);
    auto rhs_sort = known_sort(rhs);
    lhs = resolve(lhs, rhs_sort);
    rhs = resolve(rhs, lhs_sort ? lhs_sort : known_sort(lhs));
    SourceSpan span = join(lhs.span(), rhs.span());
    switch (op.kind) {
      case Tok::Eq: return Formula::equal(lhs, rhs, span);
      case Tok::Neq: return Formula::negation(Formula::equal(lhs, rhs, span), span);
      case Tok::Lt: return Formula::compare(CompareOp::Less, lhs, rhs, span);
      case Tok::Le: return Formula::compare(CompareOp::LessEqual, lhs, rhs, span);
      case Tok::Gt: return Formula::compare(CompareOp::Greater, lhs, rhs, span);
      default: return Formula::compare(CompareOp::GreaterEqual, lhs, rhs, span);
    }
  }

  std::vector<Term> parse_args() {
    expect(Tok::LParen);
    std::vector<Term> args;
    if (!at(Tok::RParen)) {
      do {
        args.push_back(parse_term());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    return args;
  }

  Term parse_term() {
    Term term = parse_primary_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      bool minus = take().kind == Tok::Minus;
      const Token& lit = peek();
      if (!at(Tok::Int)) expected("integer offset");
      std::int64_t k = parse_int_literal();
      term = Term::offset(term, minus ? -k : k, join(term.span(), lit.span));
    }
    return term;
  }

  Term parse_primary_term() {
    const Token& t = peek();
    if (t.kind == Tok::Int || (t.kind == Tok::Minus && peek(1).kind == Tok::Int)) {
      std::int64_t value = parse_int_literal();
      // Sort is fixed later from context.
      return Term::constant(std::to_string(value), "", join(t.span, toks_[pos_ - 1].span));
    }
    if (t.kind != Tok::Ident || kKeywords.count(t.text)) expected("term");
    take();
    std::string name(t.text);
    if (const Binding* b = bound(name)) {
      if (at(Tok::LParen))
        fail(ParseErrorKind::Syntax, peek().span, "variable '" + name + "' is not a function");
      return Term::variable(name, b->sort, t.span);
    }
    if (at(Tok::LParen)) {
      if (!theory_->find_function(name))
        fail(ParseErrorKind::UnknownSymbol, t.span, "unknown function '" + name + "'");
      SymbolId fn = *theory_->find_function(name);
      std::vector<Term> args = parse_args();
      const auto& decl = theory_->function(fn);
      for (std::size_t k = 0; k < args.size(); ++k)
        args[k] = resolve(args[k], k < decl.args.size() ? std::optional(decl.args[k]) : std::nullopt);
      return Term::apply(name, std::move(args), join(t.span, toks_[pos_ - 1].span));
    }
    if (theory_->find_function(name)) return Term::apply(name, {}, t.span);
    if (auto el = theory_->find_symbolic_element(name))
      return Term::constant(name, theory_->sort(el->sort).name, t.span);
    // Left unbound; sort checking reports it as a free variable.
    return Term::variable(name, "", t.span);
  }

  const Binding* bound(std::string_view name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  static bool pending_literal(const Term& term) {
    const auto* c = term.as<ConstantTerm>();
    return c && c->sort.empty();
  }

  std::optional<SortId> known_sort(const Term& term) const {
    if (pending_literal(term)) return std::nullopt;
    if (const auto* off = term.as<OffsetTerm>()) return known_sort(off->base);
    return sort_of(*theory_, term);
  }

  // Assigns sorts to integer literals: the hinted integer sort when it
  // contains the value, else the first declared integer sort that does.
  Term resolve(const Term& term, std::optional<SortId> hint) {
    if (pending_literal(term)) {
      const auto& c = *term.as<ConstantTerm>();
      std::int64_t value = std::stoll(c.element);
      if (hint && theory_->sort(*hint).is_integer() && theory_->element_of(*hint, value))
        return Term::constant(c.element, theory_->sort(*hint).name, term.span());
      if (auto sort = theory_->integer_sort_containing(value))
        return Term::constant(c.element, theory_->sort(*sort).name, term.span());
      fail(ParseErrorKind::Sort, term.span(),
           "integer literal " + c.element + " lies outside every integer sort");
    }
    if (const auto* off = term.as<OffsetTerm>())
      return Term::offset(resolve(off->base, hint), off->delta, term.span());
    return term;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Theory* theory_ = nullptr;
  std::vector<Binding> scope_;
};

ParseErrorKind parse_kind_for(SortErrorKind kind) {
  switch (kind) {
    case SortErrorKind::UnknownSymbol: return ParseErrorKind::UnknownSymbol;
    case SortErrorKind::ArityMismatch: return ParseErrorKind::Arity;
    case SortErrorKind::SortMismatch: return ParseErrorKind::Sort;
    case SortErrorKind::FreeVariable: return ParseErrorKind::UnknownSymbol;
  }
  return ParseErrorKind::Sort;
}

void check_parsed(const Theory& theory, const Formula& formula) {
  CheckReport report = sort_check(theory, formula);
  if (report.ok()) return;
  const SortError& e = report.errors.front();
  throw ParseError(parse_kind_for(e.kind), e.span, e.message, e.kind);
}

// ---- printing -------------------------------------------------------------

constexpr int kPrecIff = 1;
constexpr int kPrecImplies = 2;
constexpr int kPrecOr = 3;
constexpr int kPrecAnd = 4;
constexpr int kPrecNot = 5;

int precedence(Connective op) {
  switch (op) {
    case Connective::Iff: return kPrecIff;
    case Connective::Implies: return kPrecImplies;
    case Connective::Or: return kPrecOr;
    case Connective::And: return kPrecAnd;
  }
  return 0;
}

void print_to(std::string& out, const Term& term) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VariableTerm>) {
          out += node.name;
        } else if constexpr (std::is_same_v<T, ConstantTerm>) {
          out += node.element;
        } else if constexpr (std::is_same_v<T, ApplyTerm>) {
          out += node.function;
          if (node.args.empty()) return;
          out += '(';
          for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i) out += ", ";
            print_to(out, node.args[i]);
          }
          out += ')';
        } else {
          print_to(out, node.base);
          if (node.delta < 0) {
            out += " - " + std::to_string(-node.delta);
          } else {
            out += " + " + std::to_string(node.delta);
          }
        }
      },
      term.node().value);
}

// `min_prec` is the loosest connective allowed without parentheses here;
// `rightmost` is true when nothing follows this formula inside the current
// parenthesized group, which is where a quantifier may appear bare.
void print_to(std::string& out, const Formula& formula, int min_prec, bool rightmost) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, EqualAtom>) {
          print_to(out, node.lhs);
          out += " = ";
          print_to(out, node.rhs);
        } else if constexpr (std::is_same_v<T, CompareAtom>) {
          print_to(out, node.lhs);
          out += ' ';
          out += to_string(node.op);
          out += ' ';
          print_to(out, node.rhs);
        } else if constexpr (std::is_same_v<T, PredicateAtom>) {
          out += node.name;
          out += '(';
          for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i) out += ", ";
            print_to(out, node.args[i]);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, Negation>) {
          if (const auto* eq = node.operand.template as<EqualAtom>()) {
            print_to(out, eq->lhs);
            out += " != ";
            print_to(out, eq->rhs);
          } else {
            out += '~';
            print_to(out, node.operand, kPrecNot, rightmost);
          }
        } else if constexpr (std::is_same_v<T, BinaryFormula>) {
          int prec = precedence(node.op);
          bool parens = prec < min_prec;
          if (parens) out += '(';
          bool right_open = parens || rightmost;
          bool right_assoc = node.op == Connective::Implies;
          print_to(out, node.lhs, right_assoc ? prec + 1 : prec, false);
          out += ' ';
          out += to_string(node.op);
          out += ' ';
          print_to(out, node.rhs, right_assoc ? prec : prec + 1, right_open);
          if (parens) out += ')';
        } else {
          bool parens = !rightmost;
          if (parens) out += '(';
          out += to_string(node.quantifier);
          out += ' ';
          out += node.variable;
          out += ": ";
          out += node.sort;
          out += ". ";
          print_to(out, node.body, 0, true);
          if (parens) out += ')';
        }
      },
      formula.node().value);
}

}  // namespace

Theory parse_theory(std::string_view source) {
  Parser parser(source, tokenize(source));
  return parser.parse_theory_decls(Tok::End);
}

Formula parse_formula(const Theory& theory, std::string_view source) {
  Parser parser(source, tokenize(source));
  Formula formula = parser.parse_formula_expr(theory);
  if (!parser.at(Tok::End)) parser.expected("end of formula");
  check_parsed(theory, formula);
  return formula;
}

FolDocument parse_document(std::string_view source, const std::optional<Theory>& theory) {
  Parser parser(source, tokenize(source));
  FolDocument doc;
  doc.theory = theory;
  if (parser.at_keyword("theory")) {
    parser.take();
    parser.expect(Tok::LBrace);
    doc.theory = parser.parse_theory_decls(Tok::RBrace);
    parser.expect(Tok::RBrace);
  }
  while (!parser.at(Tok::End)) {
    if (!parser.at_keyword("formula")) parser.expected("'formula'");
    const Token& kw = parser.take();
    if (!doc.theory)
      parser.fail(ParseErrorKind::Syntax, kw.span, "formula block before any theory block");
    std::string name = parser.expect_name("formula name");
    if (doc.find(name))
      parser.fail(ParseErrorKind::Syntax, kw.span, "duplicate formula '" + name + "'");
    parser.expect(Tok::LBrace);
    Formula formula = parser.parse_formula_expr(*doc.theory);
    parser.expect(Tok::RBrace);
    check_parsed(*doc.theory, formula);
    doc.formulas.emplace_back(std::move(name), std::move(formula));
  }
  return doc;
}

std::string print_term(const Term& term) {
  std::string out;
  print_to(out, term);
  return out;
}

std::string print_formula(const Formula& formula) {
  std::string out;
  print_to(out, formula, 0, true);
  return out;
}

std::string print_theory(const Theory& theory) {
  std::string out;
  for (const SortDecl& s : theory.sorts()) {
    out += "sort " + s.name + " = ";
    if (s.range) {
      out += std::to_string(s.range->low) + ".." + std::to_string(s.range->high);
    } else {
      out += '{';
      for (std::size_t i = 0; i < s.elements.size(); ++i) {
        if (i) out += ", ";
        out += s.elements[i];
      }
      out += '}';
    }
    out += '\n';
  }
  auto sort_list = [&](const std::vector<SortId>& args) {
    std::string s;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) s += " * ";
      s += theory.sort(args[i]).name;
    }
    return s;
  };
  for (const FunctionDecl& f : theory.functions()) {
    out += "func " + f.name + " : ";
    if (!f.args.empty()) out += sort_list(f.args) + " ";
    out += "-> " + theory.sort(f.result).name + '\n';
  }
  for (const PredicateDecl& p : theory.predicates())
    out += "pred " + p.name + " : " + sort_list(p.args) + '\n';
  return out;
}

}  // namespace clover
