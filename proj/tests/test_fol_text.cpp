#include <functional>
#include <gtest/gtest.h>

#include "clover/semantics.hpp"
#include "clover/text.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace clover;
using namespace clover::testing;

namespace {

ParseError parse_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ParseError";
  return ParseError(ParseErrorKind::Syntax, {}, "none");
}

const Theory& letters() {
  static const Theory th = parse_theory("sort s = {a, b, c, d, e, f}\npred P : s\n");
  return th;
}

}  // namespace

TEST(ParseTheory, ExampleTheory) {
  Theory th = parse_theory(
      "sort positions = 1..6\n"
      "sort potters = {Larsen, Mills, Neiman, Olivera, Park, Reigel, Serra, Vance}\n"
      "func displayed : positions -> potters\n");
  ASSERT_EQ(th.sorts().size(), 2u);
  EXPECT_TRUE(th.sort(0).is_integer());
  EXPECT_EQ(th.sort(0).range->low, 1);
  EXPECT_EQ(th.sort(0).range->high, 6);
  EXPECT_EQ(th.sort(1).size(), 8u);
  ASSERT_EQ(th.functions().size(), 1u);
  EXPECT_EQ(th.function(0).name, "displayed");
  EXPECT_EQ(th.function(0).args, std::vector<SortId>{0});
  EXPECT_EQ(th.function(0).result, SortId{1});
  EXPECT_EQ(th, example1_theory());
}

TEST(ParseTheory, Errors) {
  EXPECT_EQ(parse_error([] { parse_theory("sort s = {}"); }).kind(), ParseErrorKind::Syntax);
  ParseError unknown = parse_error([] { parse_theory("func f : a -> b"); });
  EXPECT_EQ(unknown.kind(), ParseErrorKind::UnknownSymbol);
  EXPECT_NE(std::string(unknown.what()).find("'a'"), std::string::npos);
  EXPECT_EQ(parse_error([] { parse_theory("sort s = {a, a}"); }).kind(), ParseErrorKind::Syntax);
  EXPECT_EQ(parse_error([] { parse_theory("sort s = {a} $"); }).kind(), ParseErrorKind::Lexical);
}

TEST(ParseTheory, ConstantsAndPredicates) {
  Theory th = parse_theory("sort s = {a, b}\nfunc c : -> s\nfunc k : s\npred R : s * s\n");
  EXPECT_TRUE(th.function(0).args.empty());
  EXPECT_TRUE(th.function(1).args.empty());
  EXPECT_EQ(th.predicate(0).args.size(), 2u);
  EXPECT_EQ(parse_theory(print_theory(th)), th);
}

TEST(ParseFormula, ExampleFormula) {
  Formula f = ex1("forall p: positions. (displayed(p) = Reigel) -> (p = 1 | p = 6)");
  Term p = Term::variable("p", "positions");
  Formula expected = Formula::forall(
      "p", "positions",
      Formula::implication(
          Formula::equal(Term::apply("displayed", {p}), Term::constant("Reigel", "potters")),
          Formula::disjunction(Formula::equal(p, Term::constant("1", "positions")),
                               Formula::equal(p, Term::constant("6", "positions")))));
  EXPECT_EQ(f, expected);
  EXPECT_EQ(parse_formula(letters(), "a = a"),
            Formula::equal(Term::constant("a", "s"), Term::constant("a", "s")));
}

TEST(ParseFormula, SortErrorsUseSortCheckKinds) {
  ParseError e = parse_error([] { ex1("displayed(Reigel) = 1"); });
  EXPECT_EQ(e.kind(), ParseErrorKind::Sort);
  EXPECT_EQ(e.sort_kind(), SortErrorKind::SortMismatch);
  ParseError free = parse_error([] { ex1("forall p: positions. displayed(q) = Reigel"); });
  EXPECT_EQ(free.sort_kind(), SortErrorKind::FreeVariable);
  EXPECT_EQ(parse_error([] { ex1("displayed(1, 2) = Reigel"); }).kind(), ParseErrorKind::Arity);
  EXPECT_EQ(parse_error([] { ex1("displayed(9) = Reigel"); }).kind(), ParseErrorKind::Sort);
  EXPECT_EQ(parse_error([] { ex1("forall p positions p = 1"); }).kind(), ParseErrorKind::Syntax);
}

TEST(ParseFormula, Precedence) {
  auto atom = [](const char* l, const char* r) {
    return Formula::equal(Term::constant(l, "s"), Term::constant(r, "s"));
  };
  Formula f = parse_formula(letters(), "a = b | c = d & e = f");
  EXPECT_EQ(f, Formula::disjunction(atom("a", "b"), Formula::conjunction(atom("c", "d"), atom("e", "f"))));

  Formula imp = parse_formula(letters(), "a = b -> b = c -> a = c");
  EXPECT_EQ(imp, Formula::implication(atom("a", "b"), Formula::implication(atom("b", "c"), atom("a", "c"))));

  Formula iff = parse_formula(letters(), "a = a <-> b = b <-> c = c");
  EXPECT_EQ(iff, Formula::biconditional(Formula::biconditional(atom("a", "a"), atom("b", "b")), atom("c", "c")));

  Formula neg = parse_formula(letters(), "~a = b & c != d");
  EXPECT_EQ(neg, Formula::conjunction(Formula::negation(atom("a", "b")), Formula::negation(atom("c", "d"))));

  Formula body = parse_formula(letters(), "exists x: s. P(x) & P(a)");
  EXPECT_TRUE(body.as<QuantifiedFormula>());
}

TEST(PrintFormula, CanonicalForms) {
  auto atom = [](const char* l, const char* r) {
    return Formula::equal(Term::constant(l, "s"), Term::constant(r, "s"));
  };
  EXPECT_EQ(print_formula(Formula::negation(atom("a", "b"))), "a != b");
  EXPECT_EQ(print_formula(Formula::implication(atom("a", "b"), Formula::implication(atom("b", "c"), atom("a", "c")))),
            "a = b -> b = c -> a = c");
  EXPECT_EQ(print_formula(Formula::implication(Formula::implication(atom("a", "b"), atom("b", "c")), atom("a", "c"))),
            "(a = b -> b = c) -> a = c");
  EXPECT_EQ(print_formula(example1_phi()), "forall p: positions. displayed(p) = Reigel -> p = 1 | p = 6");
  EXPECT_EQ(ex1(print_formula(example1_phi())), example1_phi());
  EXPECT_EQ(print_formula(ex1("exists p: positions. displayed(p + 1) = Mills | displayed(6 - 2) = Park")),
            "exists p: positions. displayed(p + 1) = Mills | displayed(6 - 2) = Park");
}

TEST(PrintFormula, RoundTripProperty) {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    Theory th = random_theory(rng);
    Formula f = random_formula(rng, th, 4);
    std::string text = print_formula(f);
    Formula back = parse_formula(th, text);
    ASSERT_EQ(back, f) << "trial " << trial << ": " << text << " reprinted as " << print_formula(back);
  }
}

TEST(ParseFormula, FuzzedInputNeverCrashesAndSpansStayInside) {
  Rng rng(22);
  const std::string seeds[] = {
      "forall p: positions. (displayed(p) = Reigel) -> (p = 1 | p = 6)",
      "~exists p: positions. (displayed(p) = Reigel & p != 1 & p != 6)",
      "displayed(3 + 1) = Mills <-> displayed(2) != Park",
  };
  const char alphabet[] = "()~&|-<>=!.:,+ 0123456789abcdefpqxyzRMPL\x01\xff";
  int errors = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    std::string src = seeds[trial % 3];
    int edits = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int k = 0; k < edits; ++k) {
      std::size_t at = std::uniform_int_distribution<std::size_t>(0, src.size())(rng);
      char c = alphabet[std::uniform_int_distribution<std::size_t>(0, sizeof(alphabet) - 2)(rng)];
      switch (rng() % 3) {
        case 0: src.insert(src.begin() + static_cast<long>(at), c); break;
        case 1: if (at < src.size()) src.erase(at, 1); break;
        default: if (at < src.size()) src[at] = c;
      }
    }
    try {
      ex1(src);
    } catch (const ParseError& e) {
      ++errors;
      EXPECT_LE(e.span().start, e.span().end);
      EXPECT_LE(e.span().end, src.size()) << src;
    }
  }
  EXPECT_GT(errors, 0);
}

TEST(Document, NamedFormulaBlocks) {
  const FolDocument& doc = example1();
  ASSERT_TRUE(doc.theory);
  ASSERT_EQ(doc.formulas.size(), 3u);
  EXPECT_EQ(doc.formulas[0].first, "phi");
  EXPECT_TRUE(doc.find("phi_neg_exists"));
  EXPECT_FALSE(doc.find("missing"));

  FolDocument external = parse_document("formula q { displayed(1) = Park }", example1_theory());
  EXPECT_EQ(print_formula(external.formulas[0].second), "displayed(1) = Park");
  EXPECT_THROW(parse_document("formula q { displayed(1) = Park }"), ParseError);
}
