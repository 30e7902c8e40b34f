#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "clover/error.hpp"
#include "clover/interpretation.hpp"
#include "clover/semantics.hpp"
#include "clover/text.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace clover;
using namespace clover::testing;

namespace {

Term pos(int p) { return Term::constant(std::to_string(p), "positions"); }
Term potter(const char* name) { return Term::constant(name, "potters"); }
Term displayed(Term arg) { return Term::apply("displayed", {std::move(arg)}); }

}  // namespace

TEST(Theory, RejectsEmptyDomain) {
  EXPECT_THROW(Theory::Builder().add_sort("s", {}).build(), InvalidTheory);
}

TEST(Theory, RejectsDuplicateElementsAndUndeclaredSorts) {
  EXPECT_THROW(Theory::Builder().add_sort("s", {"a", "a"}).build(), InvalidTheory);
  EXPECT_THROW(Theory::Builder().add_sort("s", {"a"}).add_function("f", {"t"}, "s").build(),
               InvalidTheory);
  EXPECT_THROW(Theory::Builder().add_sort("s", {"a"}).add_predicate("p", {}).build(), InvalidTheory);
}

TEST(Theory, IntegerSortElementsAreDecimalNames) {
  Theory th = Theory::Builder().add_integer_sort("n", -1, 2).build();
  const SortDecl& n = th.sort(0);
  EXPECT_EQ(n.elements, (std::vector<std::string>{"-1", "0", "1", "2"}));
  EXPECT_EQ(th.value_of(0, 0), -1);
  EXPECT_EQ(th.element_of(0, 2), ElemId{3});
  EXPECT_FALSE(th.element_of(0, 3));
}

TEST(SortCheck, AcceptsExampleFormula) {
  EXPECT_TRUE(sort_check(example1_theory(), example1_phi()).ok());
}

TEST(SortCheck, ArgumentOfWrongSort) {
  Formula f = Formula::equal(displayed(potter("Reigel")), pos(1));
  CheckReport report = sort_check(example1_theory(), f);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.errors[0].kind, SortErrorKind::SortMismatch);
  EXPECT_NE(report.errors[0].node.find("Reigel"), std::string::npos);
}

TEST(SortCheck, FreeVariableIsNamed) {
  Formula f = Formula::forall(
      "p", "positions",
      Formula::equal(displayed(Term::variable("q", "positions")), potter("Reigel")));
  CheckReport report = sort_check(example1_theory(), f);
  ASSERT_EQ(report.errors.size(), 1u);
  EXPECT_EQ(report.errors[0].kind, SortErrorKind::FreeVariable);
  EXPECT_EQ(report.errors[0].node, "q");
}

TEST(SortCheck, UnknownSymbolAndArity) {
  const Theory& th = example1_theory();
  auto kinds = [&](const Formula& f) {
    std::vector<SortErrorKind> out;
    for (const auto& e : sort_check(th, f).errors) out.push_back(e.kind);
    return out;
  };
  EXPECT_EQ(kinds(Formula::predicate("shelf", {pos(1)})),
            std::vector<SortErrorKind>{SortErrorKind::UnknownSymbol});
  EXPECT_EQ(kinds(Formula::equal(Term::apply("displayed", {pos(1), pos(2)}), potter("Mills"))),
            std::vector<SortErrorKind>{SortErrorKind::ArityMismatch});
  EXPECT_THROW(evaluate(Interpretation(th), Formula::predicate("shelf", {pos(1)})), IllTyped);
}

TEST(Evaluate, SecondExampleInterpretationIsNotAModel) {
  EXPECT_FALSE(evaluate(example2_interpretation(), example1_phi()));
}

TEST(Evaluate, IdentityAndConstantTable) {
  const Theory& th = example1_theory();
  Interpretation larsen(th);
  ElemId l = *th.element_index(*th.find_sort("potters"), "Larsen");
  for (ElemId& v : larsen.function_table(0)) v = l;
  EXPECT_TRUE(evaluate(larsen, Formula::equal(potter("Reigel"), potter("Reigel"))));
  EXPECT_TRUE(evaluate(larsen, example1_phi()));
}

TEST(Evaluate, OffsetsLeaveTheRangeAndUndefinedAtomsAreFalse) {
  const Theory& th = example1_theory();
  Interpretation i(th);
  // 6 + 1 = 7 is a legal integer comparison even though 7 is not a position.
  EXPECT_TRUE(evaluate(i, Formula::compare(CompareOp::Greater, Term::offset(pos(6), 1), pos(6))));
  // displayed(6 + 1) is undefined: both the atom and its negation-free use are false.
  Formula undefined = Formula::equal(displayed(Term::offset(pos(6), 1)), potter("Larsen"));
  EXPECT_FALSE(evaluate(i, undefined));
  EXPECT_TRUE(evaluate(i, Formula::negation(undefined)));
  EXPECT_FALSE(evaluate(i, Formula::equal(displayed(Term::offset(pos(6), 1)),
                                          displayed(Term::offset(pos(6), 1)))));
}

TEST(EvaluateProperty, AgreesWithIndependentEvaluator) {
  Rng rng(11);
  TheoryShape shape;
  shape.max_domain = 3;
  for (int trial = 0; trial < 1000; ++trial) {
    Theory th = random_theory(rng, shape);
    Interpretation interp = random_interpretation(rng, th);
    Formula f = random_formula(rng, th, 4);
    ASSERT_TRUE(sort_check(th, f).ok()) << print_formula(f);
    ASSERT_EQ(evaluate(interp, f), oracle_evaluate(interp, f))
        << "trial " << trial << ": " << print_formula(f) << "\n" << to_text(interp);
  }
}

TEST(EvaluateProperty, NegationAndUniversalExpansion) {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    Theory th = random_theory(rng);
    Interpretation interp = random_interpretation(rng, th);
    Formula f = random_formula(rng, th, 3);
    EXPECT_EQ(evaluate(interp, Formula::negation(f)), !evaluate(interp, f));

    SortId s = static_cast<SortId>(trial % th.sorts().size());
    Formula body = random_formula(rng, th, 2);
    // Reuse a generated formula as the body of a fresh quantifier whose
    // variable it does not mention: the expansion is then trivially uniform.
    Formula all = Formula::forall("fresh", th.sort(s).name, body);
    bool expected = true;
    for (ElemId e = 0; e < th.domain_size(s); ++e)
      expected = expected &&
                 evaluate(interp, substitute(body, "fresh", Term::constant(th.element_name(s, e),
                                                                           th.sort(s).name)));
    EXPECT_EQ(evaluate(interp, all), expected);
  }
}

TEST(EvaluateProperty, SubstitutionLemma) {
  Rng rng(13);
  int checked = 0;
  while (checked < 300) {
    Theory th = random_theory(rng);
    Formula f = random_formula(rng, th, 4);
    const auto* q = f.as<QuantifiedFormula>();
    if (!q) continue;
    Interpretation interp = random_interpretation(rng, th);
    SortId s = *th.find_sort(q->sort);
    for (ElemId e = 0; e < th.domain_size(s); ++e) {
      Formula inst = substitute(q->body, q->variable, Term::constant(th.element_name(s, e), q->sort));
      ASSERT_TRUE(sort_check(th, inst).ok());
      EXPECT_EQ(evaluate(interp, inst), oracle_evaluate_bound(interp, q->body, q->variable, s, e));
    }
    ++checked;
  }
}

TEST(Substitute, Examples) {
  Formula atom = Formula::equal(displayed(Term::variable("p", "positions")), potter("Reigel"));
  EXPECT_EQ(print_formula(substitute(atom, "p", pos(3))), "displayed(3) = Reigel");
  Formula unrelated = Formula::equal(potter("Mills"), potter("Park"));
  EXPECT_EQ(substitute(unrelated, "p", pos(3)), unrelated);
  const auto& body = example1_phi().as<QuantifiedFormula>()->body;
  EXPECT_EQ(print_formula(substitute(body, "p", pos(1))), "displayed(1) = Reigel -> 1 = 1 | 1 = 6");
  EXPECT_THROW(substitute(atom, "p", potter("Mills")), IllTyped);
}

TEST(Substitute, StopsAtRebindingQuantifier) {
  Formula inner = Formula::exists(
      "p", "positions", Formula::equal(displayed(Term::variable("p", "positions")), potter("Park")));
  Formula f = Formula::conjunction(
      Formula::equal(displayed(Term::variable("p", "positions")), potter("Park")), inner);
  Formula g = substitute(f, "p", pos(2));
  EXPECT_EQ(print_formula(g), "displayed(2) = Park & exists p: positions. displayed(p) = Park");
}

TEST(Enumerate, TinyPredicateTheory) {
  Theory th = Theory::Builder().add_sort("s", {"a", "b"}).add_predicate("P", {"s"}).build();
  InterpretationEnumerator it(th);
  EXPECT_EQ(it.total(), 4u);
  std::vector<std::string> seen;
  while (const Interpretation* i = it.next()) seen.push_back(to_text(*i));
  ASSERT_EQ(seen.size(), 4u);
  // Last entry fastest: P(b) flips before P(a).
  EXPECT_EQ(seen[0], "P(a) = false\nP(b) = false\n");
  EXPECT_EQ(seen[1], "P(a) = false\nP(b) = true\n");
  EXPECT_EQ(seen[2], "P(a) = true\nP(b) = false\n");
  EXPECT_EQ(seen[3], "P(a) = true\nP(b) = true\n");
}

TEST(Enumerate, ExampleTheoryCountAndModels) {
  InterpretationEnumerator it(example1_theory());
  EXPECT_EQ(it.total(), 262144u);  // 8^6
  std::uint64_t n = 0, models = 0;
  while (const Interpretation* i = it.next()) {
    ++n;
    models += evaluate_unchecked(*i, example1_phi()) ? 1 : 0;
  }
  EXPECT_EQ(n, 262144u);
  EXPECT_EQ(models, 153664u);
  EXPECT_EQ(models, 8u * 8u * 7u * 7u * 7u * 7u);
}

TEST(Enumerate, TooLarge) {
  EXPECT_THROW(InterpretationEnumerator(example1_theory(), 1000), TooLarge);
  EXPECT_FALSE(count_interpretations(example1_theory(), 262143));
  EXPECT_EQ(count_interpretations(example1_theory(), 262144), 262144u);
}

TEST(EnumerateProperty, CountMatchesProductFormulaAndIsDuplicateFree) {
  Rng rng(14);
  TheoryShape shape;
  shape.max_interpretations = 3000;
  for (int trial = 0; trial < 40; ++trial) {
    Theory th = random_theory(rng, shape);
    std::uint64_t expected = 1;
    for (const auto& f : th.functions())
      for (std::size_t t = 0; t < th.tuple_count(f.args); ++t) expected *= th.domain_size(f.result);
    for (const auto& p : th.predicates())
      for (std::size_t t = 0; t < th.tuple_count(p.args); ++t) expected *= 2;
    InterpretationEnumerator it(th);
    std::set<std::string> seen;
    while (const Interpretation* i = it.next()) seen.insert(to_text(*i));
    EXPECT_EQ(seen.size(), expected);
    EXPECT_EQ(it.total(), expected);
  }
}

TEST(Interchange, TextAndJsonRoundTrip) {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    Theory th = random_theory(rng);
    Interpretation interp = random_interpretation(rng, th);
    EXPECT_EQ(interpretation_from_text(th, to_text(interp)), interp);
    EXPECT_EQ(interpretation_from_json(th, to_json(interp)), interp);
  }
}

TEST(Interchange, TextFormatIsSortedAndTotal) {
  std::string text = to_text(example2_interpretation());
  EXPECT_EQ(text,
            "displayed(1) = Reigel\ndisplayed(2) = Larsen\ndisplayed(3) = Reigel\n"
            "displayed(4) = Reigel\ndisplayed(5) = Reigel\ndisplayed(6) = Reigel\n");
  EXPECT_THROW(interpretation_from_text(example1_theory(), "displayed(1) = Reigel\n"), Error);
  EXPECT_THROW(interpretation_from_text(example1_theory(), text + "displayed(7) = Mills\n"), Error);
  nlohmann::json doc = to_json(example2_interpretation());
  EXPECT_EQ(doc["functions"]["displayed"]["2"], "Larsen");
}
