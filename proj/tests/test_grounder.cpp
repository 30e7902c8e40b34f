#include <algorithm>

#include <gtest/gtest.h>

#include "clover/error.hpp"
#include "clover/ground.hpp"
#include "clover/sat.hpp"
#include "clover/semantics.hpp"
#include "clover/text.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace clover;
using namespace clover::testing;

namespace {

// Flattens a right-folded conjunction or disjunction.
void collect(const Formula& f, Connective op, std::vector<Formula>& out) {
  const auto* b = f.as<BinaryFormula>();
  if (b && b->op == op) {
    collect(b->lhs, op, out);
    collect(b->rhs, op, out);
  } else {
    out.push_back(f);
  }
}

bool has_quantifier(const Formula& f) {
  if (f.as<QuantifiedFormula>()) return true;
  if (const auto* n = f.as<Negation>()) return has_quantifier(n->operand);
  if (const auto* b = f.as<BinaryFormula>()) return has_quantifier(b->lhs) || has_quantifier(b->rhs);
  return false;
}

Var sel(const VarMap& vars, const char* fn, std::vector<const char*> args, const char* value) {
  const Theory& th = vars.theory();
  SymbolId f = *th.find_function(fn);
  const FunctionDecl& decl = th.function(f);
  std::vector<ElemId> tuple;
  for (std::size_t i = 0; i < args.size(); ++i) tuple.push_back(*th.element_index(decl.args[i], args[i]));
  return vars.selector(f, th.tuple_index(decl.args, tuple), *th.element_index(decl.result, value));
}

}  // namespace

TEST(Expand, ExampleBecomesSixImplications) {
  Formula g = expand_quantifiers(example1_theory(), example1_phi());
  EXPECT_FALSE(has_quantifier(g));
  std::vector<Formula> parts;
  collect(g, Connective::And, parts);
  ASSERT_EQ(parts.size(), 6u);
  EXPECT_EQ(print_formula(parts[2]), "displayed(3) = Reigel -> 3 = 1 | 3 = 6");
}

TEST(Expand, SingletonAndNestedDomains) {
  Theory th = parse_theory("sort s = {a}\nsort t = {b0, b1}\nsort u = {c0, c1, c2}\npred P : s\npred R : t * u");
  EXPECT_EQ(print_formula(expand_quantifiers(th, parse_formula(th, "exists x: s. P(x)"))), "P(a)");

  Formula g = expand_quantifiers(th, parse_formula(th, "forall x: t. exists y: u. R(x, y)"));
  std::vector<Formula> outer;
  collect(g, Connective::And, outer);
  ASSERT_EQ(outer.size(), 2u);
  std::size_t atoms = 0;
  for (const Formula& f : outer) {
    std::vector<Formula> inner;
    collect(f, Connective::Or, inner);
    EXPECT_EQ(inner.size(), 3u);
    atoms += inner.size();
  }
  EXPECT_EQ(atoms, 6u);
}

TEST(Expand, ShadowedVariable) {
  Theory th = parse_theory("sort s = {a, b}\npred P : s\npred Q : s");
  Formula f = parse_formula(th, "forall x: s. P(x) & exists x: s. Q(x)");
  EXPECT_EQ(print_formula(expand_quantifiers(th, f)),
            "P(a) & (Q(a) | Q(b)) & (P(b) & (Q(a) | Q(b)))");
}

TEST(Encode, ExactlyOneClausesForExampleTheory) {
  Encoding enc = encode(example1_theory(), {});
  EXPECT_EQ(enc.vars.num_selectors(), 48u);
  EXPECT_EQ(enc.vars.num_predicate_vars(), 0u);
  EXPECT_EQ(enc.cnf.num_vars, 48u);
  std::size_t alo = 0, amo = 0;
  for (const auto& c : enc.cnf.clauses) {
    if (c.size() == 8 && std::all_of(c.begin(), c.end(), [](Lit l) { return l > 0; })) ++alo;
    if (c.size() == 2 && c[0] < 0 && c[1] < 0) ++amo;
  }
  EXPECT_EQ(alo, 6u);
  EXPECT_EQ(amo, 168u);
  EXPECT_EQ(enc.cnf.clauses.size(), 174u);
}

TEST(Encode, GroundAtomIsAUnitSelector) {
  Encoding enc = ground(example1_theory(), {ex1("displayed(3) = Reigel")});
  Lit s = static_cast<Lit>(sel(enc.vars, "displayed", {"3"}, "Reigel"));
  EXPECT_NE(std::find(enc.cnf.clauses.begin(), enc.cnf.clauses.end(), std::vector<Lit>{s}),
            enc.cnf.clauses.end());
  EXPECT_EQ(enc.cnf.num_vars, 48u);  // no auxiliaries needed
}

TEST(Encode, InvariantsOnClauses) {
  Encoding enc = ground(example1_theory(), {example1_phi(), ex1("displayed(2) = Larsen <-> displayed(5) != Mills")});
  for (const auto& c : enc.cnf.clauses) {
    ASSERT_FALSE(c.empty());
    for (Lit l : c) {
      ASSERT_GE(var_of(l), 1u);
      ASSERT_LE(var_of(l), enc.cnf.num_vars);
      EXPECT_EQ(std::count(c.begin(), c.end(), l), 1);
      EXPECT_EQ(std::count(c.begin(), c.end(), -l), 0);
    }
  }
  for (Var v = enc.vars.num_selectors() + 1; v <= enc.cnf.num_vars; ++v)
    EXPECT_EQ(enc.vars.role(v).kind, VarRole::Kind::Auxiliary);
}

TEST(Encode, UnsatisfiableRootStillHasNonEmptyClauses) {
  Encoding enc = ground(example1_theory(), {ex1("Reigel = Larsen")});
  EXPECT_EQ(solve(enc.cnf).status, SatStatus::Unsat);
  for (const auto& c : enc.cnf.clauses) EXPECT_FALSE(c.empty());
}

TEST(Decode, ModelWithPinnedPosition) {
  std::vector<Formula> fs{example1_phi(), ex1("displayed(2) = Larsen")};
  Encoding enc = ground(example1_theory(), fs);
  SolveResult r = solve(enc.cnf);
  ASSERT_EQ(r.status, SatStatus::Sat);
  Interpretation i = decode_model(enc.vars, r.model);
  for (const Formula& f : fs) EXPECT_TRUE(oracle_evaluate(i, f));
  EXPECT_TRUE(evaluate(i, ex1("displayed(2) = Larsen")));
  for (int p : {2, 3, 4, 5})
    EXPECT_TRUE(evaluate(i, ex1("displayed(" + std::to_string(p) + ") != Reigel")));
}

TEST(Decode, PinnedTableReturnsSecondExampleInterpretation) {
  Interpretation expected = example2_interpretation();
  std::vector<Formula> pins;
  for (int p = 1; p <= 6; ++p)
    pins.push_back(ex1("displayed(" + std::to_string(p) + ") = " + (p == 2 ? "Larsen" : "Reigel")));
  Encoding enc = ground(example1_theory(), pins);
  SolveResult r = solve(enc.cnf);
  ASSERT_EQ(r.status, SatStatus::Sat);
  EXPECT_EQ(decode_model(enc.vars, r.model), expected);
}

TEST(Decode, PredicateOnlyTheoryIsTotal) {
  Theory th = parse_theory("sort s = {a, b, c}\npred P : s\npred R : s * s");
  Encoding enc = encode(th, {});
  EXPECT_TRUE(enc.cnf.clauses.empty());
  SolveResult r = solve(enc.cnf);
  ASSERT_EQ(r.status, SatStatus::Sat);
  Interpretation i = decode_model(enc.vars, r.model);
  EXPECT_EQ(i.predicate_table(0).size(), 3u);
  EXPECT_EQ(i.predicate_table(1).size(), 9u);
}

TEST(Decode, ViolatedExactlyOneIsReported) {
  Encoding enc = encode(example1_theory(), {});
  Assignment all_false(enc.cnf.num_vars + 1, false);
  EXPECT_THROW(decode_model(enc.vars, all_false), InconsistentModel);
  Assignment two(enc.cnf.num_vars + 1, false);
  for (int p = 1; p <= 6; ++p) two[sel(enc.vars, "displayed", {std::to_string(p).c_str()}, "Mills")] = true;
  two[sel(enc.vars, "displayed", {"4"}, "Park")] = true;
  EXPECT_THROW(decode_model(enc.vars, two), InconsistentModel);
}

TEST(Dimacs, CommentsDocumentTheVarMap) {
  Encoding enc = encode(example1_theory(), {});
  std::string text = write_dimacs(enc.cnf, dimacs_comments(enc.vars));
  EXPECT_EQ(text.rfind("c sel displayed(1)=Larsen 1\n", 0), 0u);
  EXPECT_NE(text.find("c sel displayed(6)=Vance 48\np cnf 48 174\n"), std::string::npos);
  EXPECT_EQ(read_dimacs(text), enc.cnf);

  Theory th = parse_theory("sort s = {a, b}\npred R : s * s");
  auto comments = dimacs_comments(encode(th, {}).vars);
  EXPECT_EQ(comments.front(), "pv R(a,a) 1");
  EXPECT_EQ(comments.back(), "pv R(b,b) 4");
}

TEST(GroundingProperty, AgreesWithBruteForceAndModelsCheckOut) {
  Rng rng(31);
  TheoryShape shape;
  shape.max_domain = 3;
  int sat = 0, unsat = 0;
  for (int trial = 0; trial < 250; ++trial) {
    Theory th = random_theory(rng, shape);
    std::vector<Formula> fs;
    int n = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int k = 0; k < n; ++k) fs.push_back(random_formula(rng, th, 4));
    Encoding enc = ground(th, fs);
    SolveResult r = solve(enc.cnf);
    bool expected = oracle_satisfiable(th, fs);
    ASSERT_EQ(r.status == SatStatus::Sat, expected) << "trial " << trial;
    if (r.status != SatStatus::Sat) {
      ++unsat;
      continue;
    }
    ++sat;
    Interpretation i = decode_model(enc.vars, r.model);
    for (std::size_t k = 0; k < fs.size(); ++k) {
      EXPECT_TRUE(oracle_evaluate(i, fs[k])) << print_formula(fs[k]);
      // Tseitin: the circuit, read only through selectors and pv, holds.
      EXPECT_TRUE(enc.circuit.evaluate(enc.roots[k], r.model));
    }
  }
  EXPECT_GT(sat, 20);
  EXPECT_GT(unsat, 20);
}

TEST(Circuit, SimplifiesAndHashConses) {
  Circuit c;
  auto x = c.variable(1), y = c.variable(2);
  EXPECT_EQ(c.conjunction({x, y}), c.conjunction({y, x, x}));
  EXPECT_EQ(c.conjunction({x, c.negate(x)}), c.constant(false));
  EXPECT_EQ(c.disjunction({x, c.negate(x)}), c.constant(true));
  EXPECT_EQ(c.negate(c.negate(x)), x);
  EXPECT_EQ(c.conjunction({x, c.constant(true)}), x);
  EXPECT_EQ(c.disjunction({}), c.constant(false));
  auto nested = c.conjunction({x, c.conjunction({y, c.variable(3)})});
  EXPECT_EQ(c.node(nested).children.size(), 3u);
}
