#ifndef CLOVER_TESTS_GENERATORS_HPP
#define CLOVER_TESTS_GENERATORS_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "clover/cnf.hpp"
#include "clover/formula.hpp"
#include "clover/interpretation.hpp"
#include "clover/theory.hpp"

namespace clover::testing {

using Rng = std::mt19937_64;

struct TheoryShape {
  int max_sorts = 2;
  int max_domain = 3;
  int max_functions = 2;
  int max_predicates = 1;
  bool allow_integer_sort = true;
  std::uint64_t max_interpretations = 20'000;  // keeps brute force cheap
};

// At least one function or predicate is always declared.
Theory random_theory(Rng& rng, const TheoryShape& shape = {});

// A closed, well-typed formula of the given maximum connective depth.
Formula random_formula(Rng& rng, const Theory& theory, int depth);

Interpretation random_interpretation(Rng& rng, const Theory& theory);

Cnf random_cnf(Rng& rng, std::uint32_t num_vars, std::size_t num_clauses, std::size_t width);
// Clauses of mixed width 1..max_width.
Cnf random_mixed_cnf(Rng& rng, std::uint32_t num_vars, std::size_t num_clauses,
                     std::size_t max_width);

}  // namespace clover::testing

#endif
