#ifndef CLOVER_TESTS_FIXTURES_HPP
#define CLOVER_TESTS_FIXTURES_HPP

#include <string>

#include "clover/formula.hpp"
#include "clover/interpretation.hpp"
#include "clover/text.hpp"
#include "clover/theory.hpp"

namespace clover::testing {

std::string fixture_path(const std::string& name);
std::string read_file(const std::string& path);

// Potters/positions theory with one function `displayed`.
const FolDocument& example1();
const Theory& example1_theory();
const Formula& example1_phi();

// displayed: 1->Reigel, 2->Larsen, 3..6->Reigel.
Interpretation example2_interpretation();

// Parses against the example theory.
Formula ex1(const std::string& source);

}  // namespace clover::testing

#endif
