#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace clover::testing {

std::string fixture_path(const std::string& name) { return std::string(CLOVER_FIXTURE_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const FolDocument& example1() {
  static const FolDocument doc = parse_document(read_file(fixture_path("example1.fol")));
  return doc;
}

const Theory& example1_theory() { return *example1().theory; }

const Formula& example1_phi() { return *example1().find("phi"); }

Interpretation example2_interpretation() {
  const Theory& th = example1_theory();
  SymbolId displayed = *th.find_function("displayed");
  SortId potters = *th.find_sort("potters");
  Interpretation interp(th);
  const char* row[] = {"Reigel", "Larsen", "Reigel", "Reigel", "Reigel", "Reigel"};
  for (std::size_t p = 0; p < 6; ++p)
    interp.function_table(displayed)[p] = *th.element_index(potters, row[p]);
  return interp;
}

Formula ex1(const std::string& source) { return parse_formula(example1_theory(), source); }

}  // namespace clover::testing
