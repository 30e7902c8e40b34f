#ifndef CLOVER_CNF_HPP
#define CLOVER_CNF_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clover/error.hpp"

namespace clover {

// DIMACS-style literal: +v or -v for a variable id v in 1..N.
using Lit = std::int32_t;
using Var = std::uint32_t;

inline Var var_of(Lit lit) { return static_cast<Var>(lit < 0 ? -lit : lit); }

struct Cnf {
  std::uint32_t num_vars = 0;
  std::vector<std::vector<Lit>> clauses;

  bool operator==(const Cnf&) const = default;
};

// An assignment indexed by variable id; slot 0 is unused.
using Assignment = std::vector<bool>;

bool satisfies(const Cnf& cnf, const Assignment& assignment);

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Comment lines are skipped. Clauses may span lines; each ends with 0.
Cnf read_dimacs(std::string_view source);

// Each entry of `comments` becomes a `c ...` line before the header.
std::string write_dimacs(const Cnf& cnf, std::span<const std::string> comments = {});

}  // namespace clover

#endif  // CLOVER_CNF_HPP
