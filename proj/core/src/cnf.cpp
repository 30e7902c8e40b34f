#include "clover/cnf.hpp"

#include <charconv>
#include <limits>

namespace clover {

bool satisfies(const Cnf& cnf, const Assignment& assignment) {
  for (const auto& clause : cnf.clauses) {
    bool sat = false;
    for (Lit lit : clause) {
      Var v = var_of(lit);
      if (v < assignment.size() && assignment[v] == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

FormatError::FormatError(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

long long to_int(std::string_view tok, std::size_t line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw FormatError(line, "expected an integer, found '" + std::string(tok) + "'");
  return value;
}

}  // namespace

Cnf read_dimacs(std::string_view source) {
  Cnf cnf;
  bool header = false;
  std::size_t declared_clauses = 0;
  std::vector<Lit> pending;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t eol = source.find('\n', pos);
    if (eol == std::string_view::npos) eol = source.size();
    std::string_view line = source.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    auto toks = tokens(line);
    if (toks.empty() || toks[0][0] == 'c') continue;
    if (toks[0] == "%") break;  // SATLIB end marker
    if (toks[0] == "p") {
      if (header) throw FormatError(line_no, "duplicate header");
      if (toks.size() != 4 || toks[1] != "cnf")
        throw FormatError(line_no, "header must be 'p cnf <vars> <clauses>'");
      long long n = to_int(toks[2], line_no);
      long long m = to_int(toks[3], line_no);
      if (n < 0 || m < 0 || n > std::numeric_limits<Lit>::max())
        throw FormatError(line_no, "header counts out of range");
      cnf.num_vars = static_cast<std::uint32_t>(n);
      declared_clauses = static_cast<std::size_t>(m);
      header = true;
      continue;
    }
    if (!header) throw FormatError(line_no, "clause before 'p cnf' header");
    for (std::string_view tok : toks) {
      long long lit = to_int(tok, line_no);
      if (lit == 0) {
        if (pending.empty()) throw FormatError(line_no, "empty clause");
        cnf.clauses.push_back(std::move(pending));
        pending.clear();
        continue;
      }
      if (lit < -static_cast<long long>(cnf.num_vars) || lit > cnf.num_vars)
        throw FormatError(line_no, "literal " + std::string(tok) + " exceeds variable count " +
                                       std::to_string(cnf.num_vars));
      pending.push_back(static_cast<Lit>(lit));
    }
  }
  if (!header) throw FormatError(line_no, "missing 'p cnf' header");
  if (!pending.empty()) throw FormatError(line_no, "last clause is not terminated by 0");
  if (cnf.clauses.size() != declared_clauses)
    throw FormatError(line_no, "header declares " + std::to_string(declared_clauses) +
                                   " clauses, found " + std::to_string(cnf.clauses.size()));
  return cnf;
}

std::string write_dimacs(const Cnf& cnf, std::span<const std::string> comments) {
  std::string out;
  for (const std::string& c : comments) out += "c " + c + '\n';
  out += "p cnf " + std::to_string(cnf.num_vars) + ' ' + std::to_string(cnf.clauses.size()) + '\n';
  for (const auto& clause : cnf.clauses) {
    for (Lit lit : clause) {
      out += std::to_string(lit);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

}  // namespace clover
