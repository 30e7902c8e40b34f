#ifndef CLOVER_ERROR_HPP
#define CLOVER_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace clover {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Byte offsets into the original source text plus a 1-based line/column.
// A default-constructed span means "no source position".
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t line = 0;
  std::size_t column = 0;

  bool known() const { return line != 0; }
};

std::string to_string(const SourceSpan& span);

enum class SortErrorKind { UnknownSymbol, ArityMismatch, SortMismatch, FreeVariable };

const char* to_string(SortErrorKind kind);

struct SortError {
  SortErrorKind kind;
  std::string node;     // printed form of the offending term or formula
  std::string message;
  SourceSpan span;
};

// Raised when a formula fails sort checking and the caller required a
// well-typed formula.
class IllTyped : public Error {
 public:
  explicit IllTyped(std::vector<SortError> errors);
  const std::vector<SortError>& errors() const { return errors_; }

 private:
  std::vector<SortError> errors_;
};

class InvalidTheory : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

// A propositional model violated an exactly-one constraint while decoding.
class InconsistentModel : public Error {
 public:
  using Error::Error;
};

}  // namespace clover

#endif  // CLOVER_ERROR_HPP
