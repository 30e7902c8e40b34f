#ifndef CLOVER_PROMPTS_HPP
#define CLOVER_PROMPTS_HPP

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clover/error.hpp"

namespace clover {

class PromptError : public Error {
 public:
  using Error::Error;
};

// Few-shot exemplars per dataset; unknown tasks get one.
std::size_t shot_count(std::string_view task);

// Named text assets: stage templates (`preprocess`, `parse`, `accumulate`,
// `translate`, `disprove`, `solver_function`), shared texts (`definitions`,
// `accumulation_rules`) and exemplar pools (`exemplars_<stage>`, entries
// separated by a line of `=====`).
class PromptAssets {
 public:
  // The set compiled into the library.
  static PromptAssets builtin();
  // Built-ins overridden by any `<name>.txt` in the directory.
  static PromptAssets from_directory(const std::filesystem::path& dir);

  bool has(std::string_view name) const;
  const std::string& text(std::string_view name) const;
  std::vector<std::string> names() const;

  std::vector<std::string> exemplars(std::string_view stage) const;
  // The first shot_count(task) exemplars, numbered. Throws PromptError when
  // the pool is too small.
  std::string exemplar_block(std::string_view stage, std::string_view task) const;

  // Replaces every `{{slot}}`; throws PromptError naming any slot left unfilled.
  std::string render(std::string_view name, const std::map<std::string, std::string>& slots) const;

 private:
  std::map<std::string, std::string, std::less<>> texts_;
};

}  // namespace clover

#endif  // CLOVER_PROMPTS_HPP
