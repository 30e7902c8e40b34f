#include "clover/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

namespace clover {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kPromptAssets[];
extern const std::size_t kPromptAssetCount;
}  // namespace detail

std::size_t shot_count(std::string_view task) {
  static const std::map<std::string, std::size_t, std::less<>> table = {
      {"ar-lsat", 5}, {"zebralogic", 1}, {"puzzle", 1}, {"symbol", 1},
      {"deduction", 2}, {"folio", 2}, {"proofwriter", 1},
  };
  std::string key(task);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  auto it = table.find(key);
  return it == table.end() ? 1 : it->second;
}

PromptAssets PromptAssets::builtin() {
  PromptAssets assets;
  for (std::size_t i = 0; i < detail::kPromptAssetCount; ++i)
    assets.texts_.emplace(std::string(detail::kPromptAssets[i].first),
                          std::string(detail::kPromptAssets[i].second));
  return assets;
}

PromptAssets PromptAssets::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw PromptError("not a directory: " + dir.string());
  PromptAssets assets = builtin();
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::ostringstream body;
    body << in.rdbuf();
    assets.texts_[entry.path().stem().string()] = body.str();
  }
  return assets;
}

bool PromptAssets::has(std::string_view name) const { return texts_.find(name) != texts_.end(); }

const std::string& PromptAssets::text(std::string_view name) const {
  auto it = texts_.find(name);
  if (it == texts_.end()) throw PromptError("no prompt asset named '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> PromptAssets::names() const {
  std::vector<std::string> out;
  for (const auto& [name, body] : texts_) out.push_back(name);
  return out;
}

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

}  // namespace

std::vector<std::string> PromptAssets::exemplars(std::string_view stage) const {
  std::vector<std::string> out;
  std::istringstream in(text("exemplars_" + std::string(stage)));
  std::string line, current;
  while (std::getline(in, line)) {
    if (trim(line) == "=====") {
      out.push_back(trim(current));
      current.clear();
    } else {
      current += line + "\n";
    }
  }
  if (!trim(current).empty()) out.push_back(trim(current));
  return out;
}

std::string PromptAssets::exemplar_block(std::string_view stage, std::string_view task) const {
  std::vector<std::string> pool = exemplars(stage);
  std::size_t n = shot_count(task);
  if (pool.size() < n)
    throw PromptError("stage " + std::string(stage) + " has " + std::to_string(pool.size()) +
                      " exemplars, task " + std::string(task) + " needs " + std::to_string(n));
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += "\n\n";
    out += "Example " + std::to_string(i + 1) + ":\n" + pool[i];
  }
  return out;
}

std::string PromptAssets::render(std::string_view name,
                                 const std::map<std::string, std::string>& slots) const {
  const std::string& tmpl = text(name);
  std::string out;
  std::vector<std::string> missing;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string::npos) break;
    std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) break;
    out.append(tmpl, pos, open - pos);
    std::string slot = tmpl.substr(open + 2, close - open - 2);
    auto it = slots.find(slot);
    if (it == slots.end()) {
      missing.push_back(slot);
    } else {
      out += it->second;
    }
    pos = close + 2;
  }
  out.append(tmpl, pos);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw PromptError("template " + std::string(name) + " has unfilled slots: " + list);
  }
  return out;
}

}  // namespace clover
