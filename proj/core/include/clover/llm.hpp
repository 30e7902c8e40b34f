#ifndef CLOVER_LLM_HPP
#define CLOVER_LLM_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "clover/error.hpp"

namespace clover {

class LlmError : public Error {
 public:
  using Error::Error;
};

struct LlmParams {
  std::string model;  // empty: the client's default
  double temperature = 0.0;
  int max_tokens = 2048;
  std::uint64_t seed = 0;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Throws LlmError on transport failure or when no response is available.
  virtual std::string complete(const std::string& prompt, const LlmParams& params) = 0;
};

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// The X of a leading `[stage: X]` line, or empty.
std::string prompt_stage(std::string_view prompt);

// Canned responses. Exact prompt digests win; otherwise the first rule whose
// stage matches and whose substrings all occur in the prompt answers. A rule
// with several responses returns them in turn and then repeats the last.
class StubLlm final : public LlmClient {
 public:
  struct Rule {
    std::string stage;
    std::vector<std::string> contains;
    std::vector<std::string> responses;
  };

  StubLlm(std::map<std::string, std::string> by_digest, std::vector<Rule> rules);

  // {"digests": {hex: response}, "rules": [{stage, contains, response | responses}]}
  static std::unique_ptr<StubLlm> from_json(const nlohmann::json& doc);
  static std::unique_ptr<StubLlm> load(const std::filesystem::path& path);

  std::string complete(const std::string& prompt, const LlmParams& params) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::map<std::string, std::string> by_digest_;
  std::vector<Rule> rules_;
  std::vector<std::size_t> served_;
  std::mutex mutex_;
  std::atomic<std::size_t> calls_{0};
};

// Memoizes another client. Entries are keyed by model, sampling parameters and
// prompt digest, and appended to a JSONL file when one is given.
class CachingLlm final : public LlmClient {
 public:
  explicit CachingLlm(LlmClient& inner, std::filesystem::path file = {});

  std::string complete(const std::string& prompt, const LlmParams& params) override;

  static std::string key(const std::string& prompt, const LlmParams& params);
  std::size_t inner_calls() const { return inner_calls_.load(); }
  std::size_t size() const;

 private:
  LlmClient& inner_;
  std::filesystem::path file_;
  std::unordered_map<std::string, std::string> entries_;
  mutable std::mutex mutex_;
  std::atomic<std::size_t> inner_calls_{0};
};

// Where request fields go and where the completion comes from, as JSON
// pointers into the request and response bodies. An empty pointer omits the
// field. The defaults fit a plain completions endpoint.
struct HttpMapping {
  std::string prompt = "/prompt";
  std::string model = "/model";
  std::string temperature = "/temperature";
  std::string max_tokens = "/max_tokens";
  std::string seed = "/seed";
  std::string response = "/choices/0/text";
  std::map<std::string, nlohmann::json> constants;  // pointer -> fixed value

  // Keys: prompt, model, temperature, maxTokens, seed, response, constants.
  static HttpMapping from_json(const nlohmann::json& doc);
};

struct HttpConfig {
  std::string url;  // full endpoint, http:// or https://
  std::string model;
  std::string api_key;
  HttpMapping mapping;
  int retries = 2;
  int backoff_millis = 500;
  int timeout_seconds = 120;

  // CLOVER_LLM_URL, CLOVER_LLM_MODEL, CLOVER_LLM_API_KEY. Throws LlmError
  // when the URL is unset.
  static HttpConfig from_env();
};

class HttpLlm final : public LlmClient {
 public:
  explicit HttpLlm(HttpConfig config);

  std::string complete(const std::string& prompt, const LlmParams& params) override;
  std::size_t requests() const { return requests_.load(); }

 private:
  HttpConfig config_;
  std::string origin_;
  std::string path_;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace clover

#endif  // CLOVER_LLM_HPP
