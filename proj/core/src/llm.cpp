#include "clover/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace clover {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string prompt_stage(std::string_view prompt) {
  static const std::regex header(R"(^\[stage:\s*([^\]\s]+)\s*\])");
  std::string first(prompt.substr(0, prompt.find('\n')));
  std::smatch m;
  return std::regex_search(first, m, header) ? m[1].str() : std::string();
}

StubLlm::StubLlm(std::map<std::string, std::string> by_digest, std::vector<Rule> rules)
    : by_digest_(std::move(by_digest)), rules_(std::move(rules)), served_(rules_.size(), 0) {}

std::unique_ptr<StubLlm> StubLlm::from_json(const nlohmann::json& doc) {
  std::map<std::string, std::string> digests;
  if (doc.contains("digests"))
    for (const auto& [k, v] : doc.at("digests").items()) digests[k] = v.get<std::string>();
  std::vector<Rule> rules;
  if (doc.contains("rules")) {
    for (const auto& r : doc.at("rules")) {
      Rule rule;
      rule.stage = r.value("stage", "");
      if (r.contains("contains")) rule.contains = r.at("contains").get<std::vector<std::string>>();
      if (r.contains("responses"))
        rule.responses = r.at("responses").get<std::vector<std::string>>();
      else
        rule.responses.push_back(r.at("response").get<std::string>());
      if (rule.responses.empty()) throw LlmError("stub rule without responses");
      rules.push_back(std::move(rule));
    }
  }
  return std::make_unique<StubLlm>(std::move(digests), std::move(rules));
}

std::unique_ptr<StubLlm> StubLlm::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LlmError("cannot open stub file " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw LlmError("bad stub file " + path.string() + ": " + e.what());
  }
}

std::string StubLlm::complete(const std::string& prompt, const LlmParams&) {
  ++calls_;
  std::string digest = sha256_hex(prompt);
  if (auto it = by_digest_.find(digest); it != by_digest_.end()) return it->second;
  std::string stage = prompt_stage(prompt);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& rule = rules_[i];
    if (!rule.stage.empty() && rule.stage != stage) continue;
    bool all = std::all_of(rule.contains.begin(), rule.contains.end(),
                           [&](const std::string& s) { return prompt.find(s) != std::string::npos; });
    if (!all) continue;
    std::lock_guard lock(mutex_);
    std::size_t k = std::min(served_[i]++, rule.responses.size() - 1);
    return rule.responses[k];
  }
  throw LlmError("stub has no response for " + (stage.empty() ? "prompt" : stage + " prompt") +
                 " " + digest);
}

CachingLlm::CachingLlm(LlmClient& inner, std::filesystem::path file)
    : inner_(inner), file_(std::move(file)) {
  if (file_.empty() || !std::filesystem::exists(file_)) return;
  std::ifstream in(file_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto entry = nlohmann::json::parse(line);
      entries_[entry.at("key").get<std::string>()] = entry.at("response").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw LlmError("cache " + file_.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string CachingLlm::key(const std::string& prompt, const LlmParams& params) {
  nlohmann::json k{{"model", params.model},
                   {"temperature", params.temperature},
                   {"maxTokens", params.max_tokens},
                   {"seed", params.seed},
                   {"prompt", sha256_hex(prompt)}};
  return sha256_hex(k.dump());
}

std::size_t CachingLlm::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string CachingLlm::complete(const std::string& prompt, const LlmParams& params) {
  std::string k = key(prompt, params);
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(k); it != entries_.end()) return it->second;
  }
  ++inner_calls_;
  std::string response = inner_.complete(prompt, params);
  std::lock_guard lock(mutex_);
  if (entries_.emplace(k, response).second && !file_.empty()) {
    std::ofstream out(file_, std::ios::app);
    out << nlohmann::json{{"key", k}, {"model", params.model}, {"response", response}}.dump() << '\n';
    if (!out) throw LlmError("cannot append to cache " + file_.string());
  }
  return response;
}

HttpMapping HttpMapping::from_json(const nlohmann::json& doc) {
  HttpMapping m;
  auto take = [&](const char* name, std::string& field) {
    if (doc.contains(name)) field = doc.at(name).get<std::string>();
  };
  take("prompt", m.prompt);
  take("model", m.model);
  take("temperature", m.temperature);
  take("maxTokens", m.max_tokens);
  take("seed", m.seed);
  take("response", m.response);
  if (doc.contains("constants"))
    for (const auto& [k, v] : doc.at("constants").items()) m.constants[k] = v;
  return m;
}

HttpConfig HttpConfig::from_env() {
  auto env = [](const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
  };
  HttpConfig c;
  c.url = env("CLOVER_LLM_URL");
  c.model = env("CLOVER_LLM_MODEL");
  c.api_key = env("CLOVER_LLM_API_KEY");
  if (c.url.empty()) throw LlmError("CLOVER_LLM_URL is not set");
  return c;
}

HttpLlm::HttpLlm(HttpConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, url)) throw LlmError("bad LLM endpoint URL: " + config_.url);
  origin_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
}

std::string HttpLlm::complete(const std::string& prompt, const LlmParams& params) {
  using nlohmann::json;
  const HttpMapping& map = config_.mapping;
  json body = json::object();
  for (const auto& [ptr, value] : map.constants) body[json::json_pointer(ptr)] = value;
  auto put = [&](const std::string& ptr, json value) {
    if (!ptr.empty()) body[json::json_pointer(ptr)] = std::move(value);
  };
  put(map.prompt, prompt);
  put(map.model, params.model.empty() ? config_.model : params.model);
  put(map.temperature, params.temperature);
  put(map.max_tokens, params.max_tokens);
  put(map.seed, params.seed);

  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout_seconds);
  client.set_read_timeout(config_.timeout_seconds);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_millis << (attempt - 1)));
    ++requests_;
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw LlmError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    try {
      json doc = json::parse(res->body);
      return doc.at(json::json_pointer(map.response)).get<std::string>();
    } catch (const json::exception& e) {
      throw LlmError(std::string("unexpected LLM response: ") + e.what());
    }
  }
  throw LlmError(last_error + " after " + std::to_string(config_.retries + 1) + " attempts");
}

}  // namespace clover
