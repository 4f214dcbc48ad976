#pragma once

#include <cstdint>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/sha256.hpp"

namespace supernova::mock {

// One scripted rule: matches on model id and/or a substring of the last
// user message. Replies are consumed in order; the last one repeats.
// `error` entries throw a retriable endpoint failure instead of replying.
struct ScriptEntry {
  std::string model;     // empty: any model
  std::string contains;  // empty: any prompt
  std::vector<std::string> replies;
  std::string reasoning;  // optional reasoning trace attached to every reply
  bool error = false;
  size_t next = 0;
  std::vector<std::string> contains_all;  // every element must appear in the prompt
};

inline ScriptEntry script_rule(std::string model, std::vector<std::string> contains_all,
                               std::vector<std::string> replies, bool error = false) {
  ScriptEntry e;
  e.model = std::move(model);
  e.contains_all = std::move(contains_all);
  e.replies = std::move(replies);
  e.error = error;
  return e;
}

class MockChatClient : public ChatClient {
 public:
  explicit MockChatClient(std::vector<ScriptEntry> script, bool strict = true,
                          std::string default_reply = "")
      : script_(std::move(script)), strict_(strict), default_reply_(std::move(default_reply)) {}

  static std::vector<ScriptEntry> script_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("chat script not readable: " + path);
    nlohmann::json j;
    in >> j;
    std::vector<ScriptEntry> entries;
    for (const auto& e : j) {
      ScriptEntry entry;
      entry.model = e.value("model", std::string{});
      if (e.contains("contains")) {
        if (e["contains"].is_array()) {
          for (const auto& c : e["contains"]) entry.contains_all.push_back(c.get<std::string>());
        } else {
          entry.contains = e["contains"].get<std::string>();
        }
      }
      if (e.contains("reply")) entry.replies.push_back(e["reply"].get<std::string>());
      for (const auto& r : e.value("replies", nlohmann::json::array()))
        entry.replies.push_back(r.get<std::string>());
      entry.reasoning = e.value("reasoning", std::string{});
      entry.error = e.value("error", false);
      entries.push_back(std::move(entry));
    }
    return entries;
  }

  ChatResponse complete(const ChatRequest& request) override {
    std::lock_guard<std::mutex> lock(mu_);
    ++call_count_;
    requests_.push_back(request);
    const std::string& prompt =
        request.messages.empty() ? std::string{} : request.messages.back().content;
    for (auto& entry : script_) {
      if (!entry.model.empty() && entry.model != request.model) continue;
      if (!entry.contains.empty() && prompt.find(entry.contains) == std::string::npos) continue;
      bool all_present = true;
      for (const auto& needle : entry.contains_all)
        if (prompt.find(needle) == std::string::npos) {
          all_present = false;
          break;
        }
      if (!all_present) continue;
      if (entry.error) throw EndpointError("scripted endpoint failure");
      if (entry.replies.empty()) break;
      size_t i = std::min(entry.next, entry.replies.size() - 1);
      ++entry.next;
      ChatResponse resp;
      resp.content = entry.replies[i];
      resp.reasoning = entry.reasoning;
      return resp;
    }
    if (strict_) {
      std::string head = prompt.substr(0, 160);
      throw ConfigError("mock chat: unmatched request (model=" + request.model +
                        ", prompt=\"" + head + "...\")");
    }
    return {default_reply_, ""};
  }

  int call_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return call_count_;
  }

  std::vector<ChatRequest> requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<ScriptEntry> script_;
  bool strict_;
  std::string default_reply_;
  int call_count_ = 0;
  std::vector<ChatRequest> requests_;
};

// Deterministic embeddings: each vector is a pure function of (seed, text),
// identical across runs, almost surely distinct across texts.
class HashEmbeddingClient : public EmbeddingClient {
 public:
  HashEmbeddingClient(int dim, uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim < 1) throw ConfigError("mock embedding dim must be positive");
  }

  std::vector<std::vector<float>> embed(const std::string& model,
                                        const std::vector<std::string>& inputs) override {
    (void)model;
    std::lock_guard<std::mutex> lock(mu_);
    ++batch_count_;
    text_count_ += static_cast<int>(inputs.size());
    std::vector<std::vector<float>> out;
    out.reserve(inputs.size());
    for (const auto& text : inputs) out.push_back(vector_for(text));
    return out;
  }

  int batch_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return batch_count_;
  }
  int text_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return text_count_;
  }

 private:
  static uint64_t splitmix64(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::vector<float> vector_for(const std::string& text) const {
    auto digest_hex = crypto::sha256_hex(text);
    uint64_t h = 0;
    for (int i = 0; i < 16; ++i) {
      char c = digest_hex[static_cast<size_t>(i)];
      h = (h << 4) | uint64_t(c <= '9' ? c - '0' : c - 'a' + 10);
    }
    uint64_t state = seed_ ^ h;
    std::vector<float> v(static_cast<size_t>(dim_));
    for (auto& x : v) {
      uint64_t bits = splitmix64(state);
      double u = double(bits >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
      x = static_cast<float>(2.0 * u - 1.0);
    }
    return v;
  }

  int dim_;
  uint64_t seed_;
  mutable std::mutex mu_;
  int batch_count_ = 0;
  int text_count_ = 0;
};

}  // namespace supernova::mock
