#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>

#include <json.hpp>

#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/sha256.hpp"

namespace supernova::cache {

namespace fs = std::filesystem;

inline void atomic_write(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  fs::rename(tmp, path);
}

inline std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

// Layout: <root>/<first-2-hex>/<key>.json. A stored entry whose recorded
// key disagrees with its file name (or that fails to parse) counts as a
// miss and gets overwritten on the next put.
class DiskCache {
 public:
  explicit DiskCache(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const { return root_; }

  fs::path path_for(const std::string& key) const {
    return root_ / key.substr(0, 2) / (key + ".json");
  }

  std::optional<nlohmann::json> get(const std::string& key) const {
    auto bytes = read_file(path_for(key));
    if (!bytes) return std::nullopt;
    nlohmann::json j = nlohmann::json::parse(*bytes, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    if (j.value("key", std::string{}) != key) return std::nullopt;
    return j;
  }

  void put(const std::string& key, nlohmann::json value) const {
    value["key"] = key;
    atomic_write(path_for(key), value.dump());
  }

 private:
  fs::path root_;
};

inline nlohmann::json chat_request_json(const ChatRequest& request) {
  nlohmann::json j;
  j["model"] = request.model;
  j["messages"] = nlohmann::json::array();
  for (const auto& m : request.messages)
    j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  for (const auto& [k, v] : request.params) j[k] = v;
  return j;
}

// Key covers the endpoint kind, the model, and the full request body, so a
// changed temperature or message never aliases an old entry.
inline std::string chat_cache_key(const ChatRequest& request) {
  return crypto::sha256_hex("chat\n" + chat_request_json(request).dump());
}

struct RetryPolicy {
  int attempts = 3;
  int base_delay_ms = 100;
  double multiplier = 2.0;
};

struct CachedCallStats {
  int endpoint_calls = 0;
  int cache_hits = 0;
};

// Serves a chat call from the cache when possible; otherwise calls the
// endpoint with bounded exponential backoff and stores the reply.
inline ChatResponse cached_chat_call(const ChatRequest& request, const DiskCache* cache,
                                     ChatClient& endpoint, const RetryPolicy& policy = {},
                                     CachedCallStats* stats = nullptr,
                                     const std::string& created_at = "") {
  const std::string key = cache ? chat_cache_key(request) : std::string{};
  if (cache) {
    if (auto hit = cache->get(key)) {
      if (stats) ++stats->cache_hits;
      ChatResponse resp;
      resp.content = hit->value("response", nlohmann::json::object()).value("content", "");
      resp.reasoning = hit->value("response", nlohmann::json::object()).value("reasoning", "");
      return resp;
    }
  }
  int delay = policy.base_delay_ms;
  for (int attempt = 1;; ++attempt) {
    try {
      if (stats) ++stats->endpoint_calls;
      ChatResponse resp = endpoint.complete(request);
      if (cache) {
        nlohmann::json entry;
        entry["request"] = chat_request_json(request);
        entry["response"] = {{"content", resp.content}, {"reasoning", resp.reasoning}};
        entry["created_at"] = created_at;
        cache->put(key, std::move(entry));
      }
      return resp;
    } catch (const EndpointError&) {
      if (attempt >= policy.attempts) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay = static_cast<int>(delay * policy.multiplier);
    }
  }
}

}  // namespace supernova::cache
