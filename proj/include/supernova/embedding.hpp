#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/sha256.hpp"
#include "supernova/strings.hpp"

namespace supernova::pipeline {

// Content-hash cache in front of an embedding endpoint. Repeated texts hit
// the cache; each endpoint batch carries only the misses, in first-seen
// order.
class CachingEmbedder {
 public:
  CachingEmbedder(EmbeddingClientPtr client, std::string model)
      : client_(std::move(client)), model_(std::move(model)) {}

  std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    for (const auto& t : texts)
      if (t.empty()) throw PreconditionError("embed: empty string in batch");

    std::vector<std::string> keys(texts.size());
    for (size_t i = 0; i < texts.size(); ++i) keys[i] = crypto::sha256_hex(texts[i]);

    std::vector<std::string> miss_texts;
    std::vector<std::string> miss_keys;
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (size_t i = 0; i < texts.size(); ++i) {
        if (!cache_.count(keys[i]) &&
            std::find(miss_keys.begin(), miss_keys.end(), keys[i]) == miss_keys.end()) {
          miss_keys.push_back(keys[i]);
          miss_texts.push_back(texts[i]);
        }
      }
    }
    if (!miss_texts.empty()) {
      auto fresh = client_->embed(model_, miss_texts);
      if (fresh.size() != miss_texts.size())
        throw ConfigError("embedding endpoint returned a mismatched batch");
      std::lock_guard<std::mutex> lock(mu_);
      for (size_t i = 0; i < fresh.size(); ++i) {
        if (fresh[i].empty()) throw ConfigError("embedding endpoint returned an empty vector");
        if (dim_ == 0) dim_ = static_cast<int>(fresh[i].size());
        if (static_cast<int>(fresh[i].size()) != dim_)
          throw ConfigError("embedding dimension changed within one index");
        for (float x : fresh[i])
          if (!std::isfinite(x)) throw ConfigError("embedding endpoint returned non-finite values");
        cache_[miss_keys[i]] = std::move(fresh[i]);
      }
    }
    std::vector<std::vector<float>> out(texts.size());
    std::lock_guard<std::mutex> lock(mu_);
    for (size_t i = 0; i < texts.size(); ++i) out[i] = cache_.at(keys[i]);
    return out;
  }

  int dim() const {
    std::lock_guard<std::mutex> lock(mu_);
    return dim_;
  }
  const std::string& model() const { return model_; }

 private:
  EmbeddingClientPtr client_;
  std::string model_;
  mutable std::mutex mu_;
  std::map<std::string, std::vector<float>> cache_;
  int dim_ = 0;
};

}  // namespace supernova::pipeline
