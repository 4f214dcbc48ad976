#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "supernova/cache.hpp"
#include "supernova/sha256.hpp"

namespace supernova::run {

namespace fs = std::filesystem;

inline std::string hash_file(const fs::path& path) {
  auto bytes = cache::read_file(path);
  if (!bytes) return {};
  return crypto::sha256_hex(*bytes);
}

// Ties every emitted artifact to the inputs and config that produced it.
// Resumability is content-hash based: an item is skipped only when its
// recorded input hash matches and the output bytes still hash as recorded.
class RunManifest {
 public:
  RunManifest() {
    data_["run_id"] = "";
    data_["config_hash"] = "";
    data_["stages"] = nlohmann::json::array();
    data_["items"] = nlohmann::json::object();
    data_["artifacts"] = nlohmann::json::object();
    data_["flags"] = nlohmann::json::array();
  }

  static RunManifest load_or_create(const fs::path& path, const std::string& run_id,
                                    const std::string& config_hash) {
    RunManifest m;
    if (auto bytes = cache::read_file(path)) {
      nlohmann::json j = nlohmann::json::parse(*bytes, nullptr, false);
      if (!j.is_discarded()) m.data_ = std::move(j);
    }
    if (m.data_.value("run_id", std::string{}).empty()) m.data_["run_id"] = run_id;
    m.data_["config_hash"] = config_hash;
    m.path_ = path;
    return m;
  }

  void save() const {
    if (!path_.empty()) cache::atomic_write(path_, data_.dump(2) + "\n");
  }

  bool should_skip(const std::string& item_key, const std::string& input_hash,
                   const fs::path& output_path) const {
    const auto& items = data_["items"];
    if (!items.contains(item_key)) return false;
    const auto& item = items[item_key];
    if (item.value("input_hash", std::string{}) != input_hash) return false;
    std::string recorded = item.value("output_hash", std::string{});
    if (recorded.empty()) return false;
    return hash_file(output_path) == recorded;
  }

  void record_item(const std::string& item_key, const std::string& input_hash,
                   const fs::path& output_path, const nlohmann::json& extra = {}) {
    nlohmann::json item;
    item["input_hash"] = input_hash;
    item["output"] = output_path.string();
    item["output_hash"] = hash_file(output_path);
    if (extra.is_object())
      for (const auto& [k, v] : extra.items()) item[k] = v;
    data_["items"][item_key] = item;
    data_["artifacts"][output_path.string()] = item["output_hash"];
  }

  void record_artifact(const fs::path& path) {
    data_["artifacts"][path.string()] = hash_file(path);
  }

  void record_stage(const std::string& stage, int64_t duration_ms, int items_done,
                    int items_skipped) {
    nlohmann::json s;
    s["stage"] = stage;
    s["duration_ms"] = duration_ms;
    s["items_done"] = items_done;
    s["items_skipped"] = items_skipped;
    data_["stages"].push_back(std::move(s));
  }

  void add_flag(const std::string& flag) { data_["flags"].push_back(flag); }

  void record_decoding(const std::map<std::string, double>& params) {
    data_["decoding"] = nlohmann::json::object();
    for (const auto& [k, v] : params) data_["decoding"][k] = v;
  }

  const nlohmann::json& json() const { return data_; }

 private:
  nlohmann::json data_;
  fs::path path_;
};

}  // namespace supernova::run
