#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "supernova/corpus.hpp"
#include "supernova/errors.hpp"
#include "supernova/sha256.hpp"
#include "supernova/strings.hpp"

namespace supernova::config {

// Flat key/value view of a TOML-style file: sections prefix their keys
// ("[endpoints]" + "chat_url = x" becomes "endpoints.chat_url").
inline std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not readable: " + path);
  std::map<std::string, std::string> out;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = str::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = str::trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = str::trim(t.substr(0, eq));
    std::string value = str::trim(t.substr(eq + 1));
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\'')))
      value = value.substr(1, value.size() - 2);
    if (!section.empty()) key = section + "." + key;
    out[key] = value;
  }
  return out;
}

struct PipelineConfig {
  // endpoints
  std::string chat_url;
  std::string embed_url;
  std::string api_key;
  std::string chat_model = "target-model";
  std::string embed_model = "nomic-embed-text-v1";
  std::string judge_model = "judge-model";
  std::string assist_model;     // empty: no assist classification
  std::string validator_model = "validator-model";
  std::vector<std::string> target_models;  // extraction targets; falls back to chat_model
  std::map<std::string, double> decoding;  // passed through to chat requests
  std::string wiki_api_url = "https://en.wikipedia.org/w/api.php";
  std::string wiki_pageviews_template;  // GET template with {title}
  std::string wiki_quality_template;    // GET template with {title}
  std::string nobel_api_url = "https://api.nobelprize.org/2.1";

  // collection thresholds
  corpus::Thresholds thresholds;
  std::map<std::string, int> corpus_targets = {
      {"biography", 150}, {"historical_event", 150}, {"news_event", 150},
      {"scientific_discovery", 25}};

  // chunking and retrieval
  int chunk_size = 1000;
  int chunk_overlap = 100;
  int n_rewrites = 3;
  int top_k = 4;
  int64_t context_token_budget = 6000;
  bool corpus_wide_retrieval = false;
  bool trait_background_points = false;  // plot raw trait vectors behind models

  // execution
  int retries = 2;
  int concurrency = 4;
  int politeness_delay_ms = 250;
  std::string cache_dir = "cache";
  std::string out_dir = "out";
  uint64_t seed = 42;
  bool offline = false;
  bool deterministic_timestamps = false;  // forced on when offline

  // offline fixtures / mock backends
  std::string wiki_fixture;
  std::string nobel_fixture;
  std::string chat_script;
  int mock_embed_dim = 16;

  // resources
  std::string codebook_path = "codebook/labels.tsv";
  std::string question_template = "What are the 5 most critical events in {title}?";

  // raw view, for the snapshot hash
  std::map<std::string, std::string> raw;

  std::string question_for(const std::string& title) const {
    std::string q = question_template;
    size_t pos = q.find("{title}");
    if (pos != std::string::npos) q.replace(pos, 7, title);
    return q;
  }

  bool timestamps_fixed() const { return offline || deterministic_timestamps; }

  std::string snapshot_hash() const {
    std::string blob;
    for (const auto& [k, v] : raw) blob += k + "=" + v + "\n";
    return crypto::sha256_hex(blob);
  }

  void validate() const {
    if (chunk_size <= 0) throw ConfigError("chunk_size must be positive");
    if (chunk_overlap < 0 || chunk_overlap >= chunk_size)
      throw ConfigError("chunk_overlap must satisfy 0 <= overlap < chunk_size");
    if (retries < 0 || retries > 5) throw ConfigError("retries must be in 0..5");
    if (concurrency < 1) throw ConfigError("concurrency must be at least 1");
    if (n_rewrites < 1) throw ConfigError("n_rewrites must be at least 1");
    if (top_k < 1) throw ConfigError("top_k must be at least 1");
    if (thresholds.bio_min_words <= 0 || thresholds.event_min_words <= 0 ||
        thresholds.bio_views_above <= 0 || thresholds.event_min_views <= 0)
      throw ConfigError("thresholds must be positive");
    if (thresholds.validator_confidence_above < 0 || thresholds.validator_confidence_above > 1)
      throw ConfigError("validator confidence threshold must lie in [0,1]");
    if (mock_embed_dim < 2) throw ConfigError("mock_embed_dim must be at least 2");
  }
};

namespace detail {

inline int64_t to_int(const std::string& key, const std::string& v) {
  try {
    return std::stoll(v);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not an integer: " + v);
  }
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not a number: " + v);
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  std::string t = str::to_lower(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("config key " + key + " is not a boolean: " + v);
}

inline std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      std::string t = str::trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  std::string t = str::trim(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

}  // namespace detail

inline PipelineConfig config_from_map(std::map<std::string, std::string> kv) {
  PipelineConfig c;
  c.raw = kv;
  auto take_str = [&](const char* key, std::string& field) {
    if (auto it = kv.find(key); it != kv.end()) field = it->second;
  };
  auto take_int = [&](const char* key, auto& field) {
    if (auto it = kv.find(key); it != kv.end())
      field = static_cast<std::decay_t<decltype(field)>>(detail::to_int(key, it->second));
  };
  auto take_bool = [&](const char* key, bool& field) {
    if (auto it = kv.find(key); it != kv.end()) field = detail::to_bool(key, it->second);
  };

  take_str("endpoints.chat_url", c.chat_url);
  take_str("endpoints.embed_url", c.embed_url);
  take_str("endpoints.api_key", c.api_key);
  take_str("endpoints.chat_model", c.chat_model);
  take_str("endpoints.embed_model", c.embed_model);
  take_str("endpoints.judge_model", c.judge_model);
  take_str("endpoints.assist_model", c.assist_model);
  take_str("endpoints.validator_model", c.validator_model);
  if (auto it = kv.find("endpoints.target_models"); it != kv.end())
    c.target_models = detail::to_list(it->second);
  take_str("endpoints.wiki_api_url", c.wiki_api_url);
  take_str("endpoints.wiki_pageviews_template", c.wiki_pageviews_template);
  take_str("endpoints.wiki_quality_template", c.wiki_quality_template);
  take_str("endpoints.nobel_api_url", c.nobel_api_url);

  take_int("thresholds.bio_min_words", c.thresholds.bio_min_words);
  take_int("thresholds.bio_views_above", c.thresholds.bio_views_above);
  take_int("thresholds.event_min_words", c.thresholds.event_min_words);
  take_int("thresholds.event_min_views", c.thresholds.event_min_views);
  take_int("thresholds.historical_year_below", c.thresholds.historical_year_below);
  take_int("thresholds.news_year_above", c.thresholds.news_year_above);
  take_int("thresholds.validator_excerpt_tokens", c.thresholds.validator_excerpt_tokens);
  if (auto it = kv.find("thresholds.validator_confidence_above"); it != kv.end())
    c.thresholds.validator_confidence_above = detail::to_double(it->first, it->second);
  if (auto it = kv.find("thresholds.event_min_quality"); it != kv.end()) {
    auto q = corpus::parse_quality_class(it->second);
    if (!q) throw ConfigError("unknown quality class: " + it->second);
    c.thresholds.event_min_quality = *q;
  }
  for (const auto& cat : {"biography", "historical_event", "news_event", "scientific_discovery"})
    if (auto it = kv.find(std::string("corpus.target_") + cat); it != kv.end())
      c.corpus_targets[cat] = static_cast<int>(detail::to_int(it->first, it->second));

  take_int("pipeline.chunk_size", c.chunk_size);
  take_int("pipeline.chunk_overlap", c.chunk_overlap);
  take_int("pipeline.n_rewrites", c.n_rewrites);
  take_int("pipeline.top_k", c.top_k);
  take_int("pipeline.context_token_budget", c.context_token_budget);
  take_bool("pipeline.corpus_wide_retrieval", c.corpus_wide_retrieval);
  take_bool("analysis.trait_background_points", c.trait_background_points);
  take_int("pipeline.retries", c.retries);

  take_int("run.concurrency", c.concurrency);
  take_int("run.politeness_delay_ms", c.politeness_delay_ms);
  take_str("run.cache_dir", c.cache_dir);
  take_str("run.out_dir", c.out_dir);
  take_int("run.seed", c.seed);
  take_bool("run.offline", c.offline);
  take_bool("run.deterministic_timestamps", c.deterministic_timestamps);

  take_str("offline.wiki_fixture", c.wiki_fixture);
  take_str("offline.nobel_fixture", c.nobel_fixture);
  take_str("offline.chat_script", c.chat_script);
  take_int("offline.mock_embed_dim", c.mock_embed_dim);

  take_str("resources.codebook_path", c.codebook_path);
  take_str("resources.question_template", c.question_template);

  for (const auto& [k, v] : kv)
    if (str::starts_with(k, "decoding."))
      c.decoding[k.substr(9)] = detail::to_double(k, v);

  // environment overrides
  if (const char* v = std::getenv("SUPERNOVA_API_KEY"); v && *v) c.api_key = v;
  if (const char* v = std::getenv("SUPERNOVA_CHAT_URL"); v && *v) c.chat_url = v;
  if (const char* v = std::getenv("SUPERNOVA_EMBED_URL"); v && *v) c.embed_url = v;

  c.validate();
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  return config_from_map(parse_kv_file(path));
}

}  // namespace supernova::config
