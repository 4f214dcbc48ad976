#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/markup.hpp"
#include "supernova/prompts.hpp"
#include "supernova/sha256.hpp"
#include "supernova/strings.hpp"
#include "supernova/wiki.hpp"

namespace supernova::corpus {

enum class CategoryProfile { biography, historical_event, news_event };

enum class Category { biography, historical_event, news_event, scientific_discovery, movie_script };

// Assessment ladder, ascending.
enum class QualityClass { Stub, Start, C, B, GA, FA };

enum class FilterStage { heuristic, metric, semantic };

inline const char* to_string(Category c) {
  switch (c) {
    case Category::biography: return "biography";
    case Category::historical_event: return "historical_event";
    case Category::news_event: return "news_event";
    case Category::scientific_discovery: return "scientific_discovery";
    case Category::movie_script: return "movie_script";
  }
  return "?";
}

inline std::optional<Category> parse_category(std::string_view s) {
  if (s == "biography") return Category::biography;
  if (s == "historical_event") return Category::historical_event;
  if (s == "news_event") return Category::news_event;
  if (s == "scientific_discovery") return Category::scientific_discovery;
  if (s == "movie_script") return Category::movie_script;
  return std::nullopt;
}

inline const char* to_string(CategoryProfile p) {
  switch (p) {
    case CategoryProfile::biography: return "biography";
    case CategoryProfile::historical_event: return "historical_event";
    case CategoryProfile::news_event: return "news_event";
  }
  return "?";
}

inline const char* to_string(FilterStage s) {
  switch (s) {
    case FilterStage::heuristic: return "heuristic";
    case FilterStage::metric: return "metric";
    case FilterStage::semantic: return "semantic";
  }
  return "?";
}

inline std::optional<QualityClass> parse_quality_class(std::string_view s) {
  if (s == "Stub") return QualityClass::Stub;
  if (s == "Start") return QualityClass::Start;
  if (s == "C") return QualityClass::C;
  if (s == "B") return QualityClass::B;
  if (s == "GA") return QualityClass::GA;
  if (s == "FA") return QualityClass::FA;
  return std::nullopt;
}

inline const char* to_string(QualityClass q) {
  switch (q) {
    case QualityClass::Stub: return "Stub";
    case QualityClass::Start: return "Start";
    case QualityClass::C: return "C";
    case QualityClass::B: return "B";
    case QualityClass::GA: return "GA";
    case QualityClass::FA: return "FA";
  }
  return "?";
}

struct ArticleCandidate {
  std::string title;
  CategoryProfile profile = CategoryProfile::biography;
  std::string raw_wikitext;
  std::string stripped_text;
  int64_t word_count = 0;
  int64_t page_views = 0;
  std::optional<QualityClass> quality_class;
  std::optional<int> extracted_year;
  std::optional<int64_t> edit_count;
  bool is_seed = false;
  bool metrics_loaded = false;
  bool unbalanced_markup = false;
};

struct FilterVerdict {
  bool accepted = false;
  FilterStage stage = FilterStage::heuristic;
  std::string reason;
};

struct ArticleRecord {
  std::string id;
  Category category = Category::biography;
  std::string title;
  std::string text;
  std::string source;
  nlohmann::json metadata = nlohmann::json::object();
  std::string accepted_at;
};

struct NobelPrizeRecord {
  int year = 0;
  std::string category;  // "phy", "che", "med"
  std::string discovery;
  std::vector<std::string> laureates;
};

// Every acceptance threshold in one place. Comparisons keep the exact
// strictness each bound was stated with: biography views and validator
// confidence are strict, word floors and the event view floor are not,
// and the year windows exclude their boundary year.
struct Thresholds {
  int64_t bio_min_words = 3000;        // accept when word_count >= bio_min_words
  int64_t bio_views_above = 50000;     // accept when page_views > bio_views_above
  int64_t event_min_words = 500;       // accept when word_count >= event_min_words
  int64_t event_min_views = 5000;      // accept when page_views >= event_min_views
  QualityClass event_min_quality = QualityClass::B;  // accept when class >= B
  int historical_year_below = 2000;    // accept when year < historical_year_below
  int news_year_above = 2000;          // accept when year > news_year_above
  double validator_confidence_above = 0.9;  // accept when confidence > this
  int64_t validator_excerpt_tokens = 1500;
};

// ---------------------------------------------------------------------------
// Heuristic stage

inline bool is_year_only_title(std::string_view title) {
  std::string t = str::trim(title);
  if (t.empty() || t.size() > 4) return false;
  return std::all_of(t.begin(), t.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

inline FilterVerdict apply_heuristic_filters(const ArticleCandidate& candidate) {
  const std::string title = str::trim(candidate.title);
  const std::string lower = str::to_lower(title);
  if (is_year_only_title(title)) return {false, FilterStage::heuristic, "year-only"};
  if (str::starts_with(lower, "list of") || str::starts_with(lower, "lists of"))
    return {false, FilterStage::heuristic, "list page"};
  const std::string lower_text = str::to_lower(candidate.raw_wikitext);
  if (str::contains(lower, "(disambiguation)") || str::contains(lower_text, "{{disambiguation") ||
      str::contains(lower_text, "{{disambig") || str::contains(lower_text, "{{dab}}"))
    return {false, FilterStage::heuristic, "disambiguation"};
  if (str::contains(lower, "slogan"))
    return {false, FilterStage::heuristic, "slogan page"};
  return {true, FilterStage::heuristic, ""};
}

// ---------------------------------------------------------------------------
// Metric stage

inline std::optional<int> first_year_number(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      size_t len = j - i;
      bool boundary_ok = (i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1]))) &&
                         (j == s.size() || !std::isalnum(static_cast<unsigned char>(s[j])));
      if (boundary_ok && (len == 3 || len == 4))
        return std::stoi(std::string(s.substr(i, len)));
      i = j;
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

// Title first, then infobox-style date/year parameters.
inline std::optional<int> extract_year(std::string_view title, std::string_view wikitext) {
  if (auto y = first_year_number(title)) return y;
  const std::string lower = str::to_lower(wikitext);
  for (std::string_view key : {"date", "year"}) {
    size_t pos = 0;
    while ((pos = lower.find(key, pos)) != std::string::npos) {
      size_t eq = pos + key.size();
      while (eq < lower.size() && (lower[eq] == ' ' || lower[eq] == '\t')) ++eq;
      if (eq < lower.size() && lower[eq] == '=') {
        size_t end = lower.find_first_of("|\n}", eq);
        if (end == std::string::npos) end = lower.size();
        if (auto y = first_year_number(std::string_view(wikitext).substr(eq + 1, end - eq - 1)))
          return y;
      }
      pos += key.size();
    }
  }
  return std::nullopt;
}

inline FilterVerdict apply_metric_filters(const ArticleCandidate& c, const Thresholds& t) {
  if (!c.metrics_loaded) return {false, FilterStage::metric, "metric unavailable"};
  if (c.profile == CategoryProfile::biography) {
    if (c.word_count < t.bio_min_words) return {false, FilterStage::metric, "below word floor"};
    if (!(c.page_views > t.bio_views_above))
      return {false, FilterStage::metric, "below view floor"};
    return {true, FilterStage::metric, ""};
  }
  if (c.word_count < t.event_min_words) return {false, FilterStage::metric, "below word floor"};
  if (c.page_views < t.event_min_views) return {false, FilterStage::metric, "below view floor"};
  if (!c.quality_class) return {false, FilterStage::metric, "metric unavailable"};
  if (*c.quality_class < t.event_min_quality)
    return {false, FilterStage::metric, "quality class below threshold"};
  if (!c.extracted_year) return {false, FilterStage::metric, "metric unavailable"};
  const int year = *c.extracted_year;
  const bool in_window = c.profile == CategoryProfile::historical_event
                             ? year < t.historical_year_below
                             : year > t.news_year_above;
  if (!in_window) return {false, FilterStage::metric, "year outside window"};
  return {true, FilterStage::metric, ""};
}

// ---------------------------------------------------------------------------
// Semantic stage

struct ValidatorReply {
  bool is_event = false;
  double confidence = -1.0;
};

inline std::optional<ValidatorReply> parse_validator_reply(std::string_view reply) {
  ValidatorReply out;
  bool have_verdict = false, have_conf = false;
  const std::string lower = str::to_lower(reply);
  for (const auto& line : str::split_lines(lower)) {
    std::string t = str::trim(line);
    if (str::starts_with(t, "verdict")) {
      out.is_event = !str::contains(t, "not_event") && !str::contains(t, "not event") &&
                     str::contains(t, "event");
      have_verdict = true;
    } else if (str::starts_with(t, "confidence")) {
      size_t pos = t.find_first_of("0123456789.");
      if (pos != std::string::npos) {
        try {
          out.confidence = std::stod(t.substr(pos));
          have_conf = true;
        } catch (const std::exception&) {
        }
      }
    }
  }
  if (!have_verdict) {  // tolerate free-form "event (0.95)" style replies
    if (str::contains(lower, "not_event") || str::contains(lower, "not an event")) {
      out.is_event = false;
      have_verdict = true;
    } else if (str::contains(lower, "event")) {
      out.is_event = true;
      have_verdict = true;
    }
  }
  if (!have_conf) {
    for (const auto& tok : str::tokenize(lower)) {
      std::string c = tok;
      while (!c.empty() && (c.back() == ')' || c.back() == ',' || c.back() == '.')) c.pop_back();
      while (!c.empty() && c.front() == '(') c.erase(c.begin());
      if (c.empty()) continue;
      if (c.find_first_not_of("0123456789.") != std::string::npos) continue;
      if (c.find('.') == std::string::npos && c != "0" && c != "1") continue;
      try {
        out.confidence = std::stod(c);
        have_conf = true;
        break;
      } catch (const std::exception&) {
      }
    }
  }
  if (!have_verdict || !have_conf) return std::nullopt;
  if (out.confidence < 0.0 || out.confidence > 1.0) return std::nullopt;
  return out;
}

struct SemanticOutcome {
  FilterVerdict verdict;
  double confidence = -1.0;
  bool is_event = false;
  int attempts = 0;
};

// One retry on an unparseable reply, then reject. Seed articles skip the
// model entirely.
inline SemanticOutcome validate_event_semantics(const std::string& text, bool is_seed,
                                                ChatClient& llm, const std::string& model,
                                                const Thresholds& t) {
  SemanticOutcome out;
  if (is_seed) {
    out.verdict = {true, FilterStage::semantic, "seed auto-accept"};
    return out;
  }
  if (str::trim(text).empty()) throw PreconditionError("semantic validation: empty text");
  auto tokens = str::tokenize(text);
  if (static_cast<int64_t>(tokens.size()) > t.validator_excerpt_tokens)
    tokens.resize(static_cast<size_t>(t.validator_excerpt_tokens));
  const std::string prompt = prompts::render_validator_prompt(str::join(tokens, " "));
  for (int attempt = 0; attempt < 2; ++attempt) {
    ++out.attempts;
    ChatResponse resp = llm.complete(ChatRequest(model, prompt));
    if (auto parsed = parse_validator_reply(resp.content)) {
      out.confidence = parsed->confidence;
      out.is_event = parsed->is_event;
      if (!parsed->is_event) {
        out.verdict = {false, FilterStage::semantic, "not a discrete event"};
      } else if (parsed->confidence > t.validator_confidence_above) {
        out.verdict = {true, FilterStage::semantic, ""};
      } else {
        out.verdict = {false, FilterStage::semantic, "below confidence threshold"};
      }
      return out;
    }
  }
  out.verdict = {false, FilterStage::semantic, "validator unparseable"};
  return out;
}

// ---------------------------------------------------------------------------
// Category walk

struct WalkResult {
  std::vector<ArticleCandidate> candidates;
  std::vector<std::string> warnings;
};

inline WalkResult walk_categories(const std::vector<std::string>& seeds, int depth,
                                  wiki::WikiClient& client, CategoryProfile profile,
                                  const std::set<std::string>& seed_articles = {}) {
  if (seeds.empty()) throw PreconditionError("walk_categories: no seed categories");
  if (depth < 0) throw PreconditionError("walk_categories: negative depth");
  WalkResult out;
  std::set<std::string> seen_titles;
  std::set<std::string> seen_categories;
  std::deque<std::pair<std::string, int>> queue;
  for (const auto& s : seeds)
    if (seen_categories.insert(s).second) queue.emplace_back(s, 0);
  while (!queue.empty()) {
    auto [cat, level] = queue.front();
    queue.pop_front();
    wiki::CategoryListing listing;
    try {
      listing = client.category_members(cat);
    } catch (const wiki::UnknownCategory& e) {
      out.warnings.push_back(e.what());
      continue;
    }
    for (const auto& title : listing.pages) {
      if (!seen_titles.insert(title).second) continue;
      ArticleCandidate c;
      c.title = title;
      c.profile = profile;
      c.is_seed = seed_articles.count(title) > 0;
      out.candidates.push_back(std::move(c));
    }
    if (level < depth) {
      for (const auto& sub : listing.subcategories)
        if (seen_categories.insert(sub).second) queue.emplace_back(sub, level + 1);
    }
  }
  return out;
}

// Fills wikitext, stripped text, and metric fields from the wiki handle.
inline void hydrate_candidate(ArticleCandidate& c, wiki::WikiClient& client) {
  c.raw_wikitext = client.page_wikitext(c.title);
  StripResult stripped = strip_markup(c.raw_wikitext);
  c.stripped_text = stripped.text;
  c.unbalanced_markup = stripped.unbalanced;
  c.word_count = static_cast<int64_t>(str::word_count(c.stripped_text));
  wiki::PageMetadata md = client.page_metadata(c.title);
  c.page_views = md.page_views.value_or(0);
  if (md.quality_class) c.quality_class = parse_quality_class(*md.quality_class);
  c.edit_count = md.edit_count;
  c.extracted_year = extract_year(c.title, c.raw_wikitext);
  c.metrics_loaded = md.page_views.has_value();
}

// ---------------------------------------------------------------------------
// Records

inline std::string article_id(Category category, std::string_view title, std::string_view text) {
  std::string key;
  key += to_string(category);
  key += '\n';
  key += title;
  key += '\n';
  key += text;
  return crypto::content_id(key);
}

inline ArticleRecord make_record(const ArticleCandidate& c, Category category,
                                 const std::string& source, const SemanticOutcome* semantic,
                                 const std::string& accepted_at) {
  ArticleRecord r;
  r.category = category;
  r.title = c.title;
  r.text = c.stripped_text;
  r.id = article_id(category, r.title, r.text);
  r.source = source;
  r.accepted_at = accepted_at;
  r.metadata["word_count"] = c.word_count;
  r.metadata["page_views"] = c.page_views;
  if (c.quality_class) r.metadata["quality_class"] = to_string(*c.quality_class);
  if (c.extracted_year) r.metadata["year"] = *c.extracted_year;
  if (c.edit_count) r.metadata["edit_count"] = *c.edit_count;
  r.metadata["is_seed"] = c.is_seed;
  r.metadata["manual_review"] = "unreviewed";  // human verification happens outside the pipeline
  if (c.unbalanced_markup) r.metadata["unbalanced_markup"] = true;
  if (semantic && semantic->confidence >= 0.0) {
    r.metadata["validator_confidence"] = semantic->confidence;
    r.metadata["validator_is_event"] = semantic->is_event;
  }
  if (semantic && semantic->verdict.reason == "seed auto-accept")
    r.metadata["validator_seed_bypass"] = true;
  return r;
}

// Re-runs the filter cascade against the stored text and metadata.
inline bool replay_acceptance(const ArticleRecord& r, const Thresholds& t) {
  if (r.category == Category::scientific_discovery || r.category == Category::movie_script)
    return !r.text.empty();  // generated/imported records carry no wiki filters
  ArticleCandidate c;
  c.title = r.title;
  c.stripped_text = r.text;
  c.profile = r.category == Category::biography ? CategoryProfile::biography
              : r.category == Category::historical_event ? CategoryProfile::historical_event
                                                         : CategoryProfile::news_event;
  c.word_count = static_cast<int64_t>(str::word_count(r.text));
  if (r.metadata.contains("word_count") && r.metadata["word_count"].get<int64_t>() != c.word_count)
    return false;
  c.page_views = r.metadata.value("page_views", int64_t{0});
  c.metrics_loaded = r.metadata.contains("page_views");
  if (r.metadata.contains("quality_class"))
    c.quality_class = parse_quality_class(r.metadata["quality_class"].get<std::string>());
  if (r.metadata.contains("year")) c.extracted_year = r.metadata["year"].get<int>();
  c.is_seed = r.metadata.value("is_seed", false);
  if (!apply_heuristic_filters(c).accepted) return false;
  if (!apply_metric_filters(c, t).accepted) return false;
  if (c.profile == CategoryProfile::biography) return true;
  if (c.is_seed || r.metadata.value("validator_seed_bypass", false)) return true;
  if (!r.metadata.contains("validator_confidence")) return false;
  return r.metadata.value("validator_is_event", false) &&
         r.metadata["validator_confidence"].get<double>() > t.validator_confidence_above;
}

// ---------------------------------------------------------------------------
// JSONL store

inline nlohmann::json record_to_json(const ArticleRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["category"] = to_string(r.category);
  j["title"] = r.title;
  j["text"] = r.text;
  j["source"] = r.source;
  j["metadata"] = r.metadata;
  j["accepted_at"] = r.accepted_at;
  return j;
}

inline ArticleRecord record_from_json(const nlohmann::json& j) {
  ArticleRecord r;
  r.id = j.at("id").get<std::string>();
  auto cat = parse_category(j.at("category").get<std::string>());
  if (!cat) throw ConfigError("bad category in record: " + j.at("category").get<std::string>());
  r.category = *cat;
  r.title = j.at("title").get<std::string>();
  r.text = j.at("text").get<std::string>();
  r.source = j.value("source", std::string{});
  r.metadata = j.value("metadata", nlohmann::json::object());
  r.accepted_at = j.value("accepted_at", std::string{});
  return r;
}

inline std::vector<ArticleRecord> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StageOrderError("corpus store not found: " + path);
  std::vector<ArticleRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (str::trim(line).empty()) continue;
    out.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace supernova::corpus
