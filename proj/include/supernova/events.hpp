#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "supernova/corpus.hpp"
#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/prompts.hpp"
#include "supernova/retrieval.hpp"
#include "supernova/strings.hpp"

namespace supernova::events {

enum class Mode { general, scientific };

inline const char* to_string(Mode m) { return m == Mode::general ? "general" : "scientific"; }

struct CriticalEvent {
  int rank = 0;  // 1..5
  std::string title;
  std::string summary;

  friend bool operator==(const CriticalEvent& a, const CriticalEvent& b) {
    return a.rank == b.rank && a.title == b.title && a.summary == b.summary;
  }
};

struct RankedEventList {
  std::string model_id;
  std::string article_id;
  std::vector<CriticalEvent> events;  // exactly five, ordered by rank
  std::string most_critical_rationale;
  std::optional<std::string> reflective_label;  // scientific mode only
  std::string raw_response;
  std::optional<std::string> reasoning_trace;
};

enum class MalformedKind { count, ranks, label };

struct MalformedResponse {
  MalformedKind kind = MalformedKind::count;
  int count = 0;        // items seen, for kind == count
  std::string detail;
};

struct ParseResult {
  std::optional<RankedEventList> list;
  std::optional<MalformedResponse> error;
  bool ok() const { return list.has_value(); }
};

namespace detail {

struct ItemLine {
  size_t line_index = 0;
  int rank = 0;
  std::string content;
};

// Item lines look like "3. text", "3) text", "**3.** text", "3.text".
inline std::optional<ItemLine> match_item(std::string_view line) {
  size_t i = 0;
  while (i < line.size() && str::is_ascii_space(line[i])) ++i;
  while (i + 1 < line.size() && line[i] == '*' && line[i + 1] == '*') i += 2;
  while (i < line.size() && (line[i] == '*' || str::is_ascii_space(line[i]))) ++i;
  if (i >= line.size() || line[i] < '1' || line[i] > '5') return std::nullopt;
  // multi-digit numbers are prose (years, counts), not ranks
  if (i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))
    return std::nullopt;
  int rank = line[i] - '0';
  ++i;
  while (i < line.size() && str::is_ascii_space(line[i])) ++i;
  if (i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::nullopt;
  ++i;
  std::string content = str::trim(line.substr(i));
  while (!content.empty() && content.front() == '*') content.erase(content.begin());
  while (!content.empty() && content.back() == '*') content.pop_back();
  ItemLine item;
  item.rank = rank;
  item.content = str::trim(content);
  return item;
}

inline std::optional<std::string> match_label_line(std::string_view line) {
  std::string t = str::trim(line);
  while (!t.empty() && t.front() == '*') t.erase(t.begin());
  std::string lower = str::to_lower(t);
  size_t pos = 0;
  if (str::starts_with(lower, "model label")) {
    pos = 11;
  } else if (str::starts_with(lower, "label")) {
    pos = 5;
  } else {
    return std::nullopt;
  }
  while (pos < t.size() && str::is_ascii_space(t[pos])) ++pos;
  if (pos >= t.size() || t[pos] != ':') return std::nullopt;
  std::string value = str::trim(t.substr(pos + 1));
  while (!value.empty() && value.back() == '*') value.pop_back();
  value = str::trim(value);
  if (value.empty()) return std::nullopt;
  return value;
}

// Earliest of " - " (ascii/en/em dash, spaced) or a sentence break.
inline std::pair<std::string, std::string> split_title_summary(const std::string& content) {
  size_t best = std::string::npos;
  size_t skip = 0;
  for (std::string_view dash : {" - ", " \xE2\x80\x93 ", " \xE2\x80\x94 "}) {
    size_t p = content.find(dash);
    if (p != std::string::npos && p < best) {
      best = p;
      skip = dash.size();
    }
  }
  auto abbreviation_before = [&](size_t dot) {
    size_t end = dot;
    size_t begin = end;
    while (begin > 0 && std::isalnum(static_cast<unsigned char>(content[begin - 1]))) --begin;
    std::string word = str::to_lower(content.substr(begin, end - begin));
    if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) return true;
    static const std::set<std::string> common = {"al", "etc", "vs", "cf", "eg", "ie", "dr",
                                                 "mr", "mrs", "ms", "st", "no", "inc", "jr",
                                                 "sr"};
    return common.count(word) > 0;
  };
  for (size_t i = 0; i + 1 < content.size() && i < best; ++i) {
    if ((content[i] == '.' || content[i] == '!' || content[i] == '?') &&
        str::is_ascii_space(content[i + 1])) {
      if (content[i] == '.' && abbreviation_before(i)) continue;
      best = i + 1;
      skip = 1;
      break;
    }
  }
  auto strip_emphasis = [](std::string s) {
    while (!s.empty() && s.front() == '*') s.erase(s.begin());
    while (!s.empty() && s.back() == '*') s.pop_back();
    return str::trim(s);
  };
  if (best == std::string::npos) {
    std::string whole = strip_emphasis(content);
    return {whole, whole};
  }
  std::string title = strip_emphasis(str::trim(content.substr(0, best)));
  std::string summary = strip_emphasis(str::trim(content.substr(best + skip)));
  if (title.empty()) title = summary;
  if (summary.empty()) summary = title;
  return {title, summary};
}

}  // namespace detail

// Total parser: every input yields a value or a typed MalformedResponse.
// The final list in the reply wins (step-by-step reasoning above it may
// contain numbered lines of its own).
inline ParseResult parse_ranked_events(const std::string& raw, Mode mode) {
  ParseResult result;
  auto lines = str::split_lines(raw);

  std::vector<detail::ItemLine> items;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (auto item = detail::match_item(lines[i])) {
      item->line_index = i;
      items.push_back(std::move(*item));
    }
  }

  // region of interest: from the last rank-1 item onward
  size_t region_begin = 0;
  for (size_t i = 0; i < items.size(); ++i)
    if (items[i].rank == 1) region_begin = i;
  std::vector<detail::ItemLine> region(items.begin() + static_cast<long>(region_begin),
                                       items.end());

  if (region.size() != 5) {
    result.error = MalformedResponse{MalformedKind::count, static_cast<int>(region.size()),
                                     "expected exactly 5 events"};
    return result;
  }
  std::vector<bool> seen(6, false);
  for (const auto& it : region) {
    if (seen[static_cast<size_t>(it.rank)]) {
      result.error = MalformedResponse{MalformedKind::ranks, 5, "duplicate or missing ranks"};
      return result;
    }
    seen[static_cast<size_t>(it.rank)] = true;
  }

  RankedEventList list;
  list.raw_response = raw;
  for (const auto& it : region) {
    auto [title, summary] = detail::split_title_summary(it.content);
    if (title.empty()) {
      result.error = MalformedResponse{MalformedKind::count, 5, "empty event text"};
      return result;
    }
    list.events.push_back({it.rank, title, summary});
  }
  std::sort(list.events.begin(), list.events.end(),
            [](const CriticalEvent& a, const CriticalEvent& b) { return a.rank < b.rank; });

  // trailing text: justification paragraph, plus the label line when present
  size_t tail_start = region.back().line_index + 1;
  std::vector<std::string> tail;
  std::optional<std::string> label;
  for (size_t i = tail_start; i < lines.size(); ++i) {
    if (auto l = detail::match_label_line(lines[i])) {
      label = std::move(*l);
      continue;
    }
    tail.push_back(lines[i]);
  }
  list.most_critical_rationale = str::trim(str::join(tail, "\n"));

  if (mode == Mode::scientific) {
    if (!label) {
      result.error = MalformedResponse{MalformedKind::label, 5, "missing reflective label"};
      return result;
    }
    list.reflective_label = std::move(label);
  }
  result.list = std::move(list);
  return result;
}

// Canonical reply format; parse_ranked_events(render_canonical_reply(x))
// reproduces x's events, rationale, and label.
inline std::string render_canonical_reply(const RankedEventList& list) {
  std::string out;
  std::vector<CriticalEvent> events = list.events;
  std::sort(events.begin(), events.end(),
            [](const CriticalEvent& a, const CriticalEvent& b) { return a.rank < b.rank; });
  for (const auto& e : events) {
    out += std::to_string(e.rank);
    out += ". ";
    out += e.title;
    if (e.summary != e.title) {
      out += " \xE2\x80\x93 ";  // en dash
      out += e.summary;
    }
    out += "\n";
  }
  if (!list.most_critical_rationale.empty()) {
    out += "\n";
    out += list.most_critical_rationale;
    out += "\n";
  }
  if (list.reflective_label) {
    out += "\nLabel: ";
    out += *list.reflective_label;
    out += "\n";
  }
  return out;
}

struct ExtractionConfig {
  Mode mode = Mode::general;
  int retries = 2;  // additional attempts after the first
  std::map<std::string, double> decoding;
  int n_rewrites = 3;
  int top_k = 4;
  int64_t context_token_budget = 6000;
  int chunk_size = 1000;
  int chunk_overlap = 100;
  bool corpus_wide = false;  // search the whole corpus instead of one article
};

struct ExtractionFailed : std::runtime_error {
  explicit ExtractionFailed(std::string last_raw_reply, int attempts)
      : std::runtime_error("extraction failed after " + std::to_string(attempts) + " attempts"),
        last_raw(std::move(last_raw_reply)),
        attempts(attempts) {}
  std::string last_raw;
  int attempts;
};

struct ExtractionOutcome {
  RankedEventList list;
  int retry_count = 0;
  bool context_truncated = false;
  bool rewrite_fallback = false;
};

inline std::string default_question(const std::string& title) {
  return "What are the 5 most critical events in " + title + "?";
}

namespace detail {

inline std::string format_reminder(Mode mode) {
  std::string r =
      "\n\nReminder: your final answer must contain exactly 5 numbered critical events "
      "(lines starting 1. to 5.), each with a short summary.";
  if (mode == Mode::scientific)
    r += " End with a final line of the form \"Label: <one-or-two-word label>\".";
  return r;
}

}  // namespace detail

// Two-stage extraction for general articles (multi-query retrieval feeding
// the analysis prompt); single-stage full-article prompt for scientific
// discoveries. Malformed replies get up to cfg.retries repair attempts with
// a format reminder appended.
inline ExtractionOutcome extract_events(const corpus::ArticleRecord& article, ChatClient& chat,
                                        const std::string& chat_model,
                                        const ExtractionConfig& cfg,
                                        pipeline::CachingEmbedder* embedder,
                                        const pipeline::VectorIndex* index,
                                        const std::string& question_override = "",
                                        const std::map<std::string, std::string>* article_texts =
                                            nullptr) {
  if (cfg.retries < 0 || cfg.retries > 5)
    throw PreconditionError("extract_events: retries must be in 0..5");
  const std::string question =
      question_override.empty() ? default_question(article.title) : question_override;

  ExtractionOutcome outcome;
  std::string base_prompt;
  if (cfg.mode == Mode::scientific) {
    if (article.category != corpus::Category::scientific_discovery)
      throw PreconditionError("scientific extraction requires a scientific_discovery article");
    base_prompt = prompts::render_scientific_prompt(article.title, article.text);
  } else {
    if (!embedder || !index || index->empty())
      throw PreconditionError("general extraction requires a populated index");
    auto retrieval = pipeline::multi_query_retrieve(question, article.id, cfg.n_rewrites,
                                                    cfg.top_k, chat, chat_model, *embedder,
                                                    *index, !cfg.corpus_wide);
    outcome.rewrite_fallback = retrieval.rewrite_fallback;

    // chunk ordinal -> text comes from re-chunking the stored article text;
    // corpus-wide hits resolve through the supplied text table
    std::map<std::string, std::vector<pipeline::Chunk>> chunk_table;
    auto chunks_for = [&](const std::string& id) -> const std::vector<pipeline::Chunk>& {
      auto it = chunk_table.find(id);
      if (it != chunk_table.end()) return it->second;
      const std::string* text = nullptr;
      if (id == article.id) {
        text = &article.text;
      } else if (article_texts && article_texts->count(id)) {
        text = &article_texts->at(id);
      } else {
        throw PreconditionError("corpus-wide retrieval hit an article with no known text: " + id);
      }
      auto tokens = pipeline::tokenize(*text);
      return chunk_table
          .emplace(id, pipeline::chunk_document(tokens, id, cfg.chunk_size, cfg.chunk_overlap))
          .first->second;
    };
    std::vector<std::string> parts;
    int64_t used_tokens = 0;
    for (const auto& hit : retrieval.hits) {
      const auto& chunk = chunks_for(hit.ref.article_id).at(static_cast<size_t>(hit.ref.ordinal));
      int64_t chunk_tokens = chunk.token_end - chunk.token_start;
      if (used_tokens + chunk_tokens > cfg.context_token_budget && !parts.empty()) {
        outcome.context_truncated = true;
        break;
      }
      if (used_tokens + chunk_tokens > cfg.context_token_budget) {
        outcome.context_truncated = true;
        continue;
      }
      parts.push_back(chunk.text);
      used_tokens += chunk_tokens;
    }
    base_prompt = prompts::render_analysis_prompt(str::join(parts, "\n\n"), question);
  }

  std::string last_raw;
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    std::string prompt = base_prompt;
    if (attempt > 0) prompt += detail::format_reminder(cfg.mode);
    ChatRequest req(chat_model, prompt);
    req.params = cfg.decoding;
    ChatResponse resp = chat.complete(req);
    last_raw = resp.content;
    ParseResult parsed = parse_ranked_events(resp.content, cfg.mode);
    if (parsed.ok()) {
      outcome.list = std::move(*parsed.list);
      outcome.list.model_id = chat_model;
      outcome.list.article_id = article.id;
      if (!resp.reasoning.empty()) outcome.list.reasoning_trace = resp.reasoning;
      outcome.retry_count = attempt;
      return outcome;
    }
  }
  throw ExtractionFailed(last_raw, cfg.retries + 1);
}

// ---------------------------------------------------------------------------
// Store serialization

inline nlohmann::json event_list_to_json(const RankedEventList& l) {
  nlohmann::json j;
  j["model_id"] = l.model_id;
  j["article_id"] = l.article_id;
  j["events"] = nlohmann::json::array();
  for (const auto& e : l.events)
    j["events"].push_back({{"rank", e.rank}, {"title", e.title}, {"summary", e.summary}});
  j["most_critical_rationale"] = l.most_critical_rationale;
  if (l.reflective_label) j["reflective_label"] = *l.reflective_label;
  j["raw_response"] = l.raw_response;
  if (l.reasoning_trace) j["reasoning_trace"] = *l.reasoning_trace;
  return j;
}

inline RankedEventList event_list_from_json(const nlohmann::json& j) {
  RankedEventList l;
  l.model_id = j.value("model_id", std::string{});
  l.article_id = j.value("article_id", std::string{});
  for (const auto& e : j.at("events"))
    l.events.push_back({e.at("rank").get<int>(), e.at("title").get<std::string>(),
                        e.at("summary").get<std::string>()});
  l.most_critical_rationale = j.value("most_critical_rationale", std::string{});
  if (j.contains("reflective_label")) l.reflective_label = j["reflective_label"].get<std::string>();
  l.raw_response = j.value("raw_response", std::string{});
  if (j.contains("reasoning_trace")) l.reasoning_trace = j["reasoning_trace"].get<std::string>();
  return l;
}

}  // namespace supernova::events
