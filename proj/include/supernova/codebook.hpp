#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/strings.hpp"

namespace supernova::judge {

// Three-way codebook for reflective labels.
enum class CodebookCategory { causality, enablement, synthesis };

inline const char* to_string(CodebookCategory c) {
  switch (c) {
    case CodebookCategory::causality: return "causality";
    case CodebookCategory::enablement: return "enablement";
    case CodebookCategory::synthesis: return "synthesis";
  }
  return "?";
}

inline std::optional<CodebookCategory> parse_codebook_category(std::string_view s) {
  std::string t = str::to_lower(str::trim(s));
  if (str::starts_with(t, "caus")) return CodebookCategory::causality;
  if (str::starts_with(t, "enab")) return CodebookCategory::enablement;
  if (str::starts_with(t, "syn")) return CodebookCategory::synthesis;
  return std::nullopt;
}

// Canonical key: lowercase, unicode dashes -> '-', collapsed whitespace.
inline std::string codebook_key(std::string_view label) {
  return str::to_lower(str::collapse_whitespace(str::normalize_dashes(label)));
}

// Plural/adjective suffix strip, applied once to both sides of a match.
inline std::string stem(std::string_view word) {
  std::string w(word);
  auto ends_with = [&](std::string_view suf) {
    return w.size() > suf.size() + 1 && w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with("ing") && w.size() > 4) return w.substr(0, w.size() - 3);
  if (ends_with("ic")) return w.substr(0, w.size() - 2);
  if (ends_with("al")) return w.substr(0, w.size() - 2);
  if (ends_with("s")) return w.substr(0, w.size() - 1);
  return w;
}

struct Codebook {
  // keyword -> category, matched by stemmed-token equality
  std::vector<std::pair<std::string, CodebookCategory>> lexicon;
  // normalized label -> category (ground truth for known labels)
  std::map<std::string, CodebookCategory> fixture;
};

// Keyword groups seeded from the published example words for each bucket
// and widened with the dominant tokens of each bucket's label family.
// Words that occur across buckets (validation, gateway, focus, proof,
// mechanism, shift) are intentionally absent.
inline std::vector<std::pair<std::string, CodebookCategory>> builtin_lexicon() {
  using C = CodebookCategory;
  return {
      {"causality", C::causality}, {"causal", C::causality},   {"chain", C::causality},
      {"critical", C::causality},  {"keystone", C::causality}, {"linchpin", C::causality},
      {"pivot", C::causality},     {"juncture", C::causality},

      {"enablement", C::enablement},    {"enabler", C::enablement},
      {"enabling", C::enablement},      {"foundation", C::enablement},
      {"foundational", C::enablement},  {"breakthrough", C::enablement},
      {"barrier", C::enablement},       {"method", C::enablement},
      {"methodical", C::enablement},    {"methodological", C::enablement},
      {"impact", C::enablement},        {"threshold", C::enablement},
      {"precision", C::enablement},     {"evidence", C::enablement},
      {"evidentiary", C::enablement},

      {"synthesis", C::synthesis},     {"conceptual", C::synthesis},
      {"concept", C::synthesis},       {"integration", C::synthesis},
      {"paradigm", C::synthesis},      {"analogy", C::synthesis},
      {"analogical", C::synthesis},    {"insight", C::synthesis},
      {"synergy", C::synthesis},       {"convergence", C::synthesis},
      {"interpretive", C::synthesis},  {"transcendence", C::synthesis},
      {"framework", C::synthesis},     {"revolution", C::synthesis},
      {"predictive", C::synthesis},    {"theory", C::synthesis},
  };
}

// Loads "label<TAB>category" lines; '#' comments and blank lines skipped.
inline Codebook load_codebook(const std::string& tsv_path) {
  std::ifstream in(tsv_path);
  if (!in) throw ConfigError("codebook fixture not readable: " + tsv_path);
  Codebook cb;
  cb.lexicon = builtin_lexicon();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = str::trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t tab = t.find('\t');
    if (tab == std::string::npos)
      throw ConfigError("codebook line " + std::to_string(line_no) + " has no tab separator");
    auto cat = parse_codebook_category(t.substr(tab + 1));
    if (!cat)
      throw ConfigError("codebook line " + std::to_string(line_no) + ": unknown category");
    cb.fixture[codebook_key(t.substr(0, tab))] = *cat;
  }
  return cb;
}

struct LabelClassification {
  CodebookCategory category = CodebookCategory::causality;
  enum class Method { fixture, lexicon, assist, tiebreak } method = Method::tiebreak;
  bool low_confidence = false;
};

namespace detail {

inline std::set<CodebookCategory> lexicon_matches(const Codebook& cb, std::string_view label) {
  std::set<CodebookCategory> matched;
  const std::string normalized = codebook_key(label);
  for (const auto& token : str::alnum_tokens(normalized)) {
    const std::string ts = stem(token);
    for (const auto& [keyword, cat] : cb.lexicon)
      if (ts == stem(keyword)) matched.insert(cat);
  }
  return matched;
}

inline std::string assist_prompt(std::string_view label) {
  std::string p;
  p += "Assign the reflective label below to exactly one of three categories:\n\n";
  p += "- causality: mechanisms and cause-effect pathways\n";
  p += "- enablement: foundational methods that facilitate progress\n";
  p += "- synthesis: integration and transformation of concepts\n\n";
  p += "Label: ";
  p += label;
  p += "\n\nReply with one word: causality, enablement, or synthesis.\n";
  return p;
}

}  // namespace detail

// Known labels resolve through the fixture; unknown ones through the
// keyword lexicon when it is unambiguous, then the assist model, then the
// fixed priority causality > enablement > synthesis (flagged).
inline LabelClassification classify_label(const std::string& label, const Codebook& codebook,
                                          ChatClient* assist = nullptr,
                                          const std::string& assist_model = "",
                                          bool use_fixture = true) {
  if (str::trim(label).empty()) throw PreconditionError("classify_label: empty label");
  LabelClassification out;

  if (use_fixture) {
    auto it = codebook.fixture.find(codebook_key(label));
    if (it != codebook.fixture.end()) {
      out.category = it->second;
      out.method = LabelClassification::Method::fixture;
      return out;
    }
  }

  auto matched = detail::lexicon_matches(codebook, label);
  if (matched.size() == 1) {
    out.category = *matched.begin();
    out.method = LabelClassification::Method::lexicon;
    return out;
  }

  if (assist) {
    ChatResponse resp = assist->complete(ChatRequest(assist_model, detail::assist_prompt(label)));
    if (auto cat = parse_codebook_category(str::trim(resp.content))) {
      out.category = *cat;
      out.method = LabelClassification::Method::assist;
      return out;
    }
  }

  // fixed priority over the matched set (or all categories when none matched)
  out.low_confidence = true;
  out.method = LabelClassification::Method::tiebreak;
  for (CodebookCategory c : {CodebookCategory::causality, CodebookCategory::enablement,
                             CodebookCategory::synthesis}) {
    if (matched.empty() || matched.count(c)) {
      out.category = c;
      break;
    }
  }
  return out;
}

}  // namespace supernova::judge
