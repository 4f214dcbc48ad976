#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/events.hpp"
#include "supernova/prompts.hpp"
#include "supernova/strings.hpp"

namespace supernova::judge {

// Seven behavioral categories plus Unknown. Unknown never counts toward a
// distribution.
enum class PersonalityCategory {
  Ideological,
  Emotional,
  Strategic,
  Creative,
  Observational,
  PublicInfluence,
  CommunitySupport,
  Unknown,
};

inline constexpr std::array<PersonalityCategory, 7> kCanonicalCategories = {
    PersonalityCategory::Ideological,    PersonalityCategory::Emotional,
    PersonalityCategory::Strategic,      PersonalityCategory::Creative,
    PersonalityCategory::Observational,  PersonalityCategory::PublicInfluence,
    PersonalityCategory::CommunitySupport};

inline const char* display_name(PersonalityCategory c) {
  switch (c) {
    case PersonalityCategory::Ideological: return "Ideological";
    case PersonalityCategory::Emotional: return "Emotional";
    case PersonalityCategory::Strategic: return "Strategic";
    case PersonalityCategory::Creative: return "Creative";
    case PersonalityCategory::Observational: return "Observational";
    case PersonalityCategory::PublicInfluence: return "Public Influence";
    case PersonalityCategory::CommunitySupport: return "Community Support";
    case PersonalityCategory::Unknown: return "Unknown";
  }
  return "?";
}

inline const char* json_key(PersonalityCategory c) {
  switch (c) {
    case PersonalityCategory::Ideological: return "ideological";
    case PersonalityCategory::Emotional: return "emotional";
    case PersonalityCategory::Strategic: return "strategic";
    case PersonalityCategory::Creative: return "creative";
    case PersonalityCategory::Observational: return "observational";
    case PersonalityCategory::PublicInfluence: return "public_influence";
    case PersonalityCategory::CommunitySupport: return "community_support";
    case PersonalityCategory::Unknown: return "unknown";
  }
  return "?";
}

// Total normalization: case/punctuation-insensitive match against the
// canonical names, their judging-prompt spelling variants, and the radar
// axis aliases. Reasoning-style words are deliberately Unknown.
inline PersonalityCategory normalize_category(std::string_view raw) {
  std::string key;
  for (char ch : raw) {
    unsigned char u = static_cast<unsigned char>(ch);
    if (u < 0x80 && std::isalnum(u)) {
      key.push_back(static_cast<char>(std::tolower(u)));
    } else if (!key.empty() && key.back() != ' ') {
      key.push_back(' ');
    }
  }
  key = str::trim(key);

  // reasoning-style exclusions
  if (key == "logical" || key == "analytical" || key == "methodical" || key == "critical")
    return PersonalityCategory::Unknown;

  if (key == "ideological" || key == "idealogical") return PersonalityCategory::Ideological;
  if (key == "emotional") return PersonalityCategory::Emotional;
  if (key == "strategic" || key == "strategic achievers" || key == "strategic achiever")
    return PersonalityCategory::Strategic;
  if (key == "creative" || key == "creative innovators" || key == "creative innovator")
    return PersonalityCategory::Creative;
  if (key == "observational") return PersonalityCategory::Observational;
  if (key == "public influence" || key == "publicinfluence" || key == "influencer")
    return PersonalityCategory::PublicInfluence;
  if (key == "community support" || key == "communitysupport")
    return PersonalityCategory::CommunitySupport;
  return PersonalityCategory::Unknown;
}

struct PersonalityVerdict {
  std::string model_id;
  std::string article_id;
  std::string raw_label;
  PersonalityCategory category = PersonalityCategory::Unknown;
  std::string judge_model;
  int retry_count = 0;
  bool unresolved = false;  // still Unknown after the retry
};

inline std::string first_non_empty_line(std::string_view text) {
  for (const auto& line : str::split_lines(text)) {
    std::string t = str::trim(line);
    if (!t.empty()) return t;
  }
  return {};
}

// Renders the judging prompt over the target's full raw response, takes the
// first non-empty reply line, and normalizes it. One retry with a reminder
// when the first answer normalizes to Unknown.
inline PersonalityVerdict judge_personality(const events::RankedEventList& response,
                                            const std::string& article_title, ChatClient& judge,
                                            const std::string& judge_model) {
  if (str::trim(response.raw_response).empty())
    throw PreconditionError("judge_personality: empty target response");
  PersonalityVerdict v;
  v.model_id = response.model_id;
  v.article_id = response.article_id;
  v.judge_model = judge_model;

  const std::string prompt =
      prompts::render_judge_prompt(response.model_id, article_title, response.raw_response);
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string p = prompt;
    if (attempt > 0)
      p += "\n\nReminder: answer with exactly one of: \"Idealogical\", \"Emotional\", "
           "\"Strategic\", \"Creative\", \"Observational\", \"Public Influence\", "
           "\"Community Support\".";
    ChatResponse resp = judge.complete(ChatRequest(judge_model, p));
    v.raw_label = first_non_empty_line(resp.content);
    v.category = normalize_category(v.raw_label);
    v.retry_count = attempt;
    if (v.category != PersonalityCategory::Unknown) return v;
  }
  v.unresolved = true;
  return v;
}

inline nlohmann::json verdict_to_json(const PersonalityVerdict& v) {
  nlohmann::json j;
  j["model_id"] = v.model_id;
  j["article_id"] = v.article_id;
  j["raw_label"] = v.raw_label;
  j["category"] = json_key(v.category);
  j["judge_model"] = v.judge_model;
  j["retry_count"] = v.retry_count;
  if (v.unresolved) j["unresolved"] = true;
  return j;
}

inline PersonalityVerdict verdict_from_json(const nlohmann::json& j) {
  PersonalityVerdict v;
  v.model_id = j.at("model_id").get<std::string>();
  v.article_id = j.at("article_id").get<std::string>();
  v.raw_label = j.at("raw_label").get<std::string>();
  v.category = normalize_category(j.at("category").get<std::string>());
  v.judge_model = j.value("judge_model", std::string{});
  v.retry_count = j.value("retry_count", 0);
  v.unresolved = j.value("unresolved", false);
  return v;
}

}  // namespace supernova::judge
