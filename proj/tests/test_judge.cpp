#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "supernova/judge.hpp"
#include "supernova/mock_backend.hpp"

using namespace supernova;
using namespace supernova::judge;

TEST_CASE("normalization maps the prompt's category list") {
  CHECK(normalize_category("Strategic") == PersonalityCategory::Strategic);
  CHECK(normalize_category("Emotional") == PersonalityCategory::Emotional);
  CHECK(normalize_category("Creative") == PersonalityCategory::Creative);
  CHECK(normalize_category("Observational") == PersonalityCategory::Observational);
  CHECK(normalize_category("Public Influence") == PersonalityCategory::PublicInfluence);
  CHECK(normalize_category("Community Support") == PersonalityCategory::CommunitySupport);
  // both spellings land on the same category
  CHECK(normalize_category("Idealogical") == PersonalityCategory::Ideological);
  CHECK(normalize_category("Ideological") == PersonalityCategory::Ideological);
}

TEST_CASE("normalization is case- and punctuation-insensitive") {
  CHECK(normalize_category("idealogical.") == PersonalityCategory::Ideological);
  CHECK(normalize_category("  STRATEGIC!") == PersonalityCategory::Strategic);
  CHECK(normalize_category("\"Emotional\"") == PersonalityCategory::Emotional);
  CHECK(normalize_category("public_influence") == PersonalityCategory::PublicInfluence);
}

TEST_CASE("radar axis aliases resolve to canonical categories") {
  CHECK(normalize_category("Strategic Achievers") == PersonalityCategory::Strategic);
  CHECK(normalize_category("Creative Innovators") == PersonalityCategory::Creative);
  CHECK(normalize_category("Influencer") == PersonalityCategory::PublicInfluence);
}

TEST_CASE("reasoning-style words are excluded to Unknown") {
  CHECK(normalize_category("Logical") == PersonalityCategory::Unknown);
  CHECK(normalize_category("Analytical") == PersonalityCategory::Unknown);
  CHECK(normalize_category("Methodical") == PersonalityCategory::Unknown);
  CHECK(normalize_category("Critical") == PersonalityCategory::Unknown);
}

TEST_CASE("unmatched labels are Unknown, never an error") {
  CHECK(normalize_category("") == PersonalityCategory::Unknown);
  CHECK(normalize_category("Bananas") == PersonalityCategory::Unknown);
  CHECK(normalize_category("Strategic and Emotional") == PersonalityCategory::Unknown);
}

TEST_CASE("normalization is idempotent on its own canonical outputs") {
  for (auto c : kCanonicalCategories) CHECK(normalize_category(display_name(c)) == c);
  for (auto c : kCanonicalCategories) CHECK(normalize_category(json_key(c)) == c);
}

TEST_CASE("normalization is total over random strings") {
  std::mt19937 rng(1);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDE .,-_\"'!";
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    size_t len = rng() % 40;
    for (size_t k = 0; k < len; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
    PersonalityCategory c = normalize_category(s);
    bool valid = c == PersonalityCategory::Unknown;
    for (auto canon : kCanonicalCategories) valid = valid || c == canon;
    REQUIRE(valid);
  }
}

namespace {

events::RankedEventList sample_response() {
  events::RankedEventList list;
  list.model_id = "target-1";
  list.article_id = "art-1";
  for (int r = 1; r <= 5; ++r) list.events.push_back({r, "T" + std::to_string(r), "s"});
  list.raw_response = "1. T1 – s\n2. T2 – s\n3. T3 – s\n4. T4 – s\n5. T5 – s\n";
  return list;
}

}  // namespace

TEST_CASE("judging takes the first non-empty line and normalizes it") {
  auto resp = sample_response();

  SECTION("single word verdict") {
    mock::MockChatClient judge_chat({{"", "", {"Emotional"}, "", false}});
    auto v = judge_personality(resp, "Some Event", judge_chat, "judge-m");
    CHECK(v.category == PersonalityCategory::Emotional);
    CHECK(v.raw_label == "Emotional");
    CHECK(v.model_id == "target-1");
    CHECK(v.judge_model == "judge-m");
    CHECK(v.retry_count == 0);
  }

  SECTION("multi-line reply uses only the first non-empty line") {
    mock::MockChatClient judge_chat({{"", "", {"\n\nStrategic\nBecause the events..."}, "", false}});
    auto v = judge_personality(resp, "E", judge_chat, "j");
    CHECK(v.category == PersonalityCategory::Strategic);
  }

  SECTION("reasoning-style answer retries once with a reminder") {
    mock::MockChatClient judge_chat({{"", "", {"Logical", "Strategic"}, "", false}});
    auto v = judge_personality(resp, "E", judge_chat, "j");
    CHECK(v.category == PersonalityCategory::Strategic);
    CHECK(v.retry_count == 1);
    auto reqs = judge_chat.requests();
    REQUIRE(reqs.size() == 2);
    CHECK(reqs[1].messages.back().content.find("Reminder") != std::string::npos);
  }

  SECTION("still-Unknown verdicts are stored flagged") {
    mock::MockChatClient judge_chat({{"", "", {"Logical"}, "", false}});
    auto v = judge_personality(resp, "E", judge_chat, "j");
    CHECK(v.category == PersonalityCategory::Unknown);
    CHECK(v.unresolved);
  }

  SECTION("identical inputs give identical verdicts") {
    auto once = [&] {
      mock::MockChatClient judge_chat({{"", "", {"Creative"}, "", false}});
      return judge_personality(resp, "E", judge_chat, "j");
    };
    auto a = once();
    auto b = once();
    CHECK(a.category == b.category);
    CHECK(a.raw_label == b.raw_label);
  }

  SECTION("empty target response is a precondition error") {
    auto empty = resp;
    empty.raw_response = "  ";
    mock::MockChatClient judge_chat({}, false);
    CHECK_THROWS_AS(judge_personality(empty, "E", judge_chat, "j"), PreconditionError);
  }
}

TEST_CASE("verdict serialization preserves the category audit invariant") {
  PersonalityVerdict v;
  v.model_id = "m";
  v.article_id = "a";
  v.raw_label = "Strategic Achievers";
  v.category = normalize_category(v.raw_label);
  v.judge_model = "j";
  auto back = verdict_from_json(verdict_to_json(v));
  CHECK(back.category == v.category);
  CHECK(back.category == normalize_category(back.raw_label));
}
