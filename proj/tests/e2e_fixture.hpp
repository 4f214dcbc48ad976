#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "supernova/config.hpp"
#include "supernova/stages.hpp"

#include "fixture_util.hpp"

namespace testutil {

namespace fs = std::filesystem;

inline std::string filler_words(const std::string& topic, int n) {
  std::string out = "This article describes " + topic + " in detail.";
  for (int i = 0; i < n; ++i) out += " " + topic.substr(0, 3) + "word" + std::to_string(i);
  return out;
}

inline nlohmann::json wiki_page(const std::string& body_wikitext, int64_t views,
                                const std::string& quality, int edits) {
  nlohmann::json p;
  p["wikitext"] = body_wikitext;
  p["page_views"] = views;
  p["quality_class"] = quality;
  p["edit_count"] = edits;
  return p;
}

inline nlohmann::json build_wiki_fixture() {
  nlohmann::json f;
  f["categories"] = {
      {"Historic Battles",
       {{"pages", {"Battle of Somewhere", "Siege of Elsewhere (1453)", "List of battles",
                   "Battle of Recentville"}},
        {"subcategories", nlohmann::json::array()}}},
      {"Modern Disasters",
       {{"pages", {"2008 Floodville flood", "2011 Quakeville earthquake", "2003", "Topic Page"}},
        {"subcategories", nlohmann::json::array()}}},
      {"Scientists",
       {{"pages", {"Ada Example", "Grace Sample", "Short Bio"}},
        {"subcategories", nlohmann::json::array()}}}};

  auto event_text = [](const std::string& title, int year, int words) {
    return "{{Infobox event|date=" + std::to_string(year) + "}}'''" + title + "''' was a major event. " +
           filler_words(title, words);
  };
  auto bio_text = [](const std::string& title, int words) {
    return "{{Infobox person|name=" + title + "}}'''" + title + "''' was a scientist. " +
           filler_words(title, words);
  };

  f["pages"] = nlohmann::json::object();
  f["pages"]["Battle of Somewhere"] =
      wiki_page(event_text("Battle of Somewhere", 1066, 700), 9000, "B", 40);
  f["pages"]["Siege of Elsewhere (1453)"] =
      wiki_page(event_text("Siege of Elsewhere", 1453, 650), 12000,
                "GA", 55);
  f["pages"]["List of battles"] =
      wiki_page("* [[Battle of Somewhere]]", 100000, "B", 99);
  f["pages"]["Battle of Recentville"] =
      wiki_page(event_text("Battle of Recentville", 2005, 800), 15000,
                "B", 12);
  f["pages"]["2008 Floodville flood"] =
      wiki_page(event_text("Floodville flood", 2008, 720), 8000, "B", 33);
  f["pages"]["2011 Quakeville earthquake"] =
      wiki_page(event_text("Quakeville earthquake", 2011, 680), 9500, "FA", 77);
  f["pages"]["2003"] = wiki_page("Year article.", 500000, "B", 5);
  f["pages"]["Topic Page"] =
      wiki_page(event_text("Topic Page", 2010, 900), 20000, "B", 10);
  f["pages"]["Ada Example"] = wiki_page(bio_text("Ada Example", 3200), 60001, "B", 80);
  f["pages"]["Grace Sample"] =
      wiki_page(bio_text("Grace Sample", 3400), 70001, "GA", 90);
  f["pages"]["Short Bio"] = wiki_page(bio_text("Short Bio", 400), 90000, "B", 20);
  return f;
}

inline nlohmann::json build_nobel_fixture() {
  auto prize = [](const std::string& year, const std::string& full, const std::string& motivation,
                  std::vector<std::string> names) {
    nlohmann::json laureates = nlohmann::json::array();
    for (const auto& n : names)
      laureates.push_back({{"knownName", {{"en", n}}}, {"motivation", {{"en", motivation}}}});
    return nlohmann::json{
        {"awardYear", year}, {"category", {{"en", full}}}, {"laureates", laureates}};
  };
  nlohmann::json f;
  f["phy"] = nlohmann::json::array(
      {prize("2023", "Physics", "for experiments with attosecond pulses", {"Anne L'Example"})});
  f["med"] = nlohmann::json::array(
      {prize("2020", "Physiology or Medicine", "for the discovery of a virus", {"Harvey Sample"})});
  f["che"] = nlohmann::json::array();
  return f;
}

inline std::string five_events(const std::string& model, const std::string& topic) {
  std::string s;
  for (int i = 1; i <= 5; ++i)
    s += std::to_string(i) + ". " + model + " milestone " + std::to_string(i) + " of " + topic +
         " \xE2\x80\x93 summary " + std::to_string(i) + " for " + topic + "\n";
  s += "\nThe top event dominates the narrative of " + topic + ".";
  return s;
}

inline nlohmann::json build_chat_script() {
  using nlohmann::json;
  json script = json::array();
  auto rule = [&](json entry) { script.push_back(std::move(entry)); };

  // query reformulation (any model, any article)
  rule({{"contains", "Reformulate the question into"},
        {"reply", "1. decisive turning points\n2. cascading consequences"}});

  // semantic validator
  auto validator = [&](const std::string& topic, const std::string& reply) {
    rule({{"contains", json::array({"primarily about a discrete major event", topic})},
          {"reply", reply}});
  };
  validator("Battle of Somewhere", "VERDICT: EVENT\nCONFIDENCE: 0.95");
  validator("Siege of Elsewhere", "VERDICT: EVENT\nCONFIDENCE: 0.97");
  validator("Floodville flood", "VERDICT: EVENT\nCONFIDENCE: 0.93");
  validator("Quakeville earthquake", "VERDICT: EVENT\nCONFIDENCE: 0.96");
  validator("Topic Page", "VERDICT: NOT_EVENT\nCONFIDENCE: 0.80");

  // deep-research style article generation from prize metadata
  rule({{"contains", json::array({"Nobel Prize metadata", "Year: 2023"})},
        {"reply", "The attosecond pulse discovery unfolded over decades. " +
                      filler_words("attosecond", 400)}});
  rule({{"contains", json::array({"Nobel Prize metadata", "Year: 2020"})},
        {"reply", "The virus discovery reshaped medicine. " + filler_words("hepatitis", 380)}});

  // scientific-mode extraction: distinct labels per model and article
  auto scientific = [&](const std::string& model, const std::string& title,
                        const std::string& label) {
    rule({{"model", model},
          {"contains", json::array({"scientific discovery", title})},
          {"reply", five_events(model, title) + "\n\nLabel: " + label}});
  };
  scientific("alpha-model", "Nobel Prize in Physics 2023", "Causal Links");
  scientific("alpha-model", "Nobel Prize in Physiology or Medicine 2020", "Critical Path");
  scientific("beta-model", "Nobel Prize in Physics 2023", "Barrier Breakers");
  scientific("beta-model", "Nobel Prize in Physiology or Medicine 2020", "Paradigm Shifters");

  // general-mode extraction per (model, article)
  for (const std::string model : {"alpha-model", "beta-model"}) {
    for (const std::string topic :
         {"Battle of Somewhere", "Siege of Elsewhere (1453)", "2008 Floodville flood",
          "2011 Quakeville earthquake", "Ada Example", "Grace Sample"}) {
      rule({{"model", model},
            {"contains", json::array({"critical events in " + topic})},
            {"reply", five_events(model, topic)}});
    }
  }

  // judge verdicts: one exception per model, else a stable category
  rule({{"contains", json::array({"evaluating the personality", "\"alpha-model\"",
                                  "\"Battle of Somewhere\""})},
        {"reply", "Creative"}});
  rule({{"contains", json::array({"evaluating the personality", "\"alpha-model\""})},
        {"reply", "Strategic"}});
  rule({{"contains", json::array({"evaluating the personality", "\"beta-model\"",
                                  "\"2008 Floodville flood\""})},
        {"reply", "Community Support"}});
  rule({{"contains", json::array({"evaluating the personality", "\"beta-model\""})},
        {"reply", "Emotional"}});
  return script;
}

struct E2EFixture {
  fs::path root;
  supernova::config::PipelineConfig cfg;
};

// Writes wiki/nobel/chat fixtures under <temp>/<name> and returns a config
// pointing at them, with out/ and cache/ under the same root.
inline E2EFixture make_e2e_fixture(const std::string& name) {
  E2EFixture fx;
  fx.root = fs::temp_directory_path() / name;
  fs::remove_all(fx.root);
  fs::create_directories(fx.root);

  auto dump = [&](const std::string& file, const nlohmann::json& j) {
    std::ofstream out(fx.root / file);
    out << j.dump(2);
  };
  dump("wiki.json", build_wiki_fixture());
  dump("nobel.json", build_nobel_fixture());
  dump("script.json", build_chat_script());

  supernova::config::PipelineConfig cfg;
  cfg.offline = true;
  cfg.seed = 42;
  cfg.chat_model = "generator-model";
  cfg.target_models = {"alpha-model", "beta-model"};
  cfg.judge_model = "judge-model";
  cfg.validator_model = "validator-model";
  cfg.embed_model = "mock-embed";
  cfg.mock_embed_dim = 16;
  cfg.chunk_size = 200;
  cfg.chunk_overlap = 20;
  cfg.n_rewrites = 2;
  cfg.top_k = 3;
  cfg.retries = 2;
  cfg.concurrency = 4;
  cfg.out_dir = (fx.root / "out").string();
  cfg.cache_dir = (fx.root / "cache").string();
  cfg.wiki_fixture = (fx.root / "wiki.json").string();
  cfg.nobel_fixture = (fx.root / "nobel.json").string();
  cfg.chat_script = (fx.root / "script.json").string();
  cfg.codebook_path = repo_root() + std::string("/codebook/labels.tsv");
  cfg.raw["fixture"] = name;
  fx.cfg = cfg;
  return fx;
}

// corpus (three wiki categories + prizes) -> extract -> judge -> analyze
inline void run_full_pipeline(supernova::run::StageContext& ctx) {
  using namespace supernova::run;
  SeedSpec battles;
  battles.categories = {"Historic Battles"};
  SeedSpec disasters;
  disasters.categories = {"Modern Disasters"};
  SeedSpec scientists;
  scientists.categories = {"Scientists"};
  run_corpus_stage(ctx, "historical_event", battles, 1);
  run_corpus_stage(ctx, "news_event", disasters, 1);
  run_corpus_stage(ctx, "biography", scientists, 1);
  run_corpus_stage(ctx, "scientific_discovery", {}, 0);
  run_extract_stage(ctx);
  run_judge_stage(ctx);
  run_analyze_stage(ctx);
}

}  // namespace testutil
