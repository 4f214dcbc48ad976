#pragma once

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "supernova/corpus.hpp"
#include "supernova/errors.hpp"

namespace supernova::corpus {

inline std::string nobel_category_name(const std::string& code) {
  if (code == "phy") return "Physics";
  if (code == "che") return "Chemistry";
  if (code == "med") return "Physiology or Medicine";
  throw PreconditionError("unknown prize category code: " + code);
}

// One page of the prize REST API (v2.1 response shape).
class NobelApi {
 public:
  virtual ~NobelApi() = default;
  virtual nlohmann::json fetch_page(const std::string& category_code, int offset, int limit) = 0;
};

using NobelApiPtr = std::shared_ptr<NobelApi>;

struct NobelFetchResult {
  std::vector<NobelPrizeRecord> records;
  std::vector<std::string> warnings;  // skipped records (e.g. missing motivation)
};

// Paginates each requested category to exhaustion, then sorts by
// (year, category). Prize entries without an English motivation are
// skipped with a warning.
inline NobelFetchResult fetch_nobel_prizes(NobelApi& api, const std::set<std::string>& codes,
                                           int page_limit = 50) {
  if (codes.empty()) throw PreconditionError("fetch_nobel_prizes: no category codes");
  NobelFetchResult out;
  for (const auto& code : codes) {
    nobel_category_name(code);  // validates the code
    int offset = 0;
    while (true) {
      nlohmann::json page = api.fetch_page(code, offset, page_limit);
      const auto& prizes = page.value("nobelPrizes", nlohmann::json::array());
      if (prizes.empty()) break;
      for (const auto& p : prizes) {
        NobelPrizeRecord rec;
        rec.category = code;
        try {
          rec.year = std::stoi(p.at("awardYear").get<std::string>());
        } catch (const std::exception&) {
          out.warnings.push_back("prize with unreadable award year skipped (" + code + ")");
          continue;
        }
        std::string motivation;
        if (p.contains("topMotivation") && p["topMotivation"].contains("en"))
          motivation = p["topMotivation"]["en"].get<std::string>();
        for (const auto& l : p.value("laureates", nlohmann::json::array())) {
          if (l.contains("knownName") && l["knownName"].contains("en"))
            rec.laureates.push_back(l["knownName"]["en"].get<std::string>());
          else if (l.contains("orgName") && l["orgName"].contains("en"))
            rec.laureates.push_back(l["orgName"]["en"].get<std::string>());
          if (motivation.empty() && l.contains("motivation") && l["motivation"].contains("en"))
            motivation = l["motivation"]["en"].get<std::string>();
        }
        if (motivation.empty()) {
          out.warnings.push_back("prize " + std::to_string(rec.year) + "/" + code +
                                 " skipped: no motivation text");
          continue;
        }
        if (rec.laureates.empty()) {
          out.warnings.push_back("prize " + std::to_string(rec.year) + "/" + code +
                                 " skipped: no laureates");
          continue;
        }
        rec.discovery = motivation;
        out.records.push_back(std::move(rec));
      }
      if (static_cast<int>(prizes.size()) < page_limit) break;
      offset += page_limit;
    }
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const NobelPrizeRecord& a, const NobelPrizeRecord& b) {
                     if (a.year != b.year) return a.year < b.year;
                     return a.category < b.category;
                   });
  return out;
}

// Deterministic template: same record, same prompt bytes.
inline std::string build_discovery_prompt(const NobelPrizeRecord& rec) {
  if (rec.laureates.empty()) throw PreconditionError("discovery prompt: record has no laureates");
  std::string names;
  for (size_t i = 0; i < rec.laureates.size(); ++i) {
    if (i) names += ", ";
    names += rec.laureates[i];
  }
  std::string p;
  p += "Using the Nobel Prize metadata below, write a fully formed encyclopedic article "
       "about the discovery, suitable for long-context reasoning about its timeline.\n\n";
  p += "Year: " + std::to_string(rec.year) + "\n";
  p += "Category: " + nobel_category_name(rec.category) + "\n";
  p += "Discovery: " + rec.discovery + "\n";
  p += "Laureates: " + names + "\n\n";
  p += "The article must cover the historical context, the methodology, the publication "
       "trail, the significance, and the legacy of the discovery. Write in plain prose "
       "with no markup.\n";
  return p;
}

// Fixture-backed API for offline runs; data shape mirrors the live service:
//   {"phy": [ {prize}, ... ], "che": [...], "med": [...]}
class FixtureNobelApi : public NobelApi {
 public:
  explicit FixtureNobelApi(nlohmann::json data) : data_(std::move(data)) {}

  static FixtureNobelApi from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("nobel fixture not readable: " + path);
    nlohmann::json j;
    in >> j;
    return FixtureNobelApi(std::move(j));
  }

  nlohmann::json fetch_page(const std::string& code, int offset, int limit) override {
    nlohmann::json out;
    out["nobelPrizes"] = nlohmann::json::array();
    if (data_.contains(code)) {
      const auto& all = data_[code];
      for (int i = offset; i < static_cast<int>(all.size()) && i < offset + limit; ++i)
        out["nobelPrizes"].push_back(all[i]);
    }
    return out;
  }

 private:
  nlohmann::json data_;
};

}  // namespace supernova::corpus
