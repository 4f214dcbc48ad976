#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "supernova/errors.hpp"

namespace supernova::wiki {

struct CategoryListing {
  std::vector<std::string> pages;
  std::vector<std::string> subcategories;
};

struct PageMetadata {
  std::optional<int64_t> page_views;          // cumulative
  std::optional<std::string> quality_class;   // "Stub".."FA"
  std::optional<int64_t> edit_count;
};

struct UnknownCategory : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class WikiClient {
 public:
  virtual ~WikiClient() = default;
  virtual CategoryListing category_members(const std::string& category) = 0;
  virtual std::string page_wikitext(const std::string& title) = 0;
  virtual PageMetadata page_metadata(const std::string& title) = 0;
};

using WikiClientPtr = std::shared_ptr<WikiClient>;

// Offline client backed by a JSON fixture:
//   {"categories": {name: {"pages": [...], "subcategories": [...]}},
//    "pages": {title: {"wikitext": "...", "page_views": N,
//                      "quality_class": "B", "edit_count": N}}}
class FixtureWikiClient : public WikiClient {
 public:
  explicit FixtureWikiClient(nlohmann::json fixture) : data_(std::move(fixture)) {}

  static FixtureWikiClient from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("wiki fixture not readable: " + path);
    nlohmann::json j;
    in >> j;
    return FixtureWikiClient(std::move(j));
  }

  CategoryListing category_members(const std::string& category) override {
    const auto& cats = data_.at("categories");
    if (!cats.contains(category)) throw UnknownCategory("unknown category: " + category);
    CategoryListing out;
    const auto& c = cats.at(category);
    for (const auto& p : c.value("pages", nlohmann::json::array())) out.pages.push_back(p);
    for (const auto& s : c.value("subcategories", nlohmann::json::array()))
      out.subcategories.push_back(s);
    return out;
  }

  std::string page_wikitext(const std::string& title) override {
    return page(title).value("wikitext", std::string{});
  }

  PageMetadata page_metadata(const std::string& title) override {
    const auto& p = page(title);
    PageMetadata md;
    if (p.contains("page_views")) md.page_views = p.at("page_views").get<int64_t>();
    if (p.contains("quality_class")) md.quality_class = p.at("quality_class").get<std::string>();
    if (p.contains("edit_count")) md.edit_count = p.at("edit_count").get<int64_t>();
    return md;
  }

 private:
  const nlohmann::json& page(const std::string& title) const {
    const auto& pages = data_.at("pages");
    if (!pages.contains(title)) throw UnknownCategory("unknown page: " + title);
    return pages.at(title);
  }

  nlohmann::json data_;
};

}  // namespace supernova::wiki
