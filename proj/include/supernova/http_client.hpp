#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "supernova/cache.hpp"
#include "supernova/concurrency.hpp"
#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/nobel.hpp"
#include "supernova/wiki.hpp"

namespace supernova::net {

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "http://localhost:8080"
  std::string path;              // "/v1/chat/completions"
  std::string host;
};

inline ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
    out.path = "/";
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  auto host_begin = scheme_end + 3;
  auto host_end = url.find_first_of(":/", host_begin);
  out.host = url.substr(host_begin, host_end == std::string::npos ? std::string::npos
                                                                  : host_end - host_begin);
  return out;
}

inline std::string url_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else if (c == ' ') {
      out.push_back('_');  // wiki titles use underscores
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

inline httplib::Client make_client(const ParsedUrl& url) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.scheme_host_port.rfind("https://", 0) == 0)
    throw ConfigError("built without TLS support; use an http endpoint or enable OpenSSL");
#endif
  httplib::Client cli(url.scheme_host_port);
  cli.set_connection_timeout(10);
  cli.set_read_timeout(120);
  return cli;
}

// Chat-completions wire shape:
//   POST {model, messages:[{role,content}...], <decoding params>}
//   -> {choices:[{message:{content, reasoning_content?}}]}
class HttpChatClient : public ChatClient {
 public:
  HttpChatClient(std::string url, std::string api_key)
      : url_(parse_url(url)), api_key_(std::move(api_key)) {}

  ChatResponse complete(const ChatRequest& request) override {
    httplib::Client cli = make_client(url_);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(url_.path, headers, cache::chat_request_json(request).dump(),
                        "application/json");
    if (!res) throw EndpointError("chat endpoint unreachable: " + url_.scheme_host_port);
    if (res->status != 200)
      throw EndpointError("chat endpoint returned status " + std::to_string(res->status));
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty())
      throw EndpointError("chat endpoint returned an unparseable body");
    const auto& msg = j["choices"][0].value("message", nlohmann::json::object());
    ChatResponse out;
    out.content = msg.value("content", "");
    if (msg.contains("reasoning_content"))
      out.reasoning = msg["reasoning_content"].get<std::string>();
    else if (msg.contains("reasoning"))
      out.reasoning = msg["reasoning"].get<std::string>();
    return out;
  }

 private:
  ParsedUrl url_;
  std::string api_key_;
};

// Embedding wire shape: POST {model, input:[...]} -> {embeddings:[[...]]}.
class HttpEmbeddingClient : public EmbeddingClient {
 public:
  HttpEmbeddingClient(std::string url, std::string api_key)
      : url_(parse_url(url)), api_key_(std::move(api_key)) {}

  std::vector<std::vector<float>> embed(const std::string& model,
                                        const std::vector<std::string>& inputs) override {
    httplib::Client cli = make_client(url_);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    nlohmann::json body;
    body["model"] = model;
    body["input"] = inputs;
    auto res = cli.Post(url_.path, headers, body.dump(), "application/json");
    if (!res) throw EndpointError("embedding endpoint unreachable: " + url_.scheme_host_port);
    if (res->status != 200)
      throw EndpointError("embedding endpoint returned status " + std::to_string(res->status));
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("embeddings"))
      throw EndpointError("embedding endpoint returned an unparseable body");
    std::vector<std::vector<float>> out;
    for (const auto& row : j["embeddings"]) out.push_back(row.get<std::vector<float>>());
    return out;
  }

 private:
  ParsedUrl url_;
  std::string api_key_;
};

// GET with one politeness gate per host and an on-disk cache keyed by URL.
class PoliteGetter {
 public:
  PoliteGetter(std::shared_ptr<cache::DiskCache> cache, std::shared_ptr<run::PolitenessGate> gate,
               std::shared_ptr<run::RequestBudget> budget)
      : cache_(std::move(cache)), gate_(std::move(gate)), budget_(std::move(budget)) {}

  std::string get(const std::string& full_url) {
    const std::string key = crypto::sha256_hex("GET\n" + full_url);
    if (cache_) {
      if (auto hit = cache_->get(key)) return hit->value("body", "");
    }
    ParsedUrl url = parse_url(full_url);
    std::unique_ptr<run::RequestBudget::Ticket> ticket;
    if (budget_) ticket = std::make_unique<run::RequestBudget::Ticket>(*budget_);
    if (gate_) gate_->wait_turn(url.host);
    httplib::Client cli = make_client(url);
    auto res = cli.Get(url.path);
    if (!res) throw EndpointError("unreachable: " + full_url);
    if (res->status != 200)
      throw EndpointError("status " + std::to_string(res->status) + " from " + full_url);
    if (cache_) {
      nlohmann::json entry;
      entry["url"] = full_url;
      entry["body"] = res->body;
      cache_->put(key, std::move(entry));
    }
    return res->body;
  }

 private:
  std::shared_ptr<cache::DiskCache> cache_;
  std::shared_ptr<run::PolitenessGate> gate_;
  std::shared_ptr<run::RequestBudget> budget_;
};

// MediaWiki API client. Pageview and quality endpoints are URL templates
// with a {title} placeholder; leave them empty to skip those metrics.
class HttpWikiClient : public wiki::WikiClient {
 public:
  HttpWikiClient(std::string api_url, std::string pageviews_template,
                 std::string quality_template, PoliteGetter getter)
      : api_url_(std::move(api_url)),
        pageviews_template_(std::move(pageviews_template)),
        quality_template_(std::move(quality_template)),
        getter_(std::move(getter)) {}

  wiki::CategoryListing category_members(const std::string& category) override {
    wiki::CategoryListing out;
    std::string cont;
    do {
      std::string url = api_url_ +
                        "?action=query&list=categorymembers&format=json&formatversion=2"
                        "&cmlimit=500&cmtype=page%7Csubcat&cmtitle=Category:" +
                        url_encode(category);
      if (!cont.empty()) url += "&cmcontinue=" + url_encode(cont);
      nlohmann::json j = nlohmann::json::parse(getter_.get(url), nullptr, false);
      if (j.is_discarded()) throw EndpointError("bad category listing for " + category);
      if (!j.contains("query") || !j["query"].contains("categorymembers"))
        throw wiki::UnknownCategory("unknown category: " + category);
      for (const auto& m : j["query"]["categorymembers"]) {
        std::string title = m.value("title", "");
        if (m.value("ns", 0) == 14) {
          const std::string prefix = "Category:";
          out.subcategories.push_back(
              title.rfind(prefix, 0) == 0 ? title.substr(prefix.size()) : title);
        } else {
          out.pages.push_back(title);
        }
      }
      cont = j.contains("continue") ? j["continue"].value("cmcontinue", "") : "";
    } while (!cont.empty());
    return out;
  }

  std::string page_wikitext(const std::string& title) override {
    std::string url = api_url_ +
                      "?action=query&prop=revisions&rvprop=content&rvslots=main&format=json"
                      "&formatversion=2&titles=" +
                      url_encode(title);
    nlohmann::json j = nlohmann::json::parse(getter_.get(url), nullptr, false);
    if (j.is_discarded()) throw EndpointError("bad wikitext response for " + title);
    try {
      return j["query"]["pages"][0]["revisions"][0]["slots"]["main"]["content"]
          .get<std::string>();
    } catch (const std::exception&) {
      throw wiki::UnknownCategory("unknown page: " + title);
    }
  }

  wiki::PageMetadata page_metadata(const std::string& title) override {
    wiki::PageMetadata md;
    if (!pageviews_template_.empty()) {
      nlohmann::json j =
          nlohmann::json::parse(getter_.get(substitute(pageviews_template_, title)),
                                nullptr, false);
      if (!j.is_discarded() && j.contains("items")) {
        int64_t views = 0;
        for (const auto& item : j["items"]) views += item.value("views", int64_t{0});
        md.page_views = views;
      }
    }
    if (!quality_template_.empty()) {
      nlohmann::json j = nlohmann::json::parse(getter_.get(substitute(quality_template_, title)),
                                               nullptr, false);
      if (!j.is_discarded()) {
        if (j.contains("prediction"))
          md.quality_class = j["prediction"].get<std::string>();
        else if (j.contains("quality_class"))
          md.quality_class = j["quality_class"].get<std::string>();
      }
    }
    return md;
  }

 private:
  static std::string substitute(const std::string& tpl, const std::string& title) {
    std::string out = tpl;
    size_t pos = out.find("{title}");
    if (pos != std::string::npos) out.replace(pos, 7, url_encode(title));
    return out;
  }

  std::string api_url_;
  std::string pageviews_template_;
  std::string quality_template_;
  PoliteGetter getter_;
};

// Prize REST API v2.1 pagination.
class HttpNobelApi : public corpus::NobelApi {
 public:
  HttpNobelApi(std::string base_url, PoliteGetter getter)
      : base_url_(std::move(base_url)), getter_(std::move(getter)) {}

  nlohmann::json fetch_page(const std::string& category_code, int offset, int limit) override {
    std::string url = base_url_ + "/nobelPrizes?nobelPrizeCategory=" + url_encode(category_code) +
                      "&offset=" + std::to_string(offset) + "&limit=" + std::to_string(limit);
    nlohmann::json j = nlohmann::json::parse(getter_.get(url), nullptr, false);
    if (j.is_discarded()) throw EndpointError("unparseable prize API response");
    return j;
  }

 private:
  std::string base_url_;
  PoliteGetter getter_;
};

}  // namespace supernova::net
