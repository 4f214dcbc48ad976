#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "supernova/analysis.hpp"
#include "supernova/cache.hpp"
#include "supernova/codebook.hpp"
#include "supernova/concurrency.hpp"
#include "supernova/config.hpp"
#include "supernova/corpus.hpp"
#include "supernova/embedding.hpp"
#include "supernova/events.hpp"
#include "supernova/judge.hpp"
#include "supernova/manifest.hpp"
#include "supernova/mock_backend.hpp"
#include "supernova/nobel.hpp"
#include "supernova/report.hpp"
#include "supernova/vector_index.hpp"
#include "supernova/wiki.hpp"

namespace supernova::run {

namespace fs = std::filesystem;

inline std::string iso_now_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct OutPaths {
  fs::path root;
  fs::path corpus_dir, chunks_dir, index_dir, responses_dir, verdicts_dir, report_dir;
  fs::path manifest_file;

  explicit OutPaths(const fs::path& out_root)
      : root(out_root),
        corpus_dir(out_root / "corpus"),
        chunks_dir(out_root / "chunks"),
        index_dir(out_root / "index"),
        responses_dir(out_root / "responses"),
        verdicts_dir(out_root / "verdicts"),
        report_dir(out_root / "report"),
        manifest_file(out_root / "manifest.json") {}
};

struct StageContext {
  config::PipelineConfig cfg;
  ChatClientPtr chat;           // extraction + discovery generation
  ChatClientPtr judge_chat;
  ChatClientPtr validator_chat;
  ChatClientPtr assist_chat;    // optional
  EmbeddingClientPtr embeddings;
  wiki::WikiClientPtr wiki_client;   // corpus stage (wiki categories)
  corpus::NobelApiPtr nobel_api;     // corpus stage (scientific)
  std::shared_ptr<cache::DiskCache> disk_cache;  // optional
  std::shared_ptr<RequestBudget> budget;

  std::string timestamp() const {
    return cfg.timestamps_fixed() ? "1970-01-01T00:00:00Z" : iso_now_utc();
  }

  OutPaths paths() const { return OutPaths(fs::path(cfg.out_dir)); }

  cache::RetryPolicy retry_policy() const {
    cache::RetryPolicy p;
    p.base_delay_ms = cfg.offline ? 5 : 100;
    return p;
  }
};

// Budget-gated, cache-backed view of an endpoint, shaped like a plain client.
class GatedChatClient : public ChatClient {
 public:
  GatedChatClient(ChatClientPtr inner, const StageContext& ctx)
      : inner_(std::move(inner)),
        cache_(ctx.disk_cache),
        budget_(ctx.budget),
        policy_(ctx.retry_policy()),
        created_at_(ctx.timestamp()) {}

  ChatResponse complete(const ChatRequest& request) override {
    std::unique_ptr<RequestBudget::Ticket> ticket;
    if (budget_) ticket = std::make_unique<RequestBudget::Ticket>(*budget_);
    return cache::cached_chat_call(request, cache_.get(), *inner_, policy_, nullptr, created_at_);
  }

 private:
  ChatClientPtr inner_;
  std::shared_ptr<cache::DiskCache> cache_;
  std::shared_ptr<RequestBudget> budget_;
  cache::RetryPolicy policy_;
  std::string created_at_;
};

class GatedEmbeddingClient : public EmbeddingClient {
 public:
  GatedEmbeddingClient(EmbeddingClientPtr inner, std::shared_ptr<RequestBudget> budget,
                       cache::RetryPolicy policy = {})
      : inner_(std::move(inner)), budget_(std::move(budget)), policy_(policy) {}

  std::vector<std::vector<float>> embed(const std::string& model,
                                        const std::vector<std::string>& inputs) override {
    std::unique_ptr<RequestBudget::Ticket> ticket;
    if (budget_) ticket = std::make_unique<RequestBudget::Ticket>(*budget_);
    int delay = policy_.base_delay_ms;
    for (int attempt = 1;; ++attempt) {
      try {
        return inner_->embed(model, inputs);
      } catch (const EndpointError&) {
        if (attempt >= policy_.attempts) throw;
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        delay = static_cast<int>(delay * policy_.multiplier);
      }
    }
  }

 private:
  EmbeddingClientPtr inner_;
  std::shared_ptr<RequestBudget> budget_;
  cache::RetryPolicy policy_;
};

// Offline wiring: scripted chat, hash embeddings, fixture wiki/nobel.
inline StageContext make_offline_context(const config::PipelineConfig& cfg) {
  StageContext ctx;
  ctx.cfg = cfg;
  std::shared_ptr<mock::MockChatClient> chat;
  if (!cfg.chat_script.empty()) {
    chat = std::make_shared<mock::MockChatClient>(
        mock::MockChatClient::script_from_file(cfg.chat_script));
  } else {
    chat = std::make_shared<mock::MockChatClient>(std::vector<mock::ScriptEntry>{}, false);
  }
  ctx.chat = chat;
  ctx.judge_chat = chat;
  ctx.validator_chat = chat;
  if (!cfg.assist_model.empty()) ctx.assist_chat = chat;
  ctx.embeddings = std::make_shared<mock::HashEmbeddingClient>(cfg.mock_embed_dim, cfg.seed);
  if (!cfg.wiki_fixture.empty())
    ctx.wiki_client =
        std::make_shared<wiki::FixtureWikiClient>(wiki::FixtureWikiClient::from_file(cfg.wiki_fixture));
  if (!cfg.nobel_fixture.empty())
    ctx.nobel_api =
        std::make_shared<corpus::FixtureNobelApi>(corpus::FixtureNobelApi::from_file(cfg.nobel_fixture));
  if (!cfg.cache_dir.empty())
    ctx.disk_cache = std::make_shared<cache::DiskCache>(fs::path(cfg.cache_dir));
  ctx.budget = std::make_shared<RequestBudget>(cfg.concurrency);
  return ctx;
}

inline RunManifest open_manifest(const StageContext& ctx) {
  OutPaths paths = ctx.paths();
  fs::create_directories(paths.root);
  std::string run_id = crypto::content_id(ctx.cfg.snapshot_hash() + ctx.timestamp());
  RunManifest m = RunManifest::load_or_create(paths.manifest_file, run_id, ctx.cfg.snapshot_hash());
  // decoding defaults are whatever the endpoint does; whatever we send is on record
  m.record_decoding(ctx.cfg.decoding);
  return m;
}

inline void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& rows) {
  std::string bytes;
  for (const auto& r : rows) {
    bytes += r.dump();
    bytes += "\n";
  }
  cache::atomic_write(path, bytes);
}

// ---------------------------------------------------------------------------
// corpus stage

struct SeedSpec {
  std::vector<std::string> categories;
  std::set<std::string> seed_articles;
};

// Seeds file: one entry per line, "category: X", "article: Y", or a bare
// category name. '#' comments allowed.
inline SeedSpec parse_seeds_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("seeds file not readable: " + path.string());
  SeedSpec spec;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = str::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (str::starts_with(str::to_lower(t), "category:")) {
      spec.categories.push_back(str::trim(t.substr(9)));
    } else if (str::starts_with(str::to_lower(t), "article:")) {
      spec.seed_articles.insert(str::trim(t.substr(8)));
    } else {
      spec.categories.push_back(t);
    }
  }
  return spec;
}

struct StageStats {
  int done = 0;
  int skipped = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline corpus::CategoryProfile profile_for(corpus::Category c) {
  switch (c) {
    case corpus::Category::biography: return corpus::CategoryProfile::biography;
    case corpus::Category::historical_event: return corpus::CategoryProfile::historical_event;
    default: return corpus::CategoryProfile::news_event;
  }
}

inline nlohmann::json audit_row(const std::string& title, const corpus::FilterVerdict& v) {
  nlohmann::json j;
  j["title"] = title;
  j["stage"] = corpus::to_string(v.stage);
  j["accepted"] = v.accepted;
  j["reason"] = v.reason;
  return j;
}

}  // namespace detail

inline StageStats run_corpus_stage(StageContext& ctx, const std::string& category_name,
                                   const SeedSpec& seeds, int depth) {
  auto cat = corpus::parse_category(category_name);
  if (!cat) throw ConfigError("unknown category: " + category_name);
  OutPaths paths = ctx.paths();
  RunManifest manifest = open_manifest(ctx);
  StageStats stats;
  auto start = std::chrono::steady_clock::now();

  fs::create_directories(paths.corpus_dir);
  fs::path out_file = paths.corpus_dir / (category_name + ".jsonl");
  fs::path audit_file = paths.corpus_dir / (category_name + ".audit.jsonl");

  std::string seed_blob = std::to_string(depth);
  for (const auto& s : seeds.categories) seed_blob += "|" + s;
  for (const auto& s : seeds.seed_articles) seed_blob += "|seed:" + s;
  const std::string item_key = "corpus/" + category_name;
  const std::string input_hash =
      crypto::sha256_hex(category_name + "\n" + seed_blob + "\n" + ctx.cfg.snapshot_hash());

  if (manifest.should_skip(item_key, input_hash, out_file)) {
    stats.skipped = 1;
    manifest.record_stage("corpus:" + category_name, 0, 0, 1);
    manifest.save();
    return stats;
  }

  std::vector<corpus::ArticleRecord> records;
  std::vector<nlohmann::json> audit;

  if (*cat == corpus::Category::scientific_discovery) {
    if (!ctx.nobel_api) throw ConfigError("corpus stage: no prize API configured");
    std::set<std::string> codes = {"phy", "che", "med"};
    auto fetched = corpus::fetch_nobel_prizes(*ctx.nobel_api, codes);
    for (auto& w : fetched.warnings) stats.warnings.push_back(w);
    int target = ctx.cfg.corpus_targets.count(category_name)
                     ? ctx.cfg.corpus_targets.at(category_name)
                     : 25;
    // most recent prizes first when trimming to the target count
    auto& recs = fetched.records;
    if (static_cast<int>(recs.size()) > target)
      recs.erase(recs.begin(), recs.end() - target);
    GatedChatClient generator(ctx.chat, ctx);
    for (const auto& prize : recs) {
      std::string prompt = corpus::build_discovery_prompt(prize);
      ChatResponse resp = generator.complete(ChatRequest(ctx.cfg.chat_model, prompt));
      corpus::ArticleCandidate c;
      c.title = "Nobel Prize in " + corpus::nobel_category_name(prize.category) + " " +
                std::to_string(prize.year);
      c.stripped_text = resp.content;  // stored with no post-processing
      c.word_count = static_cast<int64_t>(str::word_count(resp.content));
      corpus::ArticleRecord r = corpus::make_record(c, *cat, "generator:" + ctx.cfg.chat_model,
                                                    nullptr, ctx.timestamp());
      r.metadata["prize_year"] = prize.year;
      r.metadata["prize_category"] = prize.category;
      r.metadata["laureates"] = prize.laureates;
      r.metadata.erase("page_views");
      r.metadata.erase("is_seed");
      records.push_back(std::move(r));
      audit.push_back(detail::audit_row(records.back().title,
                                        {true, corpus::FilterStage::heuristic, ""}));
    }
  } else if (*cat == corpus::Category::movie_script) {
    throw ConfigError("movie_script articles are imported, not crawled (use corpus import)");
  } else {
    if (!ctx.wiki_client) throw ConfigError("corpus stage: no wiki client configured");
    corpus::CategoryProfile profile = detail::profile_for(*cat);
    auto walk = corpus::walk_categories(seeds.categories, depth, *ctx.wiki_client, profile,
                                        seeds.seed_articles);
    for (auto& w : walk.warnings) stats.warnings.push_back(w);

    GatedChatClient validator(ctx.validator_chat ? ctx.validator_chat : ctx.chat, ctx);
    std::vector<std::pair<corpus::ArticleCandidate, corpus::SemanticOutcome>> accepted;
    for (auto& candidate : walk.candidates) {
      corpus::hydrate_candidate(candidate, *ctx.wiki_client);
      corpus::FilterVerdict h = corpus::apply_heuristic_filters(candidate);
      audit.push_back(detail::audit_row(candidate.title, h));
      if (!h.accepted) continue;
      corpus::FilterVerdict m = corpus::apply_metric_filters(candidate, ctx.cfg.thresholds);
      audit.push_back(detail::audit_row(candidate.title, m));
      if (!m.accepted) continue;
      corpus::SemanticOutcome sem;
      if (profile == corpus::CategoryProfile::biography) {
        sem.verdict = {true, corpus::FilterStage::semantic, ""};
      } else {
        sem = corpus::validate_event_semantics(candidate.stripped_text, candidate.is_seed,
                                               validator, ctx.cfg.validator_model,
                                               ctx.cfg.thresholds);
        audit.push_back(detail::audit_row(candidate.title, sem.verdict));
        if (!sem.verdict.accepted) continue;
      }
      accepted.emplace_back(std::move(candidate), sem);
    }
    std::stable_sort(accepted.begin(), accepted.end(), [](const auto& a, const auto& b) {
      if (a.first.page_views != b.first.page_views) return a.first.page_views > b.first.page_views;
      return a.first.title < b.first.title;
    });
    int target = ctx.cfg.corpus_targets.count(category_name)
                     ? ctx.cfg.corpus_targets.at(category_name)
                     : 150;
    if (static_cast<int>(accepted.size()) > target) accepted.resize(static_cast<size_t>(target));
    for (const auto& [candidate, sem] : accepted) {
      std::string source = "wiki:" + candidate.title;
      records.push_back(corpus::make_record(candidate, *cat, source, &sem, ctx.timestamp()));
    }
  }

  std::vector<nlohmann::json> rows;
  for (const auto& r : records) rows.push_back(corpus::record_to_json(r));
  write_jsonl(out_file, rows);
  write_jsonl(audit_file, audit);
  manifest.record_item(item_key, input_hash, out_file);
  manifest.record_artifact(audit_file);
  stats.done = static_cast<int>(records.size());
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start).count();
  manifest.record_stage("corpus:" + category_name, ms, stats.done, 0);
  manifest.save();
  return stats;
}

// Generic adapter for externally sourced text corpora (e.g. movie scripts):
// every .txt file in the directory becomes one record.
inline StageStats run_corpus_import(StageContext& ctx, const std::string& category_name,
                                    const fs::path& dir) {
  auto cat = corpus::parse_category(category_name);
  if (!cat) throw ConfigError("unknown category: " + category_name);
  if (!fs::is_directory(dir)) throw ConfigError("import directory not found: " + dir.string());
  OutPaths paths = ctx.paths();
  RunManifest manifest = open_manifest(ctx);
  fs::create_directories(paths.corpus_dir);

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<nlohmann::json> rows;
  for (const auto& f : files) {
    auto bytes = cache::read_file(f);
    if (!bytes) continue;
    corpus::ArticleCandidate c;
    c.title = f.stem().string();
    c.stripped_text = *bytes;
    c.word_count = static_cast<int64_t>(str::word_count(*bytes));
    corpus::ArticleRecord r =
        corpus::make_record(c, *cat, "import:" + f.string(), nullptr, ctx.timestamp());
    r.metadata.erase("page_views");
    r.metadata.erase("is_seed");
    rows.push_back(corpus::record_to_json(r));
  }
  fs::path out_file = paths.corpus_dir / (category_name + ".jsonl");
  write_jsonl(out_file, rows);
  manifest.record_item("corpus/" + category_name,
                       crypto::sha256_hex("import\n" + dir.string()), out_file);
  manifest.record_stage("corpus-import:" + category_name, 0, static_cast<int>(rows.size()), 0);
  manifest.save();
  StageStats stats;
  stats.done = static_cast<int>(rows.size());
  return stats;
}

// ---------------------------------------------------------------------------
// extract stage

namespace detail {

inline std::vector<corpus::ArticleRecord> load_corpus(const OutPaths& paths,
                                                      const std::string& category_filter) {
  if (!fs::is_directory(paths.corpus_dir))
    throw StageOrderError("corpus store not found: " + paths.corpus_dir.string() +
                          " (run the corpus stage first)");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(paths.corpus_dir)) {
    if (!e.is_regular_file()) continue;
    std::string name = e.path().filename().string();
    if (name.size() > 12 && name.substr(name.size() - 12) == ".audit.jsonl") continue;
    if (e.path().extension() != ".jsonl") continue;
    if (!category_filter.empty() && name != category_filter + ".jsonl") continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<corpus::ArticleRecord> records;
  for (const auto& f : files)
    for (auto& r : corpus::read_corpus_file(f.string())) records.push_back(std::move(r));
  std::sort(records.begin(), records.end(),
            [](const corpus::ArticleRecord& a, const corpus::ArticleRecord& b) {
              return a.id < b.id;
            });
  return records;
}

// Chunks + vector index for one article, resumable via the manifest.
inline pipeline::VectorIndex ensure_indexed(StageContext& ctx, RunManifest& manifest,
                                            std::mutex& manifest_mu,
                                            const corpus::ArticleRecord& article,
                                            pipeline::CachingEmbedder& embedder) {
  OutPaths paths = ctx.paths();
  fs::create_directories(paths.chunks_dir);
  fs::create_directories(paths.index_dir);
  fs::path chunk_file = paths.chunks_dir / (article.id + ".jsonl");
  fs::path index_file = paths.index_dir / (article.id + ".vec");
  const std::string item_key = "index/" + article.id;
  const std::string input_hash = crypto::sha256_hex(
      article.text + "\n" + std::to_string(ctx.cfg.chunk_size) + "/" +
      std::to_string(ctx.cfg.chunk_overlap) + "\n" + ctx.cfg.embed_model);
  {
    std::lock_guard<std::mutex> lock(manifest_mu);
    if (manifest.should_skip(item_key, input_hash, index_file))
      return pipeline::VectorIndex::load(index_file.string(), article.id);
  }
  auto tokens = pipeline::tokenize(article.text);
  auto chunks =
      pipeline::chunk_document(tokens, article.id, ctx.cfg.chunk_size, ctx.cfg.chunk_overlap);
  std::vector<std::string> texts;
  std::vector<nlohmann::json> rows;
  for (const auto& c : chunks) {
    texts.push_back(c.text);
    rows.push_back({{"article_id", c.article_id},
                    {"ordinal", c.ordinal},
                    {"token_start", c.token_start},
                    {"token_end", c.token_end},
                    {"text", c.text}});
  }
  pipeline::VectorIndex index(0);
  if (!texts.empty()) {
    auto vectors = embedder.embed(texts);
    for (size_t i = 0; i < chunks.size(); ++i)
      index.add({chunks[i].article_id, chunks[i].ordinal}, vectors[i]);
  }
  write_jsonl(chunk_file, rows);
  index.save(index_file.string());
  {
    std::lock_guard<std::mutex> lock(manifest_mu);
    manifest.record_item(item_key, input_hash, index_file);
    manifest.record_artifact(chunk_file);
    manifest.save();
  }
  // search what was persisted: float32 rows, renormalized, so a resumed
  // run sees bit-identical similarities
  return pipeline::VectorIndex::load(index_file.string(), article.id);
}

}  // namespace detail

inline StageStats run_extract_stage(StageContext& ctx, const std::string& category_filter = "",
                                    const std::string& model_filter = "",
                                    events::Mode* mode_override = nullptr) {
  OutPaths paths = ctx.paths();
  auto records = detail::load_corpus(paths, category_filter);
  RunManifest manifest = open_manifest(ctx);
  StageStats stats;
  auto start = std::chrono::steady_clock::now();

  std::vector<std::string> models =
      ctx.cfg.target_models.empty() ? std::vector<std::string>{ctx.cfg.chat_model}
                                    : ctx.cfg.target_models;
  if (!model_filter.empty()) {
    models.erase(std::remove_if(models.begin(), models.end(),
                                [&](const std::string& m) { return m != model_filter; }),
                 models.end());
    if (models.empty()) models.push_back(model_filter);
  }

  auto gated =
      std::make_shared<GatedEmbeddingClient>(ctx.embeddings, ctx.budget, ctx.retry_policy());
  auto embedder = std::make_shared<pipeline::CachingEmbedder>(gated, ctx.cfg.embed_model);
  GatedChatClient chat(ctx.chat, ctx);
  std::mutex manifest_mu;
  std::mutex stats_mu;

  struct WorkItem {
    const corpus::ArticleRecord* article;
    std::string model;
  };
  std::vector<WorkItem> items;
  for (const auto& m : models) {
    fs::create_directories(paths.responses_dir / m);
    for (const auto& r : records) items.push_back({&r, m});
  }

  // per-article indexes built up front (general-mode articles only); the
  // corpus-wide flag folds them into one searchable index instead
  std::map<std::string, pipeline::VectorIndex> indexes;
  pipeline::VectorIndex merged_index;
  std::map<std::string, std::string> article_texts;
  for (const auto& r : records) {
    bool scientific = r.category == corpus::Category::scientific_discovery ||
                      (mode_override && *mode_override == events::Mode::scientific);
    if (scientific) continue;
    article_texts[r.id] = r.text;
    if (!indexes.count(r.id)) {
      pipeline::VectorIndex idx = detail::ensure_indexed(ctx, manifest, manifest_mu, r, *embedder);
      if (ctx.cfg.corpus_wide_retrieval)
        for (size_t i = 0; i < idx.size(); ++i) {
          std::vector<float> row(idx.vector_at(i).begin(), idx.vector_at(i).end());
          merged_index.add(idx.ref_at(i), row);
        }
      indexes.emplace(r.id, std::move(idx));
    }
  }

  parallel_for(items.size(), ctx.cfg.concurrency, [&](size_t i) {
    const auto& item = items[i];
    const auto& article = *item.article;
    fs::path model_dir = paths.responses_dir / item.model;
    fs::path out_file = model_dir / (article.id + ".json");

    events::Mode mode = article.category == corpus::Category::scientific_discovery
                            ? events::Mode::scientific
                            : events::Mode::general;
    if (mode_override) mode = *mode_override;

    const std::string item_key = "extract/" + item.model + "/" + article.id;
    const std::string input_hash = crypto::sha256_hex(
        item.model + "\n" + article.id + "\n" + crypto::sha256_hex(article.text) + "\n" +
        events::to_string(mode) + "\n" + ctx.cfg.snapshot_hash());
    {
      std::lock_guard<std::mutex> lock(manifest_mu);
      if (manifest.should_skip(item_key, input_hash, out_file)) {
        std::lock_guard<std::mutex> slock(stats_mu);
        ++stats.skipped;
        return;
      }
    }

    events::ExtractionConfig ecfg;
    ecfg.mode = mode;
    ecfg.retries = ctx.cfg.retries;
    ecfg.decoding = ctx.cfg.decoding;
    ecfg.n_rewrites = ctx.cfg.n_rewrites;
    ecfg.top_k = ctx.cfg.top_k;
    ecfg.context_token_budget = ctx.cfg.context_token_budget;
    ecfg.chunk_size = ctx.cfg.chunk_size;
    ecfg.chunk_overlap = ctx.cfg.chunk_overlap;
    ecfg.corpus_wide = ctx.cfg.corpus_wide_retrieval;

    nlohmann::json out;
    out["model_id"] = item.model;
    out["article_id"] = article.id;
    out["article_title"] = article.title;
    out["category"] = corpus::to_string(article.category);
    out["mode"] = events::to_string(mode);
    out["created_at"] = ctx.timestamp();
    try {
      const pipeline::VectorIndex* index = nullptr;
      if (mode == events::Mode::general)
        index = ctx.cfg.corpus_wide_retrieval ? &merged_index : &indexes.at(article.id);
      events::ExtractionOutcome outcome =
          events::extract_events(article, chat, item.model, ecfg, embedder.get(), index,
                                 ctx.cfg.question_for(article.title), &article_texts);
      out["retry_count"] = outcome.retry_count;
      out["context_truncated"] = outcome.context_truncated;
      out["rewrite_fallback"] = outcome.rewrite_fallback;
      out["raw_response"] = outcome.list.raw_response;
      out["parsed"] = events::event_list_to_json(outcome.list);
      cache::atomic_write(out_file, out.dump(2) + "\n");
      std::lock_guard<std::mutex> lock(manifest_mu);
      manifest.record_item(item_key, input_hash, out_file);
      if (outcome.context_truncated) manifest.add_flag("truncated:" + item_key);
      if (outcome.rewrite_fallback) manifest.add_flag("rewrite_fallback:" + item_key);
      if (outcome.retry_count > 0)
        manifest.add_flag("retries:" + item_key + ":" + std::to_string(outcome.retry_count));
      manifest.save();
    } catch (const events::ExtractionFailed& e) {
      fs::path failed = model_dir / (article.id + ".failed.json");
      nlohmann::json fail = out;
      fail["error"] = "extraction failed";
      fail["attempts"] = e.attempts;
      fail["last_raw"] = e.last_raw;
      cache::atomic_write(failed, fail.dump(2) + "\n");
      std::lock_guard<std::mutex> lock(manifest_mu);
      manifest.record_item(item_key + ":failed", input_hash, failed);
      manifest.add_flag("failed:" + item_key);
      manifest.save();
    }
    std::lock_guard<std::mutex> lock(stats_mu);
    ++stats.done;
  });

  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start).count();
  manifest.record_stage("extract", ms, stats.done, stats.skipped);
  manifest.save();
  return stats;
}

// ---------------------------------------------------------------------------
// judge stage

inline StageStats run_judge_stage(StageContext& ctx, const std::string& target_filter = "") {
  OutPaths paths = ctx.paths();
  if (!fs::is_directory(paths.responses_dir))
    throw StageOrderError("responses store not found: " + paths.responses_dir.string() +
                          " (run the extract stage first)");
  RunManifest manifest = open_manifest(ctx);
  StageStats stats;
  auto start = std::chrono::steady_clock::now();

  std::vector<fs::path> model_dirs;
  for (const auto& e : fs::directory_iterator(paths.responses_dir))
    if (e.is_directory()) {
      if (!target_filter.empty() && e.path().filename().string() != target_filter) continue;
      model_dirs.push_back(e.path());
    }
  std::sort(model_dirs.begin(), model_dirs.end());

  GatedChatClient judge_chat(ctx.judge_chat ? ctx.judge_chat : ctx.chat, ctx);
  fs::create_directories(paths.verdicts_dir / ctx.cfg.judge_model);

  for (const auto& dir : model_dirs) {
    const std::string target_model = dir.filename().string();
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      std::string name = e.path().filename().string();
      if (e.is_regular_file() && e.path().extension() == ".json" &&
          name.find(".failed.") == std::string::npos)
        files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    std::string blob;
    for (const auto& f : files) blob += f.filename().string() + ":" + hash_file(f) + "\n";
    const std::string item_key = "judge/" + ctx.cfg.judge_model + "/" + target_model;
    const std::string input_hash = crypto::sha256_hex(blob + ctx.cfg.snapshot_hash());
    fs::path out_file = paths.verdicts_dir / ctx.cfg.judge_model / (target_model + ".jsonl");
    if (manifest.should_skip(item_key, input_hash, out_file)) {
      ++stats.skipped;
      continue;
    }

    std::vector<nlohmann::json> rows;
    for (const auto& f : files) {
      auto bytes = cache::read_file(f);
      if (!bytes) continue;
      nlohmann::json j = nlohmann::json::parse(*bytes);
      events::RankedEventList list = events::event_list_from_json(j.at("parsed"));
      std::string title = j.value("article_title", list.article_id);
      judge::PersonalityVerdict v =
          judge::judge_personality(list, title, judge_chat, ctx.cfg.judge_model);
      if (v.unresolved) manifest.add_flag("judge_unresolved:" + target_model + "/" + v.article_id);
      rows.push_back(judge::verdict_to_json(v));
    }
    write_jsonl(out_file, rows);
    manifest.record_item(item_key, input_hash, out_file);
    manifest.save();
    ++stats.done;
  }

  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start).count();
  manifest.record_stage("judge", ms, stats.done, stats.skipped);
  manifest.save();
  return stats;
}

// ---------------------------------------------------------------------------
// analyze stage

namespace detail {

struct ModelInputs {
  std::vector<judge::PersonalityVerdict> verdicts;
  std::vector<std::string> reflective_labels;  // scientific mode outputs
};

inline std::map<std::string, ModelInputs> collect_analysis_inputs(const OutPaths& paths) {
  if (!fs::is_directory(paths.verdicts_dir))
    throw StageOrderError("verdicts store not found: " + paths.verdicts_dir.string() +
                          " (run the judge stage first)");
  std::map<std::string, ModelInputs> inputs;
  for (const auto& judge_dir : fs::directory_iterator(paths.verdicts_dir)) {
    if (!judge_dir.is_directory()) continue;
    for (const auto& e : fs::directory_iterator(judge_dir.path())) {
      if (!e.is_regular_file() || e.path().extension() != ".jsonl") continue;
      std::string model = e.path().stem().string();
      std::ifstream in(e.path());
      std::string line;
      while (std::getline(in, line)) {
        if (str::trim(line).empty()) continue;
        inputs[model].verdicts.push_back(
            judge::verdict_from_json(nlohmann::json::parse(line)));
      }
    }
  }
  if (fs::is_directory(paths.responses_dir)) {
    for (const auto& dir : fs::directory_iterator(paths.responses_dir)) {
      if (!dir.is_directory()) continue;
      std::string model = dir.path().filename().string();
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir.path()))
        if (e.is_regular_file() && e.path().extension() == ".json" &&
            e.path().filename().string().find(".failed.") == std::string::npos)
          files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        auto bytes = cache::read_file(f);
        if (!bytes) continue;
        nlohmann::json j = nlohmann::json::parse(*bytes);
        if (j.contains("parsed") && j["parsed"].contains("reflective_label"))
          inputs[model].reflective_labels.push_back(
              j["parsed"]["reflective_label"].get<std::string>());
      }
    }
  }
  return inputs;
}

}  // namespace detail

inline StageStats run_analyze_stage(StageContext& ctx) {
  OutPaths paths = ctx.paths();
  auto inputs = detail::collect_analysis_inputs(paths);
  RunManifest manifest = open_manifest(ctx);
  StageStats stats;
  auto start = std::chrono::steady_clock::now();
  if (inputs.empty()) throw StageOrderError("no verdicts found to analyze");

  judge::Codebook codebook = judge::load_codebook(ctx.cfg.codebook_path);
  auto gated =
      std::make_shared<GatedEmbeddingClient>(ctx.embeddings, ctx.budget, ctx.retry_policy());
  auto embedder = std::make_shared<pipeline::CachingEmbedder>(gated, ctx.cfg.embed_model);
  std::unique_ptr<GatedChatClient> assist;
  if (ctx.assist_chat) assist = std::make_unique<GatedChatClient>(ctx.assist_chat, ctx);

  std::vector<analysis::ModelProfile> profiles;
  std::vector<analysis::Vec> aggregates;
  std::vector<std::string> ids;
  std::vector<analysis::Vec> trait_vectors;

  for (const auto& [model, in] : inputs) {  // std::map: deterministic id order
    analysis::ModelProfile p;
    p.model_id = model;
    p.categories = analysis::category_distribution(in.verdicts);
    if (p.categories.degenerate) manifest.add_flag("degenerate_distribution:" + model);

    // trait strings: judge raw labels plus reflective labels, lowercased
    // and trimmed; frequency counts identical strings
    std::map<std::string, int64_t> freq;
    for (const auto& v : in.verdicts) {
      std::string t = str::to_lower(str::trim(v.raw_label));
      if (!t.empty()) ++freq[t];
    }
    for (const auto& l : in.reflective_labels) {
      std::string t = str::to_lower(str::trim(l));
      if (!t.empty()) ++freq[t];
    }
    std::vector<analysis::TraitObservation> obs;
    for (const auto& [trait, n] : freq) obs.push_back({model, trait, n});
    if (obs.empty()) {
      manifest.add_flag("no_traits:" + model);
      continue;
    }
    p.aggregate_embedding = analysis::aggregate_trait_embedding(obs, *embedder);
    if (ctx.cfg.trait_background_points) {
      std::vector<std::string> trait_strings;
      for (const auto& [trait, n] : freq) trait_strings.push_back(trait);
      for (const auto& vec : embedder->embed(trait_strings))
        trait_vectors.emplace_back(vec.begin(), vec.end());
    }

    p.codebook_counts = {{judge::CodebookCategory::causality, 0},
                         {judge::CodebookCategory::enablement, 0},
                         {judge::CodebookCategory::synthesis, 0}};
    for (const auto& l : in.reflective_labels) {
      auto c = judge::classify_label(l, codebook, assist.get(), ctx.cfg.assist_model);
      if (c.low_confidence) manifest.add_flag("codebook_low_confidence:" + model + ":" + l);
      ++p.codebook_counts[c.category];
    }

    ids.push_back(model);
    aggregates.push_back(p.aggregate_embedding);
    profiles.push_back(std::move(p));
  }
  if (profiles.empty()) throw StageOrderError("no usable model profiles");

  std::vector<std::pair<double, double>> background;
  if (profiles.size() >= 2) {
    analysis::Projection proj = analysis::project_pca_2d(aggregates, ids);
    if (proj.degenerate) manifest.add_flag("degenerate_projection");
    for (size_t i = 0; i < profiles.size(); ++i) profiles[i].coordinates_2d = proj.coords[i];
    for (const auto& tv : trait_vectors) background.push_back(analysis::project_onto(proj, tv));
  } else {
    manifest.add_flag("single_model_projection");
  }

  analysis::SimilarityMatrix matrix = analysis::similarity_matrix(ids, aggregates);
  report::ReportFiles files = report::emit_report(profiles, matrix, paths.report_dir, background);

  std::string blob = ctx.cfg.snapshot_hash();
  for (const auto& [model, in] : inputs) blob += model + ":" + std::to_string(in.verdicts.size());
  manifest.record_item("analyze", crypto::sha256_hex(blob), files.report_json);
  manifest.record_artifact(files.radar_svg);
  manifest.record_artifact(files.semantic_svg);
  manifest.record_artifact(files.codebook_svg);
  stats.done = static_cast<int>(profiles.size());
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start).count();
  manifest.record_stage("analyze", ms, stats.done, 0);
  manifest.save();
  return stats;
}

// ---------------------------------------------------------------------------
// report stage: re-render the figures from an existing report.json

inline StageStats run_report_stage(StageContext& ctx) {
  OutPaths paths = ctx.paths();
  fs::path report_json = paths.report_dir / "report.json";
  auto bytes = cache::read_file(report_json);
  if (!bytes)
    throw StageOrderError("report.json not found: " + report_json.string() +
                          " (run the analyze stage first)");
  nlohmann::json j = nlohmann::json::parse(*bytes);

  std::vector<analysis::ModelProfile> profiles;
  for (const auto& m : j.at("models")) {
    analysis::ModelProfile p;
    p.model_id = m.at("id").get<std::string>();
    for (auto c : judge::kCanonicalCategories) {
      p.categories.counts[c] = m.at("category_counts").value(judge::json_key(c), int64_t{0});
      p.categories.distribution[c] = m.at("category_distribution").value(judge::json_key(c), 0.0);
    }
    p.coordinates_2d = {m.at("coordinates_2d")[0].get<double>(),
                        m.at("coordinates_2d")[1].get<double>()};
    for (auto c : {judge::CodebookCategory::causality, judge::CodebookCategory::enablement,
                   judge::CodebookCategory::synthesis})
      p.codebook_counts[c] = m.at("codebook_counts").value(judge::to_string(c), int64_t{0});
    profiles.push_back(std::move(p));
  }

  RunManifest manifest = open_manifest(ctx);
  report::write_file(paths.report_dir / "radar.svg", report::render_radar_svg(profiles));
  report::write_file(paths.report_dir / "semantic_space.svg",
                     report::render_semantic_space_svg(profiles));
  report::write_file(paths.report_dir / "codebook.svg", report::render_codebook_svg(profiles));
  manifest.record_artifact(paths.report_dir / "radar.svg");
  manifest.record_artifact(paths.report_dir / "semantic_space.svg");
  manifest.record_artifact(paths.report_dir / "codebook.svg");
  manifest.record_stage("report", 0, static_cast<int>(profiles.size()), 0);
  manifest.save();
  StageStats stats;
  stats.done = static_cast<int>(profiles.size());
  return stats;
}

}  // namespace supernova::run
