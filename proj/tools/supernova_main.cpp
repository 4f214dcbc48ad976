#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "supernova/config.hpp"
#include "supernova/http_client.hpp"
#include "supernova/stages.hpp"

namespace {

using namespace supernova;

run::StageContext make_context(const config::PipelineConfig& cfg) {
  if (cfg.offline) return run::make_offline_context(cfg);

  run::StageContext ctx;
  ctx.cfg = cfg;
  if (cfg.chat_url.empty())
    throw ConfigError("online mode needs endpoints.chat_url (or SUPERNOVA_CHAT_URL)");
  ctx.chat = std::make_shared<net::HttpChatClient>(cfg.chat_url, cfg.api_key);
  ctx.judge_chat = ctx.chat;
  ctx.validator_chat = ctx.chat;
  if (!cfg.assist_model.empty()) ctx.assist_chat = ctx.chat;
  if (cfg.embed_url.empty())
    throw ConfigError("online mode needs endpoints.embed_url (or SUPERNOVA_EMBED_URL)");
  ctx.embeddings = std::make_shared<net::HttpEmbeddingClient>(cfg.embed_url, cfg.api_key);
  ctx.disk_cache = std::make_shared<cache::DiskCache>(cfg.cache_dir);
  ctx.budget = std::make_shared<run::RequestBudget>(cfg.concurrency);
  auto gate = std::make_shared<run::PolitenessGate>(
      std::chrono::milliseconds(cfg.politeness_delay_ms));
  net::PoliteGetter getter(ctx.disk_cache, gate, ctx.budget);
  ctx.wiki_client = std::make_shared<net::HttpWikiClient>(
      cfg.wiki_api_url, cfg.wiki_pageviews_template, cfg.wiki_quality_template, getter);
  ctx.nobel_api = std::make_shared<net::HttpNobelApi>(cfg.nobel_api_url, getter);
  return ctx;
}

void print_stats(const std::string& stage, const run::StageStats& stats) {
  std::printf("%s: %d done, %d skipped\n", stage.c_str(), stats.done, stats.skipped);
  for (const auto& w : stats.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical-event corpus, extraction, judging, and trait analytics pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir, cache_dir;
  uint64_t seed = 0;
  bool seed_set = false, offline = false;
  app.add_option("--config", config_path, "TOML-style key/value config file");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--cache", cache_dir, "cache directory (overrides config)");
  app.add_option("--seed", seed, "random seed (overrides config)")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_flag("--offline", offline, "use mock backends from fixture scripts");

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "build or import the article corpus");
  corpus_cmd->fallthrough();
  auto* corpus_build = corpus_cmd->add_subcommand("build", "crawl, filter, and persist articles");
  auto* corpus_import = corpus_cmd->add_subcommand("import", "ingest a directory of .txt files");
  corpus_cmd->require_subcommand(0, 1);
  std::string category, seeds_path, import_dir;
  int depth = 1;
  corpus_cmd->add_option("--category", category, "category to build")->required();
  corpus_cmd->add_option("--seeds", seeds_path, "seeds file (categories and seed articles)");
  corpus_cmd->add_option("--depth", depth, "subcategory walk depth");
  corpus_cmd->add_option("--dir", import_dir, "directory of .txt files (import)");
  corpus_cmd->add_option("--out", out_dir, "output directory");

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "extract and rank critical events");
  extract_cmd->fallthrough();
  std::string model_filter, mode_name, extract_category;
  int retries_override = -1;
  extract_cmd->add_option("--model", model_filter, "target model id");
  extract_cmd->add_option("--category", extract_category, "restrict to one category");
  extract_cmd->add_option("--mode", mode_name, "general|scientific (default: by category)");
  extract_cmd->add_option("--retries", retries_override, "repair attempts on malformed replies");

  // judge
  auto* judge_cmd = app.add_subcommand("judge", "classify responses into personality categories");
  judge_cmd->fallthrough();
  std::string judge_model, target_model, assist_model;
  judge_cmd->add_option("--judge-model", judge_model, "judge model id");
  judge_cmd->add_option("--target", target_model, "target model to judge");
  judge_cmd->add_option("--assist-model", assist_model, "assist model for codebook ties");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "aggregate verdicts into model profiles");
  analyze_cmd->fallthrough();
  std::string verdicts_in, report_out;
  analyze_cmd->add_option("--in", verdicts_in, "verdicts directory (defaults to <out>/verdicts)");
  analyze_cmd->add_option("--out", report_out, "report directory (defaults to <out>/report)");

  // report
  auto* report_cmd = app.add_subcommand("report", "re-render figures from report.json");
  report_cmd->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    config::PipelineConfig cfg = config_path.empty()
                                     ? config::config_from_map({})
                                     : config::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (seed_set) cfg.seed = seed;
    if (offline) cfg.offline = true;
    if (retries_override >= 0) cfg.retries = retries_override;
    if (!judge_model.empty()) cfg.judge_model = judge_model;
    if (!assist_model.empty()) cfg.assist_model = assist_model;
    cfg.validate();

    run::StageContext ctx = make_context(cfg);

    if (corpus_cmd->parsed()) {
      if (corpus_import->parsed() && import_dir.empty())
        throw ConfigError("corpus import needs --dir");
      (void)corpus_build;
      if (!import_dir.empty()) {
        print_stats("corpus import " + category,
                    run::run_corpus_import(ctx, category, import_dir));
      } else {
        run::SeedSpec seeds;
        if (!seeds_path.empty()) seeds = run::parse_seeds_file(seeds_path);
        if (seeds.categories.empty() && category != "scientific_discovery")
          throw ConfigError("corpus build needs --seeds with at least one category");
        print_stats("corpus " + category, run::run_corpus_stage(ctx, category, seeds, depth));
      }
    } else if (extract_cmd->parsed()) {
      events::Mode mode = events::Mode::general;
      events::Mode* mode_ptr = nullptr;
      if (!mode_name.empty()) {
        if (mode_name == "scientific") mode = events::Mode::scientific;
        else if (mode_name != "general") throw ConfigError("mode must be general or scientific");
        mode_ptr = &mode;
      }
      print_stats("extract", run::run_extract_stage(ctx, extract_category, model_filter, mode_ptr));
    } else if (judge_cmd->parsed()) {
      print_stats("judge", run::run_judge_stage(ctx, target_model));
    } else if (analyze_cmd->parsed()) {
      // --in/--out remap onto the out-dir layout when given explicitly
      if (!verdicts_in.empty()) {
        std::filesystem::path p(verdicts_in);
        if (p.filename() == "verdicts") cfg.out_dir = p.parent_path().string();
        ctx.cfg = cfg;
      }
      print_stats("analyze", run::run_analyze_stage(ctx));
      if (!report_out.empty()) {
        std::filesystem::path dest(report_out);
        std::filesystem::create_directories(dest);
        if (!std::filesystem::equivalent(dest, ctx.paths().report_dir)) {
          for (const char* f : {"report.json", "radar.svg", "semantic_space.svg", "codebook.svg"})
            std::filesystem::copy_file(ctx.paths().report_dir / f, dest / f,
                                       std::filesystem::copy_options::overwrite_existing);
        }
      }
    } else if (report_cmd->parsed()) {
      print_stats("report", run::run_report_stage(ctx));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
