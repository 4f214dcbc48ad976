// Minimal library tour: parse a model reply, judge it, classify a
// reflective label, and emit report artifacts for two toy models.

#include <cstdio>

#include "supernova/analysis.hpp"
#include "supernova/codebook.hpp"
#include "supernova/events.hpp"
#include "supernova/judge.hpp"
#include "supernova/mock_backend.hpp"
#include "supernova/report.hpp"

using namespace supernova;

int main(int argc, char** argv) {
  const std::string codebook_path = argc > 1 ? argv[1] : "codebook/labels.tsv";
  const std::string reply =
      "1. Reactor breakthrough \xE2\x80\x93 the prototype reached criticality\n"
      "2. Funding collapse \xE2\x80\x93 the program nearly ended\n"
      "3. International treaty \xE2\x80\x93 oversight rules were agreed\n"
      "4. First grid connection \xE2\x80\x93 power flowed to the city\n"
      "5. Safety review \xE2\x80\x93 the design was certified\n"
      "\nThe breakthrough made everything downstream possible.\n"
      "\nLabel: Enabling Breakthroughs\n";

  auto parsed = events::parse_ranked_events(reply, events::Mode::scientific);
  if (!parsed.ok()) {
    std::fprintf(stderr, "parse failed\n");
    return 1;
  }
  std::printf("parsed %zu events; label = %s\n", parsed.list->events.size(),
              parsed.list->reflective_label->c_str());

  parsed.list->model_id = "demo-model";
  parsed.list->article_id = "demo-article";
  mock::MockChatClient judge_chat({{"", "", {"Strategic"}, "", false}});
  auto verdict = judge::judge_personality(*parsed.list, "Demo Event", judge_chat, "demo-judge");
  std::printf("judge verdict: %s\n", judge::display_name(verdict.category));

  auto codebook = judge::load_codebook(codebook_path);
  auto cls = judge::classify_label(*parsed.list->reflective_label, codebook);
  std::printf("codebook class: %s\n", judge::to_string(cls.category));

  auto embeddings = std::make_shared<mock::HashEmbeddingClient>(16, 1);
  pipeline::CachingEmbedder embedder(embeddings, "demo-embed");

  std::vector<analysis::ModelProfile> profiles;
  std::vector<analysis::Vec> aggregates;
  std::vector<std::string> ids;
  int flavor = 0;
  for (const std::string model : {"demo-model", "other-model"}) {
    analysis::ModelProfile p;
    p.model_id = model;
    judge::PersonalityVerdict v;
    v.category = flavor ? judge::PersonalityCategory::Emotional
                        : judge::PersonalityCategory::Strategic;
    p.categories = analysis::category_distribution({v, v});
    p.aggregate_embedding = analysis::aggregate_trait_embedding(
        {{model, flavor ? "warm empath" : "cold strategist", 2}}, embedder);
    p.codebook_counts[cls.category] = 1;
    ids.push_back(model);
    aggregates.push_back(p.aggregate_embedding);
    profiles.push_back(std::move(p));
    ++flavor;
  }
  auto proj = analysis::project_pca_2d(aggregates, ids);
  for (size_t i = 0; i < profiles.size(); ++i) profiles[i].coordinates_2d = proj.coords[i];
  auto matrix = analysis::similarity_matrix(ids, aggregates);
  auto files = report::emit_report(profiles, matrix, "demo_report");
  std::printf("wrote %s\n", files.report_json.string().c_str());
  return 0;
}
