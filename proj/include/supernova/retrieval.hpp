#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "supernova/embedding.hpp"
#include "supernova/endpoints.hpp"
#include "supernova/errors.hpp"
#include "supernova/prompts.hpp"
#include "supernova/strings.hpp"
#include "supernova/vector_index.hpp"

namespace supernova::pipeline {

// Numbered-line replies ("1. ...") and bare lines both count as rewrites.
inline std::vector<std::string> parse_rewrites(std::string_view reply, int expected) {
  std::vector<std::string> out;
  for (const auto& raw : str::split_lines(reply)) {
    std::string line = str::trim(raw);
    if (line.empty()) continue;
    size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')'))
      line = str::trim(line.substr(i + 1));
    if (!line.empty()) out.push_back(line);
  }
  if (static_cast<int>(out.size()) > expected) out.resize(static_cast<size_t>(expected));
  return out;
}

struct RetrievalResult {
  std::vector<SearchHit> hits;          // deduplicated, ordered by best similarity
  std::vector<std::string> queries;     // original + accepted rewrites
  bool rewrite_fallback = false;        // rewrites unusable, original-only retrieval
};

// Asks the chat model for query reformulations that stress turning points
// and cascading effects, retrieves top-k per query (within one article by
// default, corpus-wide when unrestricted), and unions the hits keeping each
// chunk's best similarity.
inline RetrievalResult multi_query_retrieve(const std::string& question,
                                            const std::string& article_id, int n_rewrites, int k,
                                            ChatClient& llm, const std::string& chat_model,
                                            CachingEmbedder& embedder, const VectorIndex& index,
                                            bool restrict_to_article = true) {
  if (n_rewrites <= 0) throw PreconditionError("multi_query_retrieve: n_rewrites must be positive");
  if (k <= 0) throw PreconditionError("multi_query_retrieve: k must be positive");

  RetrievalResult result;
  result.queries.push_back(question);

  ChatResponse resp = llm.complete(ChatRequest(chat_model, prompts::render_rewrite_prompt(question, n_rewrites)));
  std::vector<std::string> rewrites = parse_rewrites(resp.content, n_rewrites);
  if (rewrites.empty()) {
    result.rewrite_fallback = true;
  } else {
    for (auto& r : rewrites) result.queries.push_back(std::move(r));
  }

  std::optional<std::string> filter;
  if (restrict_to_article) filter = article_id;
  auto embeddings = embedder.embed(result.queries);
  std::map<ChunkRef, double> best;
  for (const auto& qvec : embeddings) {
    for (const auto& hit : index.search(qvec, k, filter)) {
      auto [it, inserted] = best.emplace(hit.ref, hit.similarity);
      if (!inserted && hit.similarity > it->second) it->second = hit.similarity;
    }
  }
  for (const auto& [ref, sim] : best) result.hits.push_back({ref, sim});
  std::sort(result.hits.begin(), result.hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.ref < b.ref;
  });
  return result;
}

}  // namespace supernova::pipeline
