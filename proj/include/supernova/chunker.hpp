#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "supernova/errors.hpp"
#include "supernova/strings.hpp"

namespace supernova::pipeline {

struct Chunk {
  std::string article_id;
  int ordinal = 0;
  int64_t token_start = 0;
  int64_t token_end = 0;  // exclusive
  std::string text;
};

inline std::vector<std::string> tokenize(std::string_view text) { return str::tokenize(text); }

// Sliding windows with stride (size - overlap). A trailing window fully
// contained in its predecessor is dropped, so short tails never produce a
// duplicate-content chunk.
inline std::vector<Chunk> chunk_document(const std::vector<std::string>& tokens,
                                         const std::string& article_id, int size = 1000,
                                         int overlap = 100) {
  if (size <= 0 || overlap < 0 || overlap >= size)
    throw PreconditionError("chunk_document: require 0 <= overlap < size");
  std::vector<Chunk> out;
  const int64_t n = static_cast<int64_t>(tokens.size());
  const int64_t stride = size - overlap;
  for (int64_t start = 0; start < n; start += stride) {
    int64_t end = std::min<int64_t>(start + size, n);
    if (!out.empty() && end <= out.back().token_end) break;
    Chunk c;
    c.article_id = article_id;
    c.ordinal = static_cast<int>(out.size());
    c.token_start = start;
    c.token_end = end;
    std::string text;
    for (int64_t i = start; i < end; ++i) {
      if (i > start) text.push_back(' ');
      text += tokens[static_cast<size_t>(i)];
    }
    c.text = std::move(text);
    out.push_back(std::move(c));
    if (end == n) break;
  }
  return out;
}

}  // namespace supernova::pipeline
