#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "supernova/chunker.hpp"
#include "supernova/errors.hpp"

namespace supernova::pipeline {

struct ChunkRef {
  std::string article_id;
  int ordinal = 0;

  friend bool operator<(const ChunkRef& a, const ChunkRef& b) {
    if (a.article_id != b.article_id) return a.article_id < b.article_id;
    return a.ordinal < b.ordinal;
  }
  friend bool operator==(const ChunkRef& a, const ChunkRef& b) {
    return a.article_id == b.article_id && a.ordinal == b.ordinal;
  }
};

struct SearchHit {
  ChunkRef ref;
  double similarity = 0.0;
};

inline double l2_norm(const std::vector<float>& v) {
  double s = 0.0;
  for (float x : v) s += double(x) * double(x);
  return std::sqrt(s);
}

inline std::vector<float> unit_normalize(const std::vector<float>& v) {
  double n = l2_norm(v);
  if (n == 0.0) throw PreconditionError("cannot normalize a zero vector");
  std::vector<float> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / n);
  return out;
}

// Normalization happens in double so the stored unit-norm invariant holds
// far tighter than the 1e-9 the index promises; the on-disk rows stay
// float32 and get renormalized on load.
inline std::vector<double> unit_normalize_double(const std::vector<float>& v) {
  double s = 0.0;
  for (float x : v) s += double(x) * double(x);
  double n = std::sqrt(s);
  if (n == 0.0) throw PreconditionError("cannot normalize a zero vector");
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = double(v[i]) / n;
  return out;
}

// Exact full-scan cosine index over unit vectors. Desk-scale corpora make
// the exhaustive scan both free and byte-deterministic.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  size_t size() const { return refs_.size(); }
  bool empty() const { return refs_.empty(); }
  const ChunkRef& ref_at(size_t i) const { return refs_[i]; }
  const std::vector<double>& vector_at(size_t i) const { return vectors_[i]; }

  void add(const ChunkRef& ref, const std::vector<float>& vector) {
    if (vector.empty()) throw PreconditionError("index add: empty vector");
    if (dim_ == 0) dim_ = static_cast<int>(vector.size());
    if (static_cast<int>(vector.size()) != dim_)
      throw ConfigError("index add: dimension mismatch");
    for (float x : vector)
      if (!std::isfinite(x)) throw PreconditionError("index add: non-finite entry");
    refs_.push_back(ref);
    vectors_.push_back(unit_normalize_double(vector));
  }

  // Top-k by cosine similarity, descending; ties broken by ascending
  // (article_id, ordinal). k larger than the index returns everything.
  std::vector<SearchHit> search(const std::vector<float>& query, int k,
                                const std::optional<std::string>& article_filter =
                                    std::nullopt) const {
    if (k <= 0) throw PreconditionError("index search: k must be positive");
    if (empty()) return {};
    if (static_cast<int>(query.size()) != dim_)
      throw ConfigError("index search: query dimension mismatch");
    std::vector<double> q = unit_normalize_double(query);
    std::vector<SearchHit> hits;
    hits.reserve(refs_.size());
    for (size_t i = 0; i < refs_.size(); ++i) {
      if (article_filter && refs_[i].article_id != *article_filter) continue;
      double dot = 0.0;
      const auto& v = vectors_[i];
      for (size_t j = 0; j < v.size(); ++j) dot += q[j] * v[j];
      hits.push_back({refs_[i], dot});
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.ref < b.ref;
    });
    if (static_cast<int>(hits.size()) > k) hits.resize(static_cast<size_t>(k));
    return hits;
  }

  // Persistence: magic "SNVI", dim as little-endian u32, then float32 rows
  // (little-endian). Ordinals are row positions; the article id comes from
  // the file name.
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("index save: cannot open " + path);
    out.write("SNVI", 4);
    uint32_t d = static_cast<uint32_t>(dim_);
    unsigned char hdr[4] = {static_cast<unsigned char>(d & 0xFF),
                            static_cast<unsigned char>((d >> 8) & 0xFF),
                            static_cast<unsigned char>((d >> 16) & 0xFF),
                            static_cast<unsigned char>((d >> 24) & 0xFF)};
    out.write(reinterpret_cast<const char*>(hdr), 4);
    static_assert(sizeof(float) == 4);
    std::vector<float> row;
    for (const auto& v : vectors_) {
      row.assign(v.begin(), v.end());
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * 4));
    }
  }

  static VectorIndex load(const std::string& path, const std::string& article_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StageOrderError("index file not found: " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "SNVI", 4) != 0)
      throw ConfigError("index load: bad magic in " + path);
    unsigned char hdr[4];
    in.read(reinterpret_cast<char*>(hdr), 4);
    if (in.gcount() != 4) throw ConfigError("index load: truncated header in " + path);
    uint32_t d = uint32_t(hdr[0]) | (uint32_t(hdr[1]) << 8) | (uint32_t(hdr[2]) << 16) |
                 (uint32_t(hdr[3]) << 24);
    if (d == 0) throw ConfigError("index load: zero dimension in " + path);
    VectorIndex idx(static_cast<int>(d));
    std::vector<float> row(d);
    int ordinal = 0;
    while (in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(d * 4))) {
      idx.refs_.push_back({article_id, ordinal++});
      // float32 quantization nudges the norm; restore it on the way in
      idx.vectors_.push_back(unit_normalize_double(row));
    }
    return idx;
  }

 private:
  int dim_ = 0;
  std::vector<ChunkRef> refs_;
  std::vector<std::vector<double>> vectors_;
};

}  // namespace supernova::pipeline
