#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "supernova/embedding.hpp"
#include "supernova/errors.hpp"
#include "supernova/codebook.hpp"
#include "supernova/judge.hpp"
#include "supernova/strings.hpp"

namespace supernova::analysis {

using Vec = std::vector<double>;

struct TraitObservation {
  std::string model_id;
  std::string trait;   // raw label string, lowercased and trimmed
  int64_t frequency = 0;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

inline double cosine_similarity(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw PreconditionError("cosine: dimension mismatch");
  if (a.empty()) throw PreconditionError("cosine: empty vectors");
  double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw PreconditionError("cosine: zero vector");
  return dot(a, b) / (na * nb);
}

// Frequency-weighted mean of the distinct trait embeddings, then unit
// normalized. Each distinct trait string is embedded exactly once.
inline Vec aggregate_trait_embedding(const std::vector<TraitObservation>& observations,
                                     pipeline::CachingEmbedder& embedder) {
  if (observations.empty())
    throw PreconditionError("aggregate_trait_embedding: no observations");
  std::vector<std::string> traits;
  std::vector<int64_t> freqs;
  for (const auto& obs : observations) {
    if (obs.frequency < 1) throw PreconditionError("aggregate_trait_embedding: frequency < 1");
    auto it = std::find(traits.begin(), traits.end(), obs.trait);
    if (it == traits.end()) {
      traits.push_back(obs.trait);
      freqs.push_back(obs.frequency);
    } else {
      freqs[static_cast<size_t>(it - traits.begin())] += obs.frequency;
    }
  }
  auto embedded = embedder.embed(traits);
  const size_t dim = embedded.front().size();
  Vec acc(dim, 0.0);
  double total = 0.0;
  for (size_t i = 0; i < traits.size(); ++i) {
    for (size_t j = 0; j < dim; ++j) acc[j] += double(freqs[i]) * double(embedded[i][j]);
    total += double(freqs[i]);
  }
  for (auto& x : acc) x /= total;
  double n = norm(acc);
  if (n == 0.0) throw ConfigError("aggregate embedding collapsed to zero");
  for (auto& x : acc) x /= n;
  return acc;
}

// ---------------------------------------------------------------------------
// PCA

namespace detail {

struct EigenResult {
  std::vector<double> values;            // descending
  std::vector<Vec> vectors;              // vectors[i] pairs with values[i]
};

// Cyclic Jacobi for symmetric matrices. Plenty for the few-hundred
// dimensional covariance matrices this pipeline sees.
inline EigenResult jacobi_eigen(std::vector<Vec> a) {
  const size_t n = a.size();
  std::vector<Vec> v(n, Vec(n, 0.0));
  for (size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  auto off_diag = [&]() {
    double s = 0.0;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) s += a[p][q] * a[p][q];
    return std::sqrt(s);
  };
  double scale = 0.0;
  for (size_t p = 0; p < n; ++p)
    for (size_t q = 0; q < n; ++q) scale += a[p][q] * a[p][q];
  scale = std::sqrt(scale);
  const double tol = (scale > 0 ? scale : 1.0) * 1e-15;

  for (int sweep = 0; sweep < 100 && off_diag() > tol; ++sweep) {
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) <= tol * 1e-2) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (size_t k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (size_t k = 0; k < n; ++k) {
          double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t x, size_t y) { return a[x][x] > a[y][y]; });
  EigenResult r;
  for (size_t i : order) {
    r.values.push_back(a[i][i]);
    Vec col(n);
    for (size_t k = 0; k < n; ++k) col[k] = v[k][i];
    r.vectors.push_back(std::move(col));
  }
  return r;
}

// Fixed orientation: the largest-magnitude loading of each component is
// made positive (first occurrence wins ties).
inline void apply_sign_convention(Vec& component) {
  size_t best = 0;
  for (size_t i = 1; i < component.size(); ++i)
    if (std::abs(component[i]) > std::abs(component[best])) best = i;
  if (component[best] < 0)
    for (auto& x : component) x = -x;
}

}  // namespace detail

struct Projection {
  std::vector<std::string> labels;
  std::vector<std::pair<double, double>> coords;
  bool degenerate = false;  // all inputs identical
  Vec mean;                 // centering offset
  std::vector<Vec> components;  // up to two rows; empty row = zero coordinate
};

inline std::pair<double, double> project_onto(const Projection& p, const Vec& v) {
  if (p.mean.empty() || v.size() != p.mean.size()) return {0.0, 0.0};
  Vec centered(v.size());
  for (size_t i = 0; i < v.size(); ++i) centered[i] = v[i] - p.mean[i];
  double x = (p.components.size() > 0 && !p.components[0].empty()) ? dot(centered, p.components[0])
                                                                   : 0.0;
  double y = (p.components.size() > 1 && !p.components[1].empty()) ? dot(centered, p.components[1])
                                                                   : 0.0;
  return {x, y};
}

// Mean-centered projection onto the top-2 eigenvectors of the sample
// covariance. Rank-deficient data gets zero for the missing coordinate.
inline Projection project_pca_2d(const std::vector<Vec>& vectors,
                                 const std::vector<std::string>& labels) {
  if (vectors.size() < 2) throw PreconditionError("pca: need at least 2 vectors");
  if (labels.size() != vectors.size()) throw PreconditionError("pca: labels/vectors mismatch");
  const size_t m = vectors.size();
  const size_t d = vectors.front().size();
  if (d < 2) throw PreconditionError("pca: need at least 2 dimensions");
  for (const auto& v : vectors)
    if (v.size() != d) throw PreconditionError("pca: ragged input");

  Projection out;
  out.labels = labels;

  Vec mean(d, 0.0);
  for (const auto& v : vectors)
    for (size_t j = 0; j < d; ++j) mean[j] += v[j];
  for (auto& x : mean) x /= double(m);

  std::vector<Vec> centered(m, Vec(d));
  double max_dev = 0.0;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < d; ++j) {
      centered[i][j] = vectors[i][j] - mean[j];
      max_dev = std::max(max_dev, std::abs(centered[i][j]));
    }
  out.mean = mean;
  if (max_dev == 0.0) {
    out.degenerate = true;
    out.coords.assign(m, {0.0, 0.0});
    out.components.assign(2, Vec{});
    return out;
  }

  std::vector<Vec> cov(d, Vec(d, 0.0));
  for (size_t i = 0; i < m; ++i)
    for (size_t p = 0; p < d; ++p)
      for (size_t q = 0; q < d; ++q) cov[p][q] += centered[i][p] * centered[i][q];
  for (auto& row : cov)
    for (auto& x : row) x /= double(m - 1);

  auto eig = detail::jacobi_eigen(cov);
  const double lead = std::max(eig.values[0], 0.0);
  std::vector<Vec> components;
  for (size_t k = 0; k < 2; ++k) {
    if (k < eig.values.size() && eig.values[k] > lead * 1e-12 && eig.values[k] > 0.0) {
      Vec comp = eig.vectors[k];
      detail::apply_sign_convention(comp);
      components.push_back(std::move(comp));
    } else {
      components.emplace_back();  // rank-deficient: coordinate pinned to 0
    }
  }

  for (size_t i = 0; i < m; ++i) {
    double x = components[0].empty() ? 0.0 : dot(centered[i], components[0]);
    double y = components[1].empty() ? 0.0 : dot(centered[i], components[1]);
    out.coords.emplace_back(x, y);
  }
  out.components = std::move(components);
  return out;
}

// ---------------------------------------------------------------------------
// Distributions and profiles

struct CategoryDistribution {
  std::map<judge::PersonalityCategory, int64_t> counts;
  std::map<judge::PersonalityCategory, double> distribution;
  bool degenerate = false;  // no countable verdicts
};

// Counts per canonical category; Unknown is excluded by contract.
inline CategoryDistribution category_distribution(
    const std::vector<judge::PersonalityVerdict>& verdicts) {
  CategoryDistribution out;
  for (auto c : judge::kCanonicalCategories) {
    out.counts[c] = 0;
    out.distribution[c] = 0.0;
  }
  int64_t total = 0;
  for (const auto& v : verdicts) {
    if (v.category == judge::PersonalityCategory::Unknown) continue;
    ++out.counts[v.category];
    ++total;
  }
  if (total == 0) {
    out.degenerate = true;
    return out;
  }
  for (auto c : judge::kCanonicalCategories)
    out.distribution[c] = double(out.counts[c]) / double(total);
  return out;
}

struct ModelProfile {
  std::string model_id;
  CategoryDistribution categories;
  Vec aggregate_embedding;
  std::pair<double, double> coordinates_2d{0.0, 0.0};
  std::map<judge::CodebookCategory, int64_t> codebook_counts;
};

struct SimilarityMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::vector<double>> values;
};

inline SimilarityMatrix similarity_matrix(const std::vector<std::string>& ids,
                                          const std::vector<Vec>& aggregates) {
  if (ids.size() != aggregates.size())
    throw PreconditionError("similarity_matrix: ids/aggregates mismatch");
  SimilarityMatrix m;
  m.model_ids = ids;
  const size_t n = ids.size();
  m.values.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      double s = cosine_similarity(aggregates[i], aggregates[j]);
      m.values[i][j] = s;
      m.values[j][i] = s;
    }
  }
  return m;
}

}  // namespace supernova::analysis
