#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semcse/encoder.hpp"
#include "semcse/error.hpp"
#include "semcse/losses.hpp"

namespace semcse {

enum class Distance { euclidean, cosine };

inline std::string_view to_string(Distance d) { return d == Distance::euclidean ? "euclidean" : "cosine"; }

inline Distance parse_distance(std::string_view s) {
  if (s == "euclidean") {
    return Distance::euclidean;
  }
  if (s == "cosine") {
    return Distance::cosine;
  }
  throw Error("unknown distance \"" + std::string(s) + "\" (expected euclidean|cosine)");
}

/// Euclidean distance, or 1 - cosine similarity.
inline double distance(Distance kind, std::span<const double> a, std::span<const double> b) {
  return kind == Distance::euclidean ? euclidean_distance(a, b) : 1.0 - cosine_similarity(a, b);
}

/// Keyed embeddings from one source, in insertion order.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(std::string source, std::size_t dim = 0) : source_(std::move(source)), dim_(dim) {}

  void add(std::string key, EmbeddingVector vec) {
    if (dim_ == 0) {
      dim_ = vec.size();
    }
    if (vec.size() != dim_ || dim_ == 0) {
      throw Error("embedding \"" + key + "\" has dimension " + std::to_string(vec.size()) + ", expected " +
                  std::to_string(dim_));
    }
    for (const double v : vec) {
      if (!std::isfinite(v)) {
        throw Error("embedding \"" + key + "\" has a non-finite component");
      }
    }
    if (!index_.emplace(key, keys_.size()).second) {
      throw Error("duplicate embedding key \"" + key + "\"");
    }
    keys_.push_back(std::move(key));
    vectors_.push_back(std::move(vec));
  }

  [[nodiscard]] const std::string& source() const noexcept { return source_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }
  [[nodiscard]] bool empty() const noexcept { return keys_.empty(); }
  [[nodiscard]] const std::string& key(std::size_t i) const { return keys_.at(i); }
  [[nodiscard]] const EmbeddingVector& vector(std::size_t i) const { return vectors_.at(i); }
  [[nodiscard]] const std::vector<std::string>& keys() const noexcept { return keys_; }
  [[nodiscard]] const std::vector<EmbeddingVector>& vectors() const noexcept { return vectors_; }

  [[nodiscard]] std::optional<std::size_t> find(const std::string& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) {
      return std::nullopt;
    }
    return it->second;
  }

 private:
  std::string source_;
  std::size_t dim_ = 0;
  std::vector<std::string> keys_;
  std::vector<EmbeddingVector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Query key -> key of its correct candidate. Ordered, so reductions run in
/// key order.
using MatchMap = std::map<std::string, std::string>;

inline MatchMap identity_matches(const EmbeddingSet& queries) {
  MatchMap m;
  for (const auto& k : queries.keys()) {
    m.emplace(k, k);
  }
  return m;
}

/// Rank of the correct candidate for one query vector: 1 + candidates strictly
/// closer + equidistant candidates whose key sorts before the match.
inline std::size_t rank_of_match(std::span<const double> query, const EmbeddingSet& candidates,
                                 std::size_t match, Distance kind) {
  const double d_match = distance(kind, query, candidates.vector(match));
  const std::string& match_key = candidates.key(match);
  std::size_t rank = 1;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (c == match) {
      continue;
    }
    const double d = distance(kind, query, candidates.vector(c));
    if (d < d_match || (d == d_match && candidates.key(c) < match_key)) {
      ++rank;
    }
  }
  return rank;
}

/// Mean rank at which each query retrieves its match; 1 is perfect.
inline double average_rank(const EmbeddingSet& queries, const EmbeddingSet& candidates, const MatchMap& matches,
                           Distance kind) {
  if (queries.empty() || candidates.empty() || matches.empty()) {
    throw Error("average_rank needs nonempty query and candidate pools");
  }
  if (queries.dim() != candidates.dim()) {
    throw Error("query dimension " + std::to_string(queries.dim()) + " differs from candidate dimension " +
                std::to_string(candidates.dim()));
  }
  double total = 0.0;
  for (const auto& [q_key, c_key] : matches) {
    const auto q = queries.find(q_key);
    if (!q) {
      throw Error("match refers to unknown query \"" + q_key + "\"");
    }
    const auto c = candidates.find(c_key);
    if (!c) {
      throw Error("query \"" + q_key + "\" has no candidate \"" + c_key + "\"");
    }
    total += static_cast<double>(rank_of_match(queries.vector(*q), candidates, *c, kind));
  }
  return total / static_cast<double>(matches.size());
}

/// Indices of the k nearest candidates, nearest first; ties broken by key.
inline std::vector<std::size_t> k_nearest(std::span<const double> query, const EmbeddingSet& candidates, std::size_t k,
                                          Distance kind) {
  if (k > candidates.size()) {
    throw Error("k = " + std::to_string(k) + " exceeds the pool of " + std::to_string(candidates.size()));
  }
  std::vector<double> dist(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    dist[c] = distance(kind, query, candidates.vector(c));
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  const auto closer = [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) {
      return dist[a] < dist[b];
    }
    return candidates.key(a) < candidates.key(b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
  order.resize(k);
  return order;
}

}  // namespace semcse
