#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "semcse/encoder.hpp"
#include "semcse/error.hpp"

namespace semcse {

inline double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) {
    s += x * x;
  }
  return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error("cosine similarity of a zero-norm embedding");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// max(0, d_pos - d_neg + margin)
[[nodiscard]] constexpr double triplet_loss(double d_pos, double d_neg, double margin) noexcept {
  return std::max(0.0, d_pos - d_neg + margin);
}

/// A loss value with its gradient with respect to every anchor and positive
/// embedding of the batch.
struct EmbeddingLoss {
  double value = 0.0;
  std::vector<EmbeddingVector> d_anchors;
  std::vector<EmbeddingVector> d_positives;
  std::size_t active = 0;  // hinge terms (or ranking violations) that are positive
  std::size_t terms = 0;   // number of triplets considered
};

namespace detail {

inline void check_batch(std::span<const EmbeddingVector> anchors, std::span<const EmbeddingVector> positives) {
  if (anchors.size() != positives.size()) {
    throw Error("anchor and positive counts differ");
  }
  if (anchors.size() < 2) {
    throw Error("in-batch negatives need at least 2 pairs");
  }
  const std::size_t dim = anchors[0].size();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].size() != dim || positives[i].size() != dim) {
      throw Error("embeddings in a batch must share one dimension");
    }
  }
}

inline std::vector<EmbeddingVector> zeros(std::size_t n, std::size_t dim) {
  return std::vector<EmbeddingVector>(n, EmbeddingVector(dim, 0.0));
}

// Adds scale * (a - b) / ||a - b|| to out; nothing when the points coincide.
inline void add_unit_direction(std::span<double> out, std::span<const double> a, std::span<const double> b,
                               double dist, double scale) {
  if (dist == 0.0) {
    return;
  }
  const double f = scale / dist;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] += f * (a[k] - b[k]);
  }
}

}  // namespace detail

/// Euclidean triplet loss with in-batch negatives: the positive of every other
/// pair is a negative for anchor i, giving |B|-1 triplets per pair, averaged
/// per anchor and then over the batch. Gradients use subgradient 0 at the
/// hinge kink and at zero distance.
inline EmbeddingLoss triplet_batch_loss(std::span<const EmbeddingVector> anchors,
                                        std::span<const EmbeddingVector> positives, double margin) {
  detail::check_batch(anchors, positives);
  const std::size_t n = anchors.size();
  const std::size_t dim = anchors[0].size();
  EmbeddingLoss out;
  out.d_anchors = detail::zeros(n, dim);
  out.d_positives = detail::zeros(n, dim);
  out.terms = n * (n - 1);
  const double coef = 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1));

  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      dist[i * n + j] = euclidean_distance(anchors[i], positives[j]);
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d_pos = dist[i * n + i];
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      const double d_neg = dist[i * n + j];
      const double l = triplet_loss(d_pos, d_neg, margin);
      row += l;
      if (l > 0.0) {
        ++out.active;
        detail::add_unit_direction(out.d_anchors[i], anchors[i], positives[i], d_pos, coef);
        detail::add_unit_direction(out.d_positives[i], positives[i], anchors[i], d_pos, coef);
        detail::add_unit_direction(out.d_anchors[i], anchors[i], positives[j], d_neg, -coef);
        detail::add_unit_direction(out.d_positives[j], positives[j], anchors[i], d_neg, -coef);
      }
    }
    total += row / static_cast<double>(n - 1);
  }
  out.value = total / static_cast<double>(n);
  return out;
}

/// Batch loss value only.
inline double batch_loss(std::span<const EmbeddingVector> anchors, std::span<const EmbeddingVector> positives,
                         double margin) {
  return triplet_batch_loss(anchors, positives, margin).value;
}

/// weight * mean_i ||anchor_i||^2, with gradient 2 * weight * anchor_i / n.
inline EmbeddingLoss l2_penalty_loss(std::span<const EmbeddingVector> anchors, double weight) {
  EmbeddingLoss out;
  if (anchors.empty()) {
    return out;
  }
  const double n = static_cast<double>(anchors.size());
  double total = 0.0;
  for (const auto& a : anchors) {
    total += squared_norm(a);
    auto& g = out.d_anchors.emplace_back(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      g[k] = 2.0 * weight * a[k] / n;
    }
  }
  out.value = weight * total / n;
  return out;
}

inline double l2_penalty(std::span<const EmbeddingVector> anchors, double weight) {
  return l2_penalty_loss(anchors, weight).value;
}

/// Softmax cross-entropy over cosine similarities scaled by 1/temperature;
/// positive j = i is the target for anchor i. `active` counts in-batch
/// negatives at least as similar to the anchor as its positive.
inline EmbeddingLoss cosine_softmax_batch_loss(std::span<const EmbeddingVector> anchors,
                                               std::span<const EmbeddingVector> positives, double temperature) {
  detail::check_batch(anchors, positives);
  if (!(temperature > 0.0)) {
    throw Error("temperature must be > 0");
  }
  const std::size_t n = anchors.size();
  const std::size_t dim = anchors[0].size();
  EmbeddingLoss out;
  out.d_anchors = detail::zeros(n, dim);
  out.d_positives = detail::zeros(n, dim);
  out.terms = n * (n - 1);

  std::vector<double> a_norm(n);
  std::vector<double> p_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    a_norm[i] = std::sqrt(squared_norm(anchors[i]));
    p_norm[i] = std::sqrt(squared_norm(positives[i]));
    if (a_norm[i] == 0.0 || p_norm[i] == 0.0) {
      throw Error("cosine loss is undefined for a zero-norm embedding");
    }
  }

  std::vector<double> cos(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        dot += anchors[i][k] * positives[j][k];
      }
      cos[i * n + j] = dot / (a_norm[i] * p_norm[j]);
    }
  }

  double total = 0.0;
  std::vector<double> prob(n);
  for (std::size_t i = 0; i < n; ++i) {
    double max_logit = cos[i * n] / temperature;
    for (std::size_t j = 1; j < n; ++j) {
      max_logit = std::max(max_logit, cos[i * n + j] / temperature);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      prob[j] = std::exp(cos[i * n + j] / temperature - max_logit);
      sum += prob[j];
    }
    const double log_z = max_logit + std::log(sum);
    total += log_z - cos[i * n + i] / temperature;

    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && cos[i * n + j] >= cos[i * n + i]) {
        ++out.active;
      }
      // d(row loss)/d(cos_ij), then chain through the cosine.
      const double g = (prob[j] / sum - (i == j ? 1.0 : 0.0)) / (temperature * static_cast<double>(n));
      if (g == 0.0) {
        continue;
      }
      const double c = cos[i * n + j];
      const double inv_ap = 1.0 / (a_norm[i] * p_norm[j]);
      const double inv_aa = c / (a_norm[i] * a_norm[i]);
      const double inv_pp = c / (p_norm[j] * p_norm[j]);
      for (std::size_t k = 0; k < dim; ++k) {
        out.d_anchors[i][k] += g * (positives[j][k] * inv_ap - anchors[i][k] * inv_aa);
        out.d_positives[j][k] += g * (anchors[i][k] * inv_ap - positives[j][k] * inv_pp);
      }
    }
  }
  out.value = total / static_cast<double>(n);
  return out;
}

inline double cosine_softmax_loss(std::span<const EmbeddingVector> anchors, std::span<const EmbeddingVector> positives,
                                  double temperature) {
  return cosine_softmax_batch_loss(anchors, positives, temperature).value;
}

}  // namespace semcse
