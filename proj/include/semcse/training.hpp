#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semcse/corpus.hpp"
#include "semcse/encoder.hpp"
#include "semcse/error.hpp"
#include "semcse/losses.hpp"
#include "semcse/ranking.hpp"
#include "semcse/rng.hpp"
#include "semcse/text.hpp"
#include "semcse/vocab.hpp"

namespace semcse {

enum class TrainMode { full, just_summaries, same_input };
enum class PositiveKind { summary, title, abstract_sentence };

inline std::string_view to_string(TrainMode m) {
  switch (m) {
    case TrainMode::full: return "full";
    case TrainMode::just_summaries: return "just-summaries";
    case TrainMode::same_input: return "same-input";
  }
  return "?";
}

inline TrainMode parse_mode(std::string_view s) {
  if (s == "full") return TrainMode::full;
  if (s == "just-summaries" || s == "just_summaries") return TrainMode::just_summaries;
  if (s == "same-input" || s == "same_input") return TrainMode::same_input;
  throw Error("unknown mode \"" + std::string(s) + "\" (expected full|just-summaries|same-input)");
}

inline std::string_view to_string(PositiveKind k) {
  switch (k) {
    case PositiveKind::summary: return "summary";
    case PositiveKind::title: return "title";
    case PositiveKind::abstract_sentence: return "abstract_sentence";
  }
  return "?";
}

/// Probabilities of drawing each kind of positive.
struct PositiveMix {
  double summary = 0.50;
  double title = 0.15;
  double abstract_sentence = 0.35;
};

struct TrainConfig {
  // Objective
  double margin = 1.0;
  Distance distance = Distance::euclidean;  // euclidean: triplet loss; cosine: softmax loss
  double temperature = 0.07;
  double l2_weight = 1.0 / 250.0;
  std::size_t batch_pairs = 32;
  PositiveMix positive_mix{};
  TrainMode mode = TrainMode::full;

  // Schedule
  std::size_t eval_every = 1000;
  std::size_t patience = 15;
  std::size_t max_batches = 50000;  // hard cap; 0 evaluates the initial model only

  // Adam
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Encoder and data
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  std::size_t output_dim = 32;
  double dropout = 0.1;
  std::size_t min_count = 1;
  double val_frac = 0.1;

  std::uint64_t seed = 7;

  /// Throws on the first violated invariant.
  void validate() const {
    const auto fail = [](const std::string& msg) { throw Error("invalid training config: " + msg); };
    const double mix_sum = positive_mix.summary + positive_mix.title + positive_mix.abstract_sentence;
    if (positive_mix.summary < 0 || positive_mix.title < 0 || positive_mix.abstract_sentence < 0 ||
        std::abs(mix_sum - 1.0) > 1e-12) {
      fail("positive mix must be nonnegative and sum to 1");
    }
    if (!(temperature > 0.0)) fail("temperature must be > 0");
    if (!(margin >= 0.0)) fail("margin must be >= 0");
    if (!(l2_weight >= 0.0)) fail("l2 weight must be >= 0");
    if (batch_pairs < 2) fail("batch_pairs must be >= 2 for in-batch negatives");
    if (eval_every < 1) fail("eval_every must be >= 1");
    if (!(learning_rate > 0.0)) fail("learning rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("Adam decays must lie in [0, 1)");
    if (!(epsilon > 0.0)) fail("Adam epsilon must be > 0");
    if (embed_dim < 1 || hidden_dim < 1 || output_dim < 1) fail("encoder dimensions must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
    if (!(val_frac > 0.0 && val_frac < 1.0)) fail("val_frac must lie in (0, 1)");
  }
};

/// Texts of the training documents, pre-split for sampling.
struct TrainingDoc {
  std::string title;
  std::vector<std::string> sentences;
  std::vector<std::string> summaries;
};

inline std::vector<TrainingDoc> training_docs(const Corpus& corpus) {
  std::vector<TrainingDoc> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    TrainingDoc d;
    d.title = corpus[i].title;
    d.sentences = split_sentences(corpus[i].abstract);
    for (const auto s : corpus.summaries_of(i)) {
      d.summaries.emplace_back(s);
    }
    out.push_back(std::move(d));
  }
  return out;
}

struct TrainingPair {
  std::size_t doc_index = 0;
  std::string anchor_text;
  std::string positive_text;
  PositiveKind positive_kind = PositiveKind::summary;
};

/// Draws batch_pairs distinct documents; for each, a uniformly chosen summary
/// as anchor and a positive whose kind follows the configured mix.
inline std::vector<TrainingPair> sample_batch(const std::vector<TrainingDoc>& docs, const TrainConfig& config,
                                              Rng& rng) {
  if (docs.size() < config.batch_pairs) {
    throw Error("corpus of " + std::to_string(docs.size()) + " documents is smaller than batch_pairs = " +
                std::to_string(config.batch_pairs));
  }
  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::vector<TrainingPair> batch;
  batch.reserve(config.batch_pairs);
  for (std::size_t b = 0; b < config.batch_pairs; ++b) {
    const std::size_t j = b + rng.below(order.size() - b);
    std::swap(order[b], order[j]);
    const std::size_t di = order[b];
    const auto& doc = docs[di];
    if (doc.summaries.empty()) {
      throw Error("document " + std::to_string(di) + " has no summary to use as anchor");
    }
    TrainingPair pair;
    pair.doc_index = di;
    const std::size_t anchor = rng.below(doc.summaries.size());
    pair.anchor_text = doc.summaries[anchor];

    PositiveKind kind = PositiveKind::summary;
    if (config.mode == TrainMode::full) {
      const double u = rng.uniform();
      const auto& mix = config.positive_mix;
      if (u < mix.summary) {
        kind = PositiveKind::summary;
      } else if (u < mix.summary + mix.title) {
        kind = PositiveKind::title;
      } else {
        kind = PositiveKind::abstract_sentence;
      }
    }
    pair.positive_kind = kind;

    if (config.mode == TrainMode::same_input) {
      pair.positive_text = pair.anchor_text;
    } else if (kind == PositiveKind::summary) {
      if (doc.summaries.size() < 2) {
        throw Error("document " + std::to_string(di) + " lacks a second summary for a positive pair");
      }
      std::size_t other = rng.below(doc.summaries.size() - 1);
      if (other >= anchor) {
        ++other;
      }
      pair.positive_text = doc.summaries[other];
    } else if (kind == PositiveKind::title) {
      pair.positive_text = doc.title;
    } else {
      pair.positive_text = doc.sentences[rng.below(doc.sentences.size())];
    }
    batch.push_back(std::move(pair));
  }
  return batch;
}

struct LossBreakdown {
  double contrastive = 0.0;
  double l2_penalty = 0.0;
  double total = 0.0;
  double active_triplet_fraction = 0.0;
};

struct LossAndGradient {
  LossBreakdown loss;
  EncoderParams gradient;
};

/// Tokenized batch: anchors[i] pairs with positives[i].
struct TokenBatch {
  std::vector<TokenSequence> anchors;
  std::vector<TokenSequence> positives;
};

inline TokenBatch tokenize_batch(const Vocabulary& vocab, const std::vector<TrainingPair>& pairs) {
  TokenBatch out;
  for (const auto& p : pairs) {
    out.anchors.push_back(tokenize(vocab, p.anchor_text));
    out.positives.push_back(tokenize(vocab, p.positive_text));
    if (out.anchors.back().empty() || out.positives.back().empty()) {
      throw Error("training text without tokens in document " + std::to_string(p.doc_index));
    }
  }
  return out;
}

/// Seed of the dropout mask for text t of a batch (anchors even, positives odd).
inline std::uint64_t text_dropout_seed(std::uint64_t batch_seed, std::size_t t) {
  return splitmix64_mix(batch_seed + static_cast<std::uint64_t>(t));
}

/// Loss of one batch and its gradient with respect to every parameter.
/// With a dropout seed, anchor i uses mask seed text_dropout_seed(seed, 2i)
/// and positive i uses text_dropout_seed(seed, 2i+1); without one, dropout is off.
inline LossAndGradient loss_and_gradients(const EncoderParams& params, const TokenBatch& batch,
                                          const TrainConfig& config,
                                          std::optional<std::uint64_t> dropout_seed = std::nullopt) {
  const std::size_t n = batch.anchors.size();
  if (n != batch.positives.size() || n < 2) {
    throw Error("a batch needs at least 2 anchor/positive pairs");
  }
  std::vector<ForwardTrace> a_trace;
  std::vector<ForwardTrace> p_trace;
  std::vector<EmbeddingVector> anchors;
  std::vector<EmbeddingVector> positives;
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::uint64_t> seed_a;
    std::optional<std::uint64_t> seed_p;
    if (dropout_seed.has_value()) {
      seed_a = text_dropout_seed(dropout_seed.value(), 2 * i);
      seed_p = text_dropout_seed(dropout_seed.value(), 2 * i + 1);
    }
    a_trace.push_back(forward(params, batch.anchors[i], seed_a));
    p_trace.push_back(forward(params, batch.positives[i], seed_p));
    anchors.push_back(a_trace.back().output);
    positives.push_back(p_trace.back().output);
  }

  const EmbeddingLoss contrastive = config.distance == Distance::euclidean
                                        ? triplet_batch_loss(anchors, positives, config.margin)
                                        : cosine_softmax_batch_loss(anchors, positives, config.temperature);
  const EmbeddingLoss l2 = l2_penalty_loss(anchors, config.l2_weight);

  LossAndGradient out{{}, params.zeros_like()};
  out.loss.contrastive = contrastive.value;
  out.loss.l2_penalty = l2.value;
  out.loss.total = contrastive.value + l2.value;
  out.loss.active_triplet_fraction =
      contrastive.terms == 0 ? 0.0 : static_cast<double>(contrastive.active) / static_cast<double>(contrastive.terms);
  if (!std::isfinite(out.loss.total)) {
    throw Error("non-finite training loss");
  }

  std::vector<double> g;
  for (std::size_t i = 0; i < n; ++i) {
    g = contrastive.d_anchors[i];
    for (std::size_t k = 0; k < g.size(); ++k) {
      g[k] += l2.d_anchors[i][k];
    }
    backward(params, a_trace[i], g, out.gradient);
    backward(params, p_trace[i], contrastive.d_positives[i], out.gradient);
  }
  if (!out.gradient.all_finite()) {
    throw Error("non-finite gradient");
  }
  return out;
}

/// Adam with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n, double lr, double beta1, double beta2, double epsilon)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(n, 0.0), v_(n, 0.0) {}

  void step(EncoderParams& params, const EncoderParams& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto w = params.flat();
    const auto g = grad.flat();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g[i] * g[i];
      w[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
  }

  [[nodiscard]] std::size_t steps() const noexcept { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace semcse
