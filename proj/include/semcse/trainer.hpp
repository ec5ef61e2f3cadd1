#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "semcse/benchmark.hpp"
#include "semcse/corpus.hpp"
#include "semcse/encoder.hpp"
#include "semcse/error.hpp"
#include "semcse/ranking.hpp"
#include "semcse/rng.hpp"
#include "semcse/training.hpp"
#include "semcse/vocab.hpp"

namespace semcse {

struct ValidationMetrics {
  double summary_to_summary_rank = 0.0;
  double mean_summary_to_doc_rank = 0.0;
};

/// Two retrieval checks over the validation pool: the first summary of each
/// document retrieves the second; the mean of both summary embeddings
/// retrieves the title+abstract text. Model selection uses the second.
template <TextEmbedder Embed>
ValidationMetrics validation_metrics(const Embed& embed, const Corpus& validation,
                                     Distance kind = Distance::euclidean) {
  if (validation.empty()) {
    throw Error("validation split is empty");
  }
  EmbeddingSet first("validation");
  EmbeddingSet second("validation");
  EmbeddingSet mean("validation");
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const auto summaries = validation.summaries_of(i);
    if (summaries.size() < 2) {
      throw Error("validation document \"" + validation[i].id + "\" has fewer than 2 summaries");
    }
    auto e1 = embed(summaries[0]);
    auto e2 = embed(summaries[1]);
    EmbeddingVector m(e1.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      m[k] = (e1[k] + e2[k]) / 2.0;
    }
    first.add(validation[i].id, std::move(e1));
    second.add(validation[i].id, std::move(e2));
    mean.add(validation[i].id, std::move(m));
  }
  const auto docs = embed_field(embed, validation, Field::title_abstract).set;
  const auto matches = identity_matches(first);
  return {average_rank(first, second, matches, kind), average_rank(mean, docs, matches, kind)};
}

struct LogRecord {
  std::size_t batch = 0;
  std::size_t epoch = 0;
  double loss = 0.0;
  double l2 = 0.0;
  double active_fraction = 0.0;
  double val_rank_s2s = 0.0;
  double val_rank_s2d = 0.0;
  bool best = false;
};

inline nlohmann::ordered_json to_json(const LogRecord& r) {
  nlohmann::ordered_json j;
  j["batch"] = r.batch;
  j["epoch"] = r.epoch;
  j["loss"] = r.loss;
  j["l2"] = r.l2;
  j["active_fraction"] = r.active_fraction;
  j["val_rank_s2s"] = r.val_rank_s2s;
  j["val_rank_s2d"] = r.val_rank_s2d;
  j["best"] = r.best;
  return j;
}

inline void write_log(const std::vector<LogRecord>& log, std::ostream& out) {
  for (const auto& r : log) {
    out << to_json(r).dump() << '\n';
  }
}

struct TrainResult {
  Model best;
  Model last;
  std::vector<LogRecord> log;
  std::size_t batches = 0;
  std::string stop_reason;
};

struct DataSplit {
  Corpus train;
  Corpus validation;
};

/// Last ceil(val_frac * n) documents form the validation split.
inline DataSplit split_for_training(const Corpus& corpus, double val_frac) {
  const auto n_val = static_cast<std::size_t>(std::ceil(val_frac * static_cast<double>(corpus.size())));
  if (n_val < 1 || n_val >= corpus.size()) {
    throw Error("validation split of " + std::to_string(n_val) + " documents leaves no training data");
  }
  return {corpus.slice(0, corpus.size() - n_val), corpus.slice(corpus.size() - n_val, corpus.size())};
}

/// Untrained model for a corpus: vocabulary from the training split and
/// freshly initialized weights, exactly as train() starts.
inline Model initial_model(const Corpus& train_split, const TrainConfig& config) {
  auto vocab = build_vocab(train_split, config.min_count);
  const EncoderDims dims{vocab.size(), config.embed_dim, config.hidden_dim, config.output_dim};
  return Model{std::move(vocab), init_params(dims, config.dropout, config.seed)};
}

/// Called after each evaluation with the record just appended.
using TrainObserver = std::function<void(const LogRecord&)>;

/// Optimizes the encoder on the training split. The initial model is
/// evaluated at batch 0, then every eval_every batches. The parameters with
/// the lowest summary-to-document validation rank are kept. Training stops
/// once evaluations in more than `patience` distinct epochs fail to improve
/// on the best rank, or after max_batches batches.
inline TrainResult train(const Corpus& corpus, const TrainConfig& config, const TrainObserver& observer = {}) {
  config.validate();
  const auto split = split_for_training(corpus, config.val_frac);
  const auto docs = training_docs(split.train);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::size_t needed = config.mode == TrainMode::same_input ? 1 : 2;
    if (docs[i].summaries.size() < needed) {
      throw Error("training document \"" + split.train[i].id + "\" has fewer than " + std::to_string(needed) +
                  " summaries");
    }
  }
  if (docs.size() < config.batch_pairs) {
    throw Error("training split of " + std::to_string(docs.size()) + " documents is smaller than batch_pairs = " +
                std::to_string(config.batch_pairs));
  }

  Model model = initial_model(split.train, config);
  AdamOptimizer adam(model.params.size(), config.learning_rate, config.beta1, config.beta2, config.epsilon);
  Rng sampling = Rng::stream(config.seed, "sampling");
  Rng dropout = Rng::stream(config.seed, "dropout");
  const std::size_t epoch_len = (docs.size() + config.batch_pairs - 1) / config.batch_pairs;
  const auto epoch_of = [&](std::size_t batch) { return batch == 0 ? 0 : (batch - 1) / epoch_len + 1; };

  TrainResult result;
  double best_rank = 0.0;
  std::set<std::size_t> stagnant_epochs;
  double loss_sum = 0.0;
  double l2_sum = 0.0;
  double active_sum = 0.0;
  std::size_t since_eval = 0;

  const auto evaluate = [&](std::size_t batch) {
    LogRecord rec;
    rec.batch = batch;
    rec.epoch = epoch_of(batch);
    const auto m = validation_metrics(embedder_of(model), split.validation, config.distance);
    rec.val_rank_s2s = m.summary_to_summary_rank;
    rec.val_rank_s2d = m.mean_summary_to_doc_rank;
    if (since_eval > 0) {
      rec.loss = loss_sum / static_cast<double>(since_eval);
      rec.l2 = l2_sum / static_cast<double>(since_eval);
      rec.active_fraction = active_sum / static_cast<double>(since_eval);
    } else {
      // Batch 0: loss of the untrained encoder on a probe batch, no dropout.
      Rng probe = Rng::stream(config.seed, "probe");
      const auto pairs = sample_batch(docs, config, probe);
      const auto lg = loss_and_gradients(model.params, tokenize_batch(model.vocab, pairs), config);
      rec.loss = lg.loss.total;
      rec.l2 = lg.loss.l2_penalty;
      rec.active_fraction = lg.loss.active_triplet_fraction;
    }
    loss_sum = l2_sum = active_sum = 0.0;
    since_eval = 0;
    if (result.log.empty() || rec.val_rank_s2d < best_rank) {
      rec.best = true;
      best_rank = rec.val_rank_s2d;
      result.best = model;
      stagnant_epochs.clear();
    } else {
      stagnant_epochs.insert(rec.epoch);
    }
    result.log.push_back(rec);
    if (observer) {
      observer(rec);
    }
  };

  evaluate(0);
  std::size_t batch = 0;
  while (true) {
    if (batch >= config.max_batches) {
      result.stop_reason = "batch budget exhausted";
      break;
    }
    ++batch;
    const auto pairs = sample_batch(docs, config, sampling);
    const auto lg = loss_and_gradients(model.params, tokenize_batch(model.vocab, pairs), config, dropout.next());
    adam.step(model.params, lg.gradient);
    loss_sum += lg.loss.total;
    l2_sum += lg.loss.l2_penalty;
    active_sum += lg.loss.active_triplet_fraction;
    ++since_eval;

    const bool budget_end = batch == config.max_batches;
    if (batch % config.eval_every == 0 || budget_end) {
      evaluate(batch);
      if (stagnant_epochs.size() > config.patience) {
        result.stop_reason = "no improvement in " + std::to_string(stagnant_epochs.size()) + " epochs";
        break;
      }
    }
  }
  result.batches = batch;
  result.last = std::move(model);
  return result;
}

}  // namespace semcse
