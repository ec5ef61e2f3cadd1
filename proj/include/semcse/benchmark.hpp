#pragma once

// Semantic embedding benchmark: three ranking tasks (title -> abstract, first
// half -> second half of an abstract, query -> paper), k-NN category purity,
// and the cross-source normalized overall score.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <functional>
#include <cstddef>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semcse/corpus.hpp"
#include "semcse/encoder.hpp"
#include "semcse/error.hpp"
#include "semcse/ranking.hpp"
#include "semcse/text.hpp"

namespace semcse {

template <typename F>
concept TextEmbedder = requires(const F& f, std::string_view text) {
  { f(text) } -> std::convertible_to<EmbeddingVector>;
};

inline auto embedder_of(const Model& model) {
  return [&model](std::string_view text) { return model.embed(text); };
}

// --- Embedding fields -------------------------------------------------------

enum class Field { title, abstract, title_abstract, summary, query, half1, half2 };

inline constexpr std::array<Field, 7> kAllFields = {Field::title,   Field::abstract, Field::title_abstract,
                                                    Field::summary, Field::query,    Field::half1,
                                                    Field::half2};

inline std::string_view to_string(Field f) {
  switch (f) {
    case Field::title: return "title";
    case Field::abstract: return "abstract";
    case Field::title_abstract: return "title-abstract";
    case Field::summary: return "summary";
    case Field::query: return "query";
    case Field::half1: return "half1";
    case Field::half2: return "half2";
  }
  return "?";
}

inline Field parse_field(std::string_view s) {
  for (const auto f : kAllFields) {
    if (to_string(f) == s) {
      return f;
    }
  }
  throw Error("unknown field \"" + std::string(s) + "\"");
}

/// Text of one field of document i, or nothing when the document has none
/// (no query, no summary, or an abstract that cannot be halved).
inline std::optional<std::string> field_text(const Corpus& corpus, std::size_t i, Field f) {
  const auto& d = corpus[i];
  switch (f) {
    case Field::title: return d.title;
    case Field::abstract: return d.abstract;
    case Field::title_abstract: return d.title_abstract();
    case Field::summary: {
      const auto s = corpus.summaries_of(i);
      if (s.empty()) {
        return std::nullopt;
      }
      return std::string(s.front());
    }
    case Field::query: return d.query;
    case Field::half1:
    case Field::half2: {
      if (split_sentences(d.abstract).size() < 2) {
        return std::nullopt;
      }
      auto halves = split_abstract_halves(d.abstract);
      return f == Field::half1 ? std::move(halves.first) : std::move(halves.second);
    }
  }
  return std::nullopt;
}

struct FieldEmbeddings {
  EmbeddingSet set;
  std::size_t skipped = 0;
};

/// Embeds one field for every document that has it, keyed by document id.
template <TextEmbedder Embed>
FieldEmbeddings embed_field(const Embed& embed, const Corpus& corpus, Field f, std::string source = "") {
  FieldEmbeddings out{EmbeddingSet(std::move(source)), 0};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto text = field_text(corpus, i, f);
    if (!text) {
      ++out.skipped;
      continue;
    }
    out.set.add(corpus[i].id, embed(*text));
  }
  return out;
}

// --- Tasks ------------------------------------------------------------------

enum class Task { title_abstract, abstract_segments, query, clustering };
enum class Direction { lower_better, higher_better };

inline constexpr std::array<Task, 4> kAllTasks = {Task::title_abstract, Task::abstract_segments, Task::query,
                                                  Task::clustering};

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::title_abstract: return "title_abstract";
    case Task::abstract_segments: return "abstract_segments";
    case Task::query: return "query";
    case Task::clustering: return "clustering";
  }
  return "?";
}

inline Direction direction_of(Task t) {
  return t == Task::clustering ? Direction::higher_better : Direction::lower_better;
}

struct TaskResult {
  Task task = Task::title_abstract;
  double raw_score = 0.0;
  Direction direction = Direction::lower_better;
  std::size_t n = 0;
  std::size_t excluded = 0;
};

inline TaskResult score_matching(Task task, const EmbeddingSet& queries, const EmbeddingSet& candidates,
                                 Distance kind, std::size_t excluded = 0) {
  if (queries.empty()) {
    throw Error(std::string(to_string(task)) + ": no queries to rank");
  }
  TaskResult r;
  r.task = task;
  r.direction = Direction::lower_better;
  r.raw_score = average_rank(queries, candidates, identity_matches(queries), kind);
  r.n = queries.size();
  r.excluded = excluded;
  return r;
}

/// Category purity of the k nearest training items, averaged over test items.
inline TaskResult score_clustering(const EmbeddingSet& train, const EmbeddingSet& test,
                                   const std::map<std::string, std::string>& labels, std::size_t k, Distance kind) {
  if (test.empty()) {
    throw Error("clustering: empty test pool");
  }
  if (train.size() < k) {
    throw Error("clustering: training pool of " + std::to_string(train.size()) + " is smaller than k = " +
                std::to_string(k));
  }
  if (train.dim() != test.dim()) {
    throw Error("clustering: train and test dimensions differ");
  }
  const auto label_of = [&](const std::string& key) -> const std::string& {
    const auto it = labels.find(key);
    if (it == labels.end()) {
      throw Error("clustering: document \"" + key + "\" has no category");
    }
    return it->second;
  };
  for (const auto& key : train.keys()) {
    label_of(key);
  }
  // Sum in key order.
  std::map<std::string, double> purity;
  for (std::size_t t = 0; t < test.size(); ++t) {
    const auto& want = label_of(test.key(t));
    std::size_t same = 0;
    for (const auto c : k_nearest(test.vector(t), train, k, kind)) {
      if (label_of(train.key(c)) == want) {
        ++same;
      }
    }
    purity[test.key(t)] = static_cast<double>(same) / static_cast<double>(k);
  }
  double total = 0.0;
  for (const auto& [key, p] : purity) {
    total += p;
  }
  TaskResult r;
  r.task = Task::clustering;
  r.direction = Direction::higher_better;
  r.raw_score = total / static_cast<double>(test.size());
  r.n = test.size();
  return r;
}

inline std::map<std::string, std::string> category_labels(const Corpus& corpus) {
  std::map<std::string, std::string> out;
  for (const auto& d : corpus.documents()) {
    if (!d.category) {
      throw Error("clustering: document \"" + d.id + "\" has no category");
    }
    out.emplace(d.id, *d.category);
  }
  return out;
}

template <TextEmbedder Embed>
TaskResult task_title_abstract(const Embed& embed, const Corpus& docs, Distance kind = Distance::euclidean) {
  if (docs.empty()) {
    throw Error("title_abstract: no documents");
  }
  return score_matching(Task::title_abstract, embed_field(embed, docs, Field::title).set,
                        embed_field(embed, docs, Field::abstract).set, kind);
}

template <TextEmbedder Embed>
TaskResult task_abstract_segments(const Embed& embed, const Corpus& docs, Distance kind = Distance::euclidean) {
  auto first = embed_field(embed, docs, Field::half1);
  if (first.set.empty()) {
    throw Error("abstract_segments: every abstract has fewer than two sentences");
  }
  return score_matching(Task::abstract_segments, first.set, embed_field(embed, docs, Field::half2).set, kind,
                        first.skipped);
}

template <TextEmbedder Embed>
TaskResult task_query(const Embed& embed, const Corpus& docs, Distance kind = Distance::euclidean) {
  auto queries = embed_field(embed, docs, Field::query);
  if (queries.set.empty()) {
    throw Error("query: no document carries a query");
  }
  return score_matching(Task::query, queries.set, embed_field(embed, docs, Field::title_abstract).set, kind,
                        queries.skipped);
}

template <TextEmbedder Embed>
TaskResult task_clustering(const Embed& embed, const Corpus& train_docs, const Corpus& test_docs, std::size_t k = 5,
                           Distance kind = Distance::euclidean) {
  auto labels = category_labels(train_docs);
  labels.merge(category_labels(test_docs));
  return score_clustering(embed_field(embed, train_docs, Field::title_abstract).set,
                          embed_field(embed, test_docs, Field::title_abstract).set, labels, k, kind);
}

struct GeneralizationProbe {
  double rank_full = 0.0;
  double rank_title_only = 0.0;
  double rank_abstract_only = 0.0;
};

/// First summary of each document retrieves the document as title+abstract,
/// title only, and abstract only.
template <TextEmbedder Embed>
GeneralizationProbe generalization_probe(const Embed& embed, const Corpus& docs, Distance kind = Distance::euclidean) {
  const auto queries = embed_field(embed, docs, Field::summary);
  if (queries.skipped > 0) {
    throw Error("generalization probe: every document needs at least one summary");
  }
  const auto rank = [&](Field f) {
    return average_rank(queries.set, embed_field(embed, docs, f).set, identity_matches(queries.set), kind);
  };
  return {rank(Field::title_abstract), rank(Field::title), rank(Field::abstract)};
}

// --- Normalization ----------------------------------------------------------

struct NormalizedScores {
  std::vector<std::pair<std::string, double>> scores;
  std::optional<std::string> warning;
};

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

/// Maps raw scores of one task onto [0, 1]: the best source gets 1, the
/// median 0.5, others lie on the line through those two points, clamped.
/// When the best value equals the median, sources at the best value get 1
/// and all others 0.
inline NormalizedScores normalize_scores(const std::vector<std::pair<std::string, double>>& raw, Direction dir) {
  if (raw.size() < 2) {
    throw Error("normalization needs at least 2 sources");
  }
  std::vector<double> values;
  for (const auto& [name, v] : raw) {
    if (!std::isfinite(v)) {
      throw Error("non-finite raw score for source \"" + name + "\"");
    }
    values.push_back(v);
  }
  NormalizedScores out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    out.warning = "all sources have identical raw scores; every source normalized to 1";
    for (const auto& [name, v] : raw) {
      out.scores.emplace_back(name, 1.0);
    }
    return out;
  }
  const double best = dir == Direction::higher_better ? *hi : *lo;
  const double med = median_of(values);
  for (const auto& [name, v] : raw) {
    double score = 0.0;
    if (v == best) {
      score = 1.0;
    } else if (best == med) {
      score = 0.0;
    } else {
      score = std::clamp(0.5 + 0.5 * (v - med) / (best - med), 0.0, 1.0);
    }
    out.scores.emplace_back(name, score);
  }
  return out;
}

// --- Report -----------------------------------------------------------------

struct SourceScores {
  std::string source;
  std::vector<TaskResult> results;  // subset of kAllTasks, in that order
};

struct BenchReport {
  std::string distance;
  std::vector<SourceScores> sources;
  // Present only with two or more sources: per source, normalized score per
  // task (same order as results) and the overall mean.
  std::optional<std::vector<std::vector<double>>> normalized;
  std::optional<std::vector<double>> overall;
  std::vector<std::string> warnings;
};

/// Embeddings of one field over a benchmark corpus, from a model or a file.
using FieldProvider = std::function<FieldEmbeddings(Field)>;

template <TextEmbedder Embed>
FieldProvider model_fields(const Embed& embed, const Corpus& corpus, std::string source) {
  return [embed, &corpus, source](Field f) { return embed_field(embed, corpus, f, source); };
}

/// Number of trailing documents held out as clustering test items.
inline std::size_t clustering_test_count(std::size_t n_docs, double test_frac, std::size_t k) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) {
    throw Error("test_frac must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(std::ceil(test_frac * static_cast<double>(n_docs)));
  if (n_test < 1 || n_docs - std::min(n_test, n_docs) < k) {
    throw Error("clustering split of " + std::to_string(n_docs) + " documents leaves fewer than k = " +
                std::to_string(k) + " training documents");
  }
  return n_test;
}

/// All four tasks for one source. Retrieval tasks use every document;
/// clustering classifies the last ceil(test_frac * n) documents by their k
/// nearest neighbours among the rest.
inline SourceScores run_benchmark(const std::string& source, const FieldProvider& fields, const Corpus& corpus,
                                  double test_frac, Distance kind, std::size_t k = 5) {
  const std::size_t n_test = clustering_test_count(corpus.size(), test_frac, k);
  const auto title = fields(Field::title);
  const auto abstract = fields(Field::abstract);
  const auto half1 = fields(Field::half1);
  const auto half2 = fields(Field::half2);
  const auto query = fields(Field::query);
  const auto docs = fields(Field::title_abstract);
  if (half1.set.empty()) {
    throw Error("abstract_segments: every abstract has fewer than two sentences");
  }
  if (query.set.empty()) {
    throw Error("query: no document carries a query");
  }

  EmbeddingSet train(docs.set.source(), docs.set.dim());
  EmbeddingSet test(docs.set.source(), docs.set.dim());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto idx = docs.set.find(corpus[i].id);
    if (!idx) {
      throw Error("clustering: no title-abstract embedding for \"" + corpus[i].id + "\"");
    }
    (i + n_test < corpus.size() ? train : test).add(corpus[i].id, docs.set.vector(*idx));
  }

  SourceScores out{source, {}};
  out.results.push_back(score_matching(Task::title_abstract, title.set, abstract.set, kind, title.skipped));
  out.results.push_back(score_matching(Task::abstract_segments, half1.set, half2.set, kind, half1.skipped));
  out.results.push_back(score_matching(Task::query, query.set, docs.set, kind, query.skipped));
  out.results.push_back(score_clustering(train, test, category_labels(corpus), k, kind));
  return out;
}

/// Assembles raw results and, for two or more sources, normalized scores.
/// All sources must report the same tasks.
inline BenchReport build_report(std::vector<SourceScores> sources, Distance kind) {
  BenchReport report;
  report.distance = std::string(to_string(kind));
  if (sources.empty()) {
    throw Error("benchmark report needs at least one source");
  }
  for (const auto& s : sources) {
    if (s.results.size() != sources[0].results.size()) {
      throw Error("source \"" + s.source + "\" reports a different task set");
    }
    for (std::size_t t = 0; t < s.results.size(); ++t) {
      if (s.results[t].task != sources[0].results[t].task) {
        throw Error("source \"" + s.source + "\" reports a different task set");
      }
    }
  }
  report.sources = std::move(sources);
  const std::size_t n_src = report.sources.size();
  if (n_src < 2) {
    return report;
  }
  const std::size_t n_tasks = report.sources[0].results.size();
  std::vector<std::vector<double>> norm(n_src, std::vector<double>(n_tasks, 0.0));
  for (std::size_t t = 0; t < n_tasks; ++t) {
    std::vector<std::pair<std::string, double>> raw;
    for (const auto& s : report.sources) {
      raw.emplace_back(s.source, s.results[t].raw_score);
    }
    const auto ns = normalize_scores(raw, report.sources[0].results[t].direction);
    if (ns.warning) {
      report.warnings.push_back(std::string(to_string(report.sources[0].results[t].task)) + ": " + *ns.warning);
    }
    for (std::size_t s = 0; s < n_src; ++s) {
      norm[s][t] = ns.scores[s].second;
    }
  }
  std::vector<double> overall(n_src, 0.0);
  for (std::size_t s = 0; s < n_src; ++s) {
    double sum = 0.0;
    for (const double v : norm[s]) {
      sum += v;
    }
    overall[s] = n_tasks == 0 ? 0.0 : sum / static_cast<double>(n_tasks);
  }
  report.normalized = std::move(norm);
  report.overall = std::move(overall);
  return report;
}

inline nlohmann::ordered_json to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["distance"] = r.distance;
  j["sources"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < r.sources.size(); ++s) {
    nlohmann::ordered_json src;
    src["source"] = r.sources[s].source;
    nlohmann::ordered_json raw;
    nlohmann::ordered_json n;
    nlohmann::ordered_json excluded;
    for (const auto& t : r.sources[s].results) {
      raw[std::string(to_string(t.task))] = t.raw_score;
      n[std::string(to_string(t.task))] = t.n;
      excluded[std::string(to_string(t.task))] = t.excluded;
    }
    src["raw"] = raw;
    src["n"] = n;
    src["excluded"] = excluded;
    if (r.normalized) {
      nlohmann::ordered_json norm;
      for (std::size_t t = 0; t < r.sources[s].results.size(); ++t) {
        norm[std::string(to_string(r.sources[s].results[t].task))] = (*r.normalized)[s][t];
      }
      src["normalized"] = norm;
      src["overall"] = (*r.overall)[s];
    } else {
      src["normalized"] = nullptr;
      src["overall"] = nullptr;
    }
    j["sources"].push_back(src);
  }
  j["warnings"] = r.warnings;
  return j;
}

/// task,source,raw,normalized (normalized empty for single-source reports).
inline void write_csv(const BenchReport& r, std::ostream& out) {
  out << "task,source,raw,normalized\n";
  out << std::setprecision(17);
  if (r.sources.empty()) {
    return;
  }
  for (std::size_t t = 0; t < r.sources[0].results.size(); ++t) {
    for (std::size_t s = 0; s < r.sources.size(); ++s) {
      out << to_string(r.sources[s].results[t].task) << ',' << r.sources[s].source << ','
          << r.sources[s].results[t].raw_score << ',';
      if (r.normalized) {
        out << (*r.normalized)[s][t];
      }
      out << '\n';
    }
  }
}

inline void write_table(const BenchReport& r, std::ostream& out) {
  if (r.sources.empty()) {
    return;
  }
  std::size_t name_w = 6;
  for (const auto& s : r.sources) {
    name_w = std::max(name_w, s.source.size());
  }
  out << std::left << std::setw(static_cast<int>(name_w) + 2) << "source";
  for (const auto& t : r.sources[0].results) {
    const std::string head = std::string(to_string(t.task)) + (t.direction == Direction::lower_better ? " (lo)" : " (hi)");
    out << std::right << std::setw(24) << head;
  }
  if (r.overall) {
    out << std::right << std::setw(10) << "overall";
  }
  out << '\n';
  for (std::size_t s = 0; s < r.sources.size(); ++s) {
    out << std::left << std::setw(static_cast<int>(name_w) + 2) << r.sources[s].source;
    for (std::size_t t = 0; t < r.sources[s].results.size(); ++t) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3) << r.sources[s].results[t].raw_score;
      if (r.normalized) {
        cell << " [" << std::setprecision(2) << (*r.normalized)[s][t] << "]";
      }
      out << std::right << std::setw(24) << cell.str();
    }
    if (r.overall) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3) << (*r.overall)[s];
      out << std::right << std::setw(10) << cell.str();
    }
    out << '\n';
  }
}

}  // namespace semcse
