#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "semcse/semcse.hpp"

using namespace semcse;

namespace {

EmbeddingSet make_set(const std::vector<std::pair<std::string, EmbeddingVector>>& items) {
  EmbeddingSet s("test");
  for (const auto& [k, v] : items) {
    s.add(k, v);
  }
  return s;
}

std::string key_of(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "k%03zu", i);
  return buf;
}

/// Coordinates drawn from {0, 1, 2} so equal distances are common.
EmbeddingSet tie_heavy_set(Rng& rng, std::size_t n, std::size_t dim, const std::string& prefix = "") {
  EmbeddingSet s("ties");
  for (std::size_t i = 0; i < n; ++i) {
    EmbeddingVector v(dim);
    for (auto& x : v) {
      x = static_cast<double>(rng.below(3));
    }
    s.add(prefix + key_of(i), std::move(v));
  }
  return s;
}

Corpus two_topic_corpus(std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    c.add_document({key_of(i), "Title " + key_of(i), "First part here. Second part here.",
                    std::string(i % 2 == 0 ? "even" : "odd"), "query " + key_of(i)});
  }
  return c;
}

}  // namespace

TEST(AverageRank, UniqueNearestGivesOne) {
  const auto q = make_set({{"a", {0, 0}}, {"b", {5, 5}}});
  const auto c = make_set({{"a", {0, 0.1}}, {"b", {5, 5.1}}});
  EXPECT_EQ(average_rank(q, c, identity_matches(q), Distance::euclidean), 1.0);
}

TEST(AverageRank, MatchAtThirdDistanceRanksFourth) {
  const auto q = make_set({{"q", {0}}});
  const auto c = make_set({{"a", {2}}, {"b", {1}}, {"m", {3}}, {"d", {0.5}}});
  EXPECT_EQ(average_rank(q, c, {{"q", "m"}}, Distance::euclidean), 4.0);
}

TEST(AverageRank, EquidistantMatchSortingFirstRanksOne) {
  const auto q = make_set({{"q", {0, 0}}});
  const auto c = make_set({{"e", {1, 0}}, {"b", {0, 1}}, {"a", {-1, 0}}, {"d", {0, -1}}, {"c", {0.6, 0.8}}});
  EXPECT_EQ(average_rank(q, c, {{"q", "a"}}, Distance::euclidean), 1.0);
  EXPECT_EQ(average_rank(q, c, {{"q", "e"}}, Distance::euclidean), 5.0);
}

TEST(AverageRank, Errors) {
  const auto q = make_set({{"a", {0, 0}}});
  const auto c = make_set({{"b", {0, 0}}});
  EXPECT_THROW(average_rank(q, c, identity_matches(q), Distance::euclidean), Error);
  const auto c3 = make_set({{"a", {0, 0, 0}}});
  EXPECT_THROW(average_rank(q, c3, identity_matches(q), Distance::euclidean), Error);
  EXPECT_THROW(average_rank(EmbeddingSet("x"), c, {}, Distance::euclidean), Error);
}

TEST(AverageRank, MatchesOracleWithTies) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    const std::size_t dim = 1 + rng.below(3);
    const auto q = tie_heavy_set(rng, n, dim);
    const auto c = tie_heavy_set(rng, n, dim);
    for (const auto kind : {Distance::euclidean, Distance::cosine}) {
      // Cosine is undefined at the origin; shift everything off it.
      EmbeddingSet qs("q");
      EmbeddingSet cs("c");
      for (std::size_t i = 0; i < n; ++i) {
        auto a = q.vector(i);
        auto b = c.vector(i);
        a[0] += 0.5;
        b[0] += 0.5;
        qs.add(q.key(i), a);
        cs.add(c.key(i), b);
      }
      EXPECT_EQ(average_rank(qs, cs, identity_matches(qs), kind),
                oracle::average_rank(qs, cs, identity_matches(qs), kind));
    }
  }
}

TEST(AverageRank, EmbeddingSetValidation) {
  EmbeddingSet s("x");
  s.add("a", {1, 2});
  EXPECT_THROW(s.add("a", {1, 2}), Error);
  EXPECT_THROW(s.add("b", {1}), Error);
  EXPECT_THROW(s.add("c", {1, std::nan("")}), Error);
}

TEST(KNearest, TieBreakByKey) {
  const auto c = make_set({{"z", {1}}, {"y", {1}}, {"x", {-1}}, {"w", {3}}});
  const auto idx = k_nearest(std::vector<double>{0}, c, 3, Distance::euclidean);
  ASSERT_EQ(idx.size(), 3u);
  EXPECT_EQ(c.key(idx[0]), "x");
  EXPECT_EQ(c.key(idx[1]), "y");
  EXPECT_EQ(c.key(idx[2]), "z");
}

TEST(Clustering, OneCategoryIsPerfect) {
  const auto train = make_set({{"a", {0}}, {"b", {1}}, {"c", {2}}, {"d", {3}}, {"e", {4}}});
  const auto test = make_set({{"t", {9}}});
  const std::map<std::string, std::string> labels{{"a", "x"}, {"b", "x"}, {"c", "x"}, {"d", "x"}, {"e", "x"},
                                                  {"t", "x"}};
  EXPECT_EQ(score_clustering(train, test, labels, 5, Distance::euclidean).raw_score, 1.0);
}

TEST(Clustering, SeparatedCategoriesArePerfect) {
  EmbeddingSet train("t");
  EmbeddingSet test("t");
  std::map<std::string, std::string> labels;
  for (std::size_t i = 0; i < 10; ++i) {
    const bool left = i < 5;
    train.add("tr" + key_of(i), {left ? 0.0 : 100.0, 0.0});
    test.add("te" + key_of(i), {left ? 0.0 : 100.0, 0.0});
    labels["tr" + key_of(i)] = labels["te" + key_of(i)] = left ? "L" : "R";
  }
  EXPECT_EQ(score_clustering(train, test, labels, 5, Distance::euclidean).raw_score, 1.0);
}

TEST(Clustering, MatchesOracleWithTies) {
  Rng rng(91);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n_train = 5 + rng.below(80);
    const auto train = tie_heavy_set(rng, n_train, 2, "tr");
    const auto test = tie_heavy_set(rng, 1 + rng.below(40), 2, "te");
    std::map<std::string, std::string> labels;
    for (const auto& k : train.keys()) {
      labels[k] = "c" + std::to_string(rng.below(3));
    }
    for (const auto& k : test.keys()) {
      labels[k] = "c" + std::to_string(rng.below(3));
    }
    const std::size_t k = 1 + rng.below(5);
    EXPECT_EQ(score_clustering(train, test, labels, k, Distance::euclidean).raw_score,
              oracle::clustering_purity(train, test, labels, k, Distance::euclidean));
  }
}

TEST(Clustering, Errors) {
  const auto train = make_set({{"a", {0}}, {"b", {1}}});
  const auto test = make_set({{"t", {0}}});
  EXPECT_THROW(score_clustering(train, test, {{"a", "x"}, {"b", "x"}, {"t", "x"}}, 3, Distance::euclidean), Error);
  EXPECT_THROW(score_clustering(train, test, {{"a", "x"}, {"t", "x"}}, 1, Distance::euclidean), Error);
}

TEST(Tasks, SingleDocumentRanksOne) {
  Corpus c;
  c.add_document({"only", "A title", "One sentence. Two sentence.", std::string("x"), std::string("q")});
  const auto embed = [](std::string_view t) { return EmbeddingVector{static_cast<double>(t.size()), 1.0}; };
  EXPECT_EQ(task_title_abstract(embed, c).raw_score, 1.0);
  EXPECT_EQ(task_abstract_segments(embed, c).raw_score, 1.0);
  EXPECT_EQ(task_query(embed, c).raw_score, 1.0);
}

TEST(Tasks, ConstantEmbedderFollowsTieRule) {
  const auto c = two_topic_corpus(9);
  const auto embed = [](std::string_view) { return EmbeddingVector{1.0}; };
  EXPECT_EQ(task_title_abstract(embed, c).raw_score, 5.0);
  EXPECT_EQ(task_query(embed, c).raw_score, 5.0);
}

TEST(Tasks, SegmentsSkipSingleSentenceAbstracts) {
  auto c = two_topic_corpus(4);
  c.add_document({"short", "Short", "Only one sentence.", std::string("odd"), std::nullopt});
  const auto embed = [](std::string_view t) { return EmbeddingVector{static_cast<double>(t.size())}; };
  const auto r = task_abstract_segments(embed, c);
  EXPECT_EQ(r.n, 4u);
  EXPECT_EQ(r.excluded, 1u);
  const auto q = task_query(embed, c);
  EXPECT_EQ(q.excluded, 1u);
}

TEST(Tasks, ClusteringWithLookupEmbedderMatchesOracle) {
  Rng rng(13);
  const auto corpus = two_topic_corpus(60);
  std::map<std::string, EmbeddingVector> table;
  for (const auto& d : corpus.documents()) {
    table[d.title_abstract()] = {static_cast<double>(rng.below(3)), static_cast<double>(rng.below(3))};
  }
  const auto embed = [&](std::string_view t) { return table.at(std::string(t)); };
  const auto train = corpus.slice(0, 45);
  const auto test = corpus.slice(45, 60);
  const auto got = task_clustering(embed, train, test, 5);
  auto labels = category_labels(train);
  labels.merge(category_labels(test));
  EXPECT_EQ(got.raw_score, oracle::clustering_purity(embed_field(embed, train, Field::title_abstract).set,
                                                     embed_field(embed, test, Field::title_abstract).set, labels, 5,
                                                     Distance::euclidean));
}

TEST(GeneralizationProbe, PerfectCollapse) {
  const auto corpus = generate_synthetic_corpus({12, 2, 30, 20, 4});
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const auto f : {Field::title, Field::abstract, Field::title_abstract, Field::summary}) {
      owner[*field_text(corpus, i, f)] = i;
    }
  }
  const auto embed = [&](std::string_view t) { return EmbeddingVector{static_cast<double>(owner.at(std::string(t)))}; };
  const auto p = generalization_probe(embed, corpus);
  EXPECT_EQ(p.rank_full, 1.0);
  EXPECT_EQ(p.rank_title_only, 1.0);
  EXPECT_EQ(p.rank_abstract_only, 1.0);
}

TEST(Normalize, HigherBetterExample) {
  const auto n = normalize_scores({{"a", 0.8}, {"b", 0.6}, {"c", 0.4}}, Direction::higher_better);
  EXPECT_NEAR(n.scores[0].second, 1.0, 1e-12);
  EXPECT_NEAR(n.scores[1].second, 0.5, 1e-12);
  EXPECT_NEAR(n.scores[2].second, 0.0, 1e-12);
  EXPECT_FALSE(n.warning);
}

TEST(Normalize, LowerBetterExampleWithClamp) {
  const auto n = normalize_scores({{"a", 1}, {"b", 2}, {"c", 3}, {"d", 100}}, Direction::lower_better);
  EXPECT_EQ(n.scores[0].second, 1.0);
  EXPECT_NEAR(n.scores[1].second, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(n.scores[2].second, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(n.scores[3].second, 0.0);
  // A source sitting at the median 2.5 scores exactly 0.5.
  const auto m = normalize_scores({{"a", 1}, {"b", 2.5}, {"c", 3}, {"d", 2.5}, {"e", 100}}, Direction::lower_better);
  EXPECT_NEAR(m.scores[1].second, 0.5, 1e-12);
}

TEST(Normalize, BestIsAlwaysOne) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::pair<std::string, double>> raw;
    const std::size_t n = 2 + rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      raw.emplace_back(key_of(i), rng.uniform(-10, 10) * std::pow(10.0, rng.uniform(-3, 3)));
    }
    for (const auto dir : {Direction::lower_better, Direction::higher_better}) {
      const auto out = normalize_scores(raw, dir);
      double best = raw[0].second;
      for (const auto& [k, v] : raw) {
        best = dir == Direction::lower_better ? std::min(best, v) : std::max(best, v);
      }
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_GE(out.scores[i].second, 0.0);
        EXPECT_LE(out.scores[i].second, 1.0);
        if (raw[i].second == best) {
          EXPECT_EQ(out.scores[i].second, 1.0);
        }
      }
    }
  }
}

TEST(Normalize, DegenerateInputs) {
  const auto eq = normalize_scores({{"a", 2}, {"b", 2}}, Direction::lower_better);
  EXPECT_TRUE(eq.warning);
  EXPECT_EQ(eq.scores[0].second, 1.0);
  EXPECT_EQ(eq.scores[1].second, 1.0);
  // Best equals median: the rest score 0.
  const auto bm = normalize_scores({{"a", 5}, {"b", 5}, {"c", 1}}, Direction::higher_better);
  EXPECT_EQ(bm.scores[0].second, 1.0);
  EXPECT_EQ(bm.scores[2].second, 0.0);
  EXPECT_THROW(normalize_scores({{"a", 1}}, Direction::lower_better), Error);
  EXPECT_THROW(normalize_scores({{"a", 1}, {"b", std::nan("")}}, Direction::lower_better), Error);
}

TEST(Report, SingleSourceHasNullNormalized) {
  const auto c = two_topic_corpus(20);
  const auto embed = [](std::string_view t) { return EmbeddingVector{static_cast<double>(t.size()), 1.0}; };
  const auto rep = build_report({run_benchmark("one", model_fields(embed, c, "one"), c, 0.25, Distance::euclidean)},
                                Distance::euclidean);
  const auto j = to_json(rep);
  EXPECT_TRUE(j["sources"][0]["normalized"].is_null());
  EXPECT_TRUE(j["sources"][0]["overall"].is_null());
  EXPECT_TRUE(j["sources"][0]["raw"].contains("clustering"));
  std::ostringstream csv;
  write_csv(rep, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "task,source,raw,normalized");
}

TEST(Report, TwoSourcesNormalizeAndBestGetsOne) {
  const auto c = generate_synthetic_corpus({40, 4, 30, 20, 6});
  const auto good = [&](std::string_view t) {
    // Bag of topic tokens: a decent embedder without training.
    EmbeddingVector v(4, 0.0);
    for (const auto& w : word_tokens(t)) {
      v[fnv1a64(w) % 4] += 1.0;
    }
    return v;
  };
  const auto constant = [](std::string_view) { return EmbeddingVector{1, 1, 1, 1}; };
  const auto rep = build_report({run_benchmark("good", model_fields(good, c, "good"), c, 0.25, Distance::euclidean),
                                 run_benchmark("flat", model_fields(constant, c, "flat"), c, 0.25,
                                               Distance::euclidean)},
                                Distance::euclidean);
  ASSERT_TRUE(rep.normalized);
  for (std::size_t t = 0; t < kAllTasks.size(); ++t) {
    const double a = (*rep.normalized)[0][t];
    const double b = (*rep.normalized)[1][t];
    EXPECT_TRUE(a == 1.0 || b == 1.0);
  }
  std::ostringstream table;
  write_table(rep, table);
  EXPECT_NE(table.str().find("good"), std::string::npos);
}

TEST(Report, RunBenchmarkAgreesWithTaskFunctions) {
  const auto c = generate_synthetic_corpus({40, 4, 30, 20, 6});
  const auto vocab = build_vocab(c);
  const Model m{vocab, init_params({vocab.size(), 8, 8, 4}, 0.1, 1)};
  const auto e = embedder_of(m);
  const auto s = run_benchmark("m", model_fields(e, c, "m"), c, 0.25, Distance::euclidean);
  EXPECT_EQ(s.results[0].raw_score, task_title_abstract(e, c).raw_score);
  EXPECT_EQ(s.results[1].raw_score, task_abstract_segments(e, c).raw_score);
  EXPECT_EQ(s.results[2].raw_score, task_query(e, c).raw_score);
  EXPECT_EQ(s.results[3].raw_score, task_clustering(e, c.slice(0, 30), c.slice(30, 40)).raw_score);
}

TEST(Report, MismatchedTaskSetsRejected) {
  SourceScores a{"a", {{Task::query, 1.0, Direction::lower_better, 1, 0}}};
  SourceScores b{"b", {{Task::title_abstract, 1.0, Direction::lower_better, 1, 0}}};
  EXPECT_THROW(build_report({a, b}, Distance::euclidean), Error);
}

TEST(Exchange, RoundTripAndErrors) {
  EmbeddingSet s("src", 3);
  s.add("a", {1, 2, 3});
  s.add("b", {0.1, 1e-300, -5});
  std::stringstream io;
  write_embeddings(s, io);
  const auto back = read_embeddings(io);
  EXPECT_EQ(back.source(), "src");
  EXPECT_EQ(back.keys(), s.keys());
  EXPECT_EQ(back.vectors(), s.vectors());

  std::istringstream bad_dim(R"({"source":"x","dim":2}
{"key":"a","vec":[1,2,3]})");
  try {
    read_embeddings(bad_dim, "f.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("f.jsonl line 2"), std::string::npos);
  }
  std::istringstream empty("");
  EXPECT_THROW(read_embeddings(empty), Error);
}
