#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "semcse/semcse.hpp"

using namespace semcse;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("semcse_corpus_" + name)).string();
}

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

const char* kTwoDocs =
    R"({"kind":"doc","id":"p1","title":"Graph nets","abstract":"We study graphs. Results follow.","category":"ml"}
{"kind":"doc","id":"p2","title":"Protein folds","abstract":"Folding is hard. We fold.","query":"protein folding"}
{"kind":"summary","doc_id":"p1","prompt_id":0,"text":"Graphs are studied."}
{"kind":"summary","doc_id":"p1","prompt_id":1,"text":"A graph paper."}
{"kind":"summary","doc_id":"p2","prompt_id":0,"text":"Proteins fold."}
{"kind":"summary","doc_id":"p2","prompt_id":4,"text":"Folding study."}
)";

}  // namespace

TEST(SplitSentences, TwoTerminatedSentences) {
  EXPECT_EQ(split_sentences("A b. C d."), (std::vector<std::string>{"A b.", "C d."}));
}

TEST(SplitSentences, NoTerminatorGivesOneSentence) {
  EXPECT_EQ(split_sentences("No terminator here"), (std::vector<std::string>{"No terminator here"}));
}

TEST(SplitSentences, AbbreviationDoesNotEndSentence) {
  EXPECT_EQ(split_sentences("X et al. found y. Z."), (std::vector<std::string>{"X et al. found y.", "Z."}));
  EXPECT_EQ(split_sentences("See Fig. 3 for data. Then stop."),
            (std::vector<std::string>{"See Fig. 3 for data.", "Then stop."}));
}

TEST(SplitSentences, LowercaseAfterPeriodContinues) {
  EXPECT_EQ(split_sentences("Values near 3. and more. Next one."),
            (std::vector<std::string>{"Values near 3. and more.", "Next one."}));
}

TEST(SplitSentences, BlankTextIsEmpty) {
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences("   \n").empty());
}

TEST(SplitAbstractHalves, EqualSentencesSplitInTheMiddle) {
  const auto h = split_abstract_halves("Aaaa. Bbbb. Cccc. Dddd.");
  EXPECT_EQ(h.first, "Aaaa. Bbbb.");
  EXPECT_EQ(h.second, "Cccc. Dddd.");
}

TEST(SplitAbstractHalves, TieGoesToEarlierBoundary) {
  // Sentence lengths 10, 100, 10: both boundaries are 50 away from 60.
  const std::string s1 = "Aaaaaaaaa.";
  const std::string s2 = "B" + std::string(98, 'b') + ".";
  const std::string s3 = "Ccccccccc.";
  ASSERT_EQ(s1.size(), 10u);
  ASSERT_EQ(s2.size(), 100u);
  const auto h = split_abstract_halves(s1 + " " + s2 + " " + s3);
  EXPECT_EQ(h.first, s1);
  EXPECT_EQ(h.second, s2 + " " + s3);
}

TEST(SplitAbstractHalves, TwoSentences) {
  const auto h = split_abstract_halves("First one. Second one.");
  EXPECT_EQ(h.first, "First one.");
  EXPECT_EQ(h.second, "Second one.");
}

TEST(SplitAbstractHalves, SingleSentenceThrows) { EXPECT_THROW(split_abstract_halves("Only one."), Error); }

TEST(LoadCorpus, TwoDocumentsFourSummaries) {
  const auto c = parse(kTwoDocs);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.summaries().size(), 4u);
  EXPECT_EQ(c[0].category, "ml");
  EXPECT_FALSE(c[0].query.has_value());
  EXPECT_EQ(c[1].query, "protein folding");
  EXPECT_EQ(c.summaries_of(1), (std::vector<std::string_view>{"Proteins fold.", "Folding study."}));
}

TEST(LoadCorpus, DuplicateIdNamesIdAndLine) {
  try {
    parse(R"({"kind":"doc","id":"p1","title":"T","abstract":"A."}
{"kind":"doc","id":"p1","title":"T2","abstract":"B."})");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("p1"), std::string::npos);
    EXPECT_NE(msg.find("line 2"), std::string::npos);
  }
}

TEST(LoadCorpus, EmptyFileIsEmptyCorpus) {
  EXPECT_TRUE(parse("").empty());
  EXPECT_TRUE(parse("\n\n").empty());
}

TEST(LoadCorpus, RejectsBadRecords) {
  EXPECT_THROW(parse(R"({"kind":"summary","doc_id":"nope","prompt_id":0,"text":"x"})"), Error);
  EXPECT_THROW(parse(R"({"kind":"doc","id":"p","title":"T","abstract":"  "})"), Error);
  EXPECT_THROW(parse(R"({"kind":"doc","id":"p","title":"T","abstract":"A."}
{"kind":"summary","doc_id":"p","prompt_id":5,"text":"x"})"),
               Error);
  EXPECT_THROW(parse(R"({"kind":"paper","id":"p"})"), Error);
  EXPECT_THROW(parse("{not json"), Error);
}

TEST(LoadCorpus, MissingFileNamesPath) {
  try {
    load_corpus("/nonexistent/corpus.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/corpus.jsonl"), std::string::npos);
  }
}

TEST(SaveCorpus, RoundTripIsCanonical) {
  const auto c = parse(kTwoDocs);
  const auto path = temp_path("roundtrip.jsonl");
  save_corpus(c, path);
  const auto back = load_corpus(path);
  EXPECT_EQ(to_jsonl(back), to_jsonl(c));
  EXPECT_EQ(back.summaries().size(), 4u);
  std::filesystem::remove(path);
}

TEST(Corpus, SliceKeepsSummaries) {
  const auto c = parse(kTwoDocs);
  const auto s = c.slice(1, 2);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].id, "p2");
  EXPECT_EQ(s.summaries().size(), 2u);
}

TEST(Synthetic, SmallCorpusCounts) {
  const auto c = generate_synthetic_corpus({8, 2, 30, 20, 7});
  EXPECT_EQ(c.size(), 8u);
  EXPECT_EQ(c.summaries().size(), 24u);
  for (const auto& d : c.documents()) {
    ASSERT_TRUE(d.category.has_value());
    EXPECT_TRUE(*d.category == "topic-0" || *d.category == "topic-1");
    EXPECT_TRUE(d.query.has_value());
    EXPECT_GE(split_sentences(d.abstract).size(), 2u);
  }
}

TEST(Synthetic, DeterministicBytes) {
  const SyntheticOptions opt{50, 4, 40, 20, 11};
  EXPECT_EQ(to_jsonl(generate_synthetic_corpus(opt)), to_jsonl(generate_synthetic_corpus(opt)));
  EXPECT_NE(to_jsonl(generate_synthetic_corpus(opt)), to_jsonl(generate_synthetic_corpus({50, 4, 40, 20, 12})));
}

TEST(Synthetic, EverySummarySharesATopicTokenWithItsAbstract) {
  const SyntheticOptions opt{200, 8, 50, 30, 1};
  const auto c = generate_synthetic_corpus(opt);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto topic = static_cast<std::size_t>(std::stoul(c[i].category->substr(6)));
    const auto words = topic_vocabulary(opt, topic);
    const std::set<std::string> topic_words(words.begin(), words.end());
    std::set<std::string> in_abstract;
    for (const auto& w : word_tokens(c[i].abstract)) {
      if (topic_words.contains(w)) {
        in_abstract.insert(w);
      }
    }
    for (const auto s : c.summaries_of(i)) {
      bool shared = false;
      for (const auto& w : word_tokens(s)) {
        shared = shared || in_abstract.contains(w);
      }
      EXPECT_TRUE(shared) << c[i].id << ": " << s;
    }
  }
}

TEST(Synthetic, TopicVocabulariesAreDisjoint) {
  const SyntheticOptions opt{16, 4, 25, 10, 3};
  std::set<std::string> seen;
  for (std::size_t t = 0; t < 4; ++t) {
    for (const auto& w : topic_vocabulary(opt, t)) {
      EXPECT_TRUE(seen.insert(w).second) << w;
    }
  }
}

TEST(Synthetic, RejectsBadOptions) {
  try {
    generate_synthetic_corpus({10, 1, 30, 20, 7});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("n_topics must be >= 2"), std::string::npos);
  }
  EXPECT_THROW(generate_synthetic_corpus({3, 4, 30, 20, 7}), Error);
}

TEST(Vocab, MinCountThreshold) {
  Corpus c;
  c.add_document({"d", "model model model", "The model works. A model again.", std::nullopt, std::nullopt});
  // "model" occurs exactly 5 times.
  const auto v5 = build_vocab(c, 5);
  EXPECT_TRUE(v5.contains("model"));
  const auto v6 = build_vocab(c, 6);
  EXPECT_FALSE(v6.contains("model"));
  EXPECT_EQ(v6.lookup("model"), kUnkId);
}

TEST(Vocab, DeterministicFile) {
  const auto c = generate_synthetic_corpus({40, 4, 30, 20, 5});
  std::ostringstream a;
  std::ostringstream b;
  build_vocab(c).save(a);
  build_vocab(c).save(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Vocab, SizeMatchesIndependentCount) {
  const auto c = generate_synthetic_corpus({200, 8, 50, 30, 7});
  for (const std::size_t min_count : {1u, 3u, 10u}) {
    std::map<std::string, std::size_t> counts;
    const auto scan = [&](std::string_view text) {
      std::string cur;
      for (const char ch : std::string(text) + " ") {
        const auto u = static_cast<unsigned char>(ch);
        if (std::isalnum(u) || u >= 0x80) {
          cur += static_cast<char>(std::tolower(u));
        } else if (!cur.empty()) {
          ++counts[cur];
          cur.clear();
        }
      }
    };
    for (const auto& d : c.documents()) {
      scan(d.title);
      scan(d.abstract);
    }
    for (const auto& s : c.summaries()) {
      scan(s.text);
    }
    std::size_t kept = 0;
    for (const auto& [w, n] : counts) {
      kept += n >= min_count ? 1 : 0;
    }
    EXPECT_EQ(build_vocab(c, min_count).size(), kept + 2) << "min_count " << min_count;
  }
}

TEST(Vocab, SaveLoadRoundTrip) {
  const auto v = build_vocab(generate_synthetic_corpus({20, 2, 30, 20, 5}));
  std::stringstream io;
  v.save(io);
  EXPECT_EQ(Vocabulary::load(io), v);
  std::istringstream bad("hello\n<unk>\n");
  EXPECT_THROW(Vocabulary::load(bad), Error);
}

TEST(Tokenize, Basics) {
  Corpus c;
  c.add_document({"d", "The model trains", "The model trains well.", std::nullopt, std::nullopt});
  const auto v = build_vocab(c);
  EXPECT_TRUE(tokenize(v, "").empty());
  EXPECT_EQ(tokenize(v, "zeta eta theta"), (TokenSequence{kUnkId, kUnkId, kUnkId}));
  const auto t = tokenize(v, "The Model TRAINS");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], v.lookup("the"));
  EXPECT_EQ(t[1], v.lookup("model"));
  EXPECT_EQ(t[2], v.lookup("trains"));
  for (const auto id : t) {
    EXPECT_GT(id, kUnkId);
  }
}
