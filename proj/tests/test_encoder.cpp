#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "semcse/semcse.hpp"

using namespace semcse;

TEST(Rng, NamedStreamsAreIndependentAndReproducible) {
  auto a = Rng::stream(7, "sampling");
  auto b = Rng::stream(7, "sampling");
  auto c = Rng::stream(7, "dropout");
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
}

TEST(Rng, UniformAndBelowRanges) {
  Rng r(123);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ++hist[r.below(7)];
  }
  for (const int h : hist) {
    EXPECT_NEAR(h, 10000, 500);
  }
}

TEST(InitParams, ParameterCount) {
  const EncoderDims dims{100, 8, 8, 8};
  EXPECT_EQ(dims.parameter_count(), 944u);
  EXPECT_EQ(init_params(dims, 0.1, 1).size(), 944u);
}

TEST(InitParams, SeedDeterminism) {
  const EncoderDims dims{30, 6, 5, 4};
  EXPECT_EQ(init_params(dims, 0.1, 5), init_params(dims, 0.1, 5));
  EXPECT_NE(init_params(dims, 0.1, 5), init_params(dims, 0.1, 6));
}

TEST(InitParams, BiasesZeroWeightsBounded) {
  const auto p = init_params({50, 16, 9, 4}, 0.0, 3);
  for (const double b : p.b1()) {
    EXPECT_EQ(b, 0.0);
  }
  for (const double b : p.b2()) {
    EXPECT_EQ(b, 0.0);
  }
  for (const double w : p.w1()) {
    EXPECT_LE(std::abs(w), 0.25);
  }
  for (const double w : p.w2()) {
    EXPECT_LE(std::abs(w), 1.0 / 3.0);
  }
}

TEST(InitParams, RejectsBadShapes) {
  EXPECT_THROW(EncoderParams({0, 4, 4, 4}, 0.1), Error);
  EXPECT_THROW(EncoderParams({4, 4, 4, 4}, 1.0), Error);
  EXPECT_THROW(EncoderParams({4, 4, 4, 4}, -0.1), Error);
}

TEST(Encode, NoDropoutIsDeterministic) {
  const auto p = init_params({20, 6, 6, 4}, 0.0, 1);
  const TokenSequence t{2, 3, 5};
  EXPECT_EQ(encode(p, t), encode(p, t));
  EXPECT_EQ(encode(p, t, 3), encode(p, t, 4));  // p = 0 ignores the seed
}

TEST(Encode, ZeroWeightsGiveZeroVector) {
  const EncoderParams p({10, 4, 4, 3}, 0.0);
  EXPECT_EQ(encode(p, {4}), EmbeddingVector(3, 0.0));
}

TEST(Encode, DropoutSeedsChangeOutput) {
  const auto p = init_params({20, 8, 16, 4}, 0.3, 1);
  const TokenSequence t{2, 3, 5, 7};
  EXPECT_NE(encode(p, t, 3), encode(p, t, 4));
  EXPECT_EQ(encode(p, t, 3), encode(p, t, 3));
  EXPECT_NE(encode(p, t), encode(p, t, 3));
}

TEST(Encode, MeanPoolingIgnoresOrder) {
  const auto p = init_params({20, 5, 5, 3}, 0.0, 9);
  const auto a = encode(p, {2, 3, 4});
  const auto b = encode(p, {4, 2, 3});
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(a[k], b[k], 1e-15);
  }
}

TEST(Encode, RejectsEmptyOrOutOfRangeTokens) {
  const auto p = init_params({10, 4, 4, 3}, 0.0, 1);
  EXPECT_THROW(encode(p, {}), Error);
  EXPECT_THROW(encode(p, {10}), Error);
}

TEST(DropoutMask, KeepRateAndScaling) {
  const auto mask = dropout_mask(42, 20000, 0.25);
  std::size_t kept = 0;
  for (const double m : mask) {
    ASSERT_TRUE(m == 0.0 || std::abs(m - 1.0 / 0.75) < 1e-15);
    kept += m != 0.0 ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(kept) / 20000.0, 0.75, 0.02);
}

TEST(Checkpoint, RoundTripIsExact) {
  const auto p = init_params({37, 5, 6, 7}, 0.15, 11);
  std::stringstream io;
  write_checkpoint(p, io);
  EXPECT_EQ(read_checkpoint(io), p);
}

TEST(Checkpoint, HeaderLayout) {
  const auto p = init_params({3, 2, 2, 2}, 0.5, 1);
  std::ostringstream out;
  write_checkpoint(p, out);
  const auto bytes = out.str();
  EXPECT_EQ(bytes.substr(0, 4), "SEMC");
  EXPECT_EQ(bytes.size(), 4 + 4 + 4 * 8 + 8 + p.size() * 8);
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);  // version, little-endian
}

TEST(Checkpoint, RejectsCorruptInput) {
  const auto p = init_params({3, 2, 2, 2}, 0.5, 1);
  std::ostringstream out;
  write_checkpoint(p, out);
  const auto good = out.str();

  std::istringstream bad_magic("XEMC" + good.substr(4));
  EXPECT_THROW(read_checkpoint(bad_magic), Error);
  std::istringstream truncated(good.substr(0, good.size() - 3));
  EXPECT_THROW(read_checkpoint(truncated), Error);
  std::istringstream trailing(good + "x");
  EXPECT_THROW(read_checkpoint(trailing), Error);
  auto bad_version = good;
  bad_version[4] = 2;
  std::istringstream v(bad_version);
  EXPECT_THROW(read_checkpoint(v), Error);
}

TEST(Checkpoint, ModelWithVocabulary) {
  const auto corpus = generate_synthetic_corpus({16, 2, 30, 20, 2});
  auto vocab = build_vocab(corpus);
  const EncoderDims dims{vocab.size(), 8, 8, 4};
  const Model m{vocab, init_params(dims, 0.1, 3)};
  const auto path = (std::filesystem::temp_directory_path() / "semcse_model.ckpt").string();
  save_model(m, path);
  const auto back = load_model(path);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.vocab, m.vocab);
  EXPECT_EQ(back.embed(corpus[0].title), m.embed(corpus[0].title));
  std::filesystem::remove(path);
  std::filesystem::remove(vocab_path_for(path));
  EXPECT_THROW(load_model(path), Error);
}
