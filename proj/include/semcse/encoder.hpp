#pragma once

// Small bag-of-words text encoder.
//
//   x = mean_t embedding[token_t]            (E)
//   h = tanh(W1 x + b1)                      (H)
//   h' = h * mask                            dropout, training only
//   z = W2 h' + b2                           (D)
//
// All weights live in one flat buffer so that gradients and optimizer state
// share the layout: token embeddings (V x E), W1 (H x E), b1 (H), W2 (D x H),
// b2 (D), each row-major.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semcse/error.hpp"
#include "semcse/rng.hpp"
#include "semcse/vocab.hpp"

namespace semcse {

using EmbeddingVector = std::vector<double>;

struct EncoderDims {
  std::size_t vocab_size = 0;
  std::size_t embed = 64;   // E
  std::size_t hidden = 64;  // H
  std::size_t output = 32;  // D

  [[nodiscard]] std::size_t parameter_count() const noexcept {
    return vocab_size * embed + hidden * embed + hidden + output * hidden + output;
  }

  friend bool operator==(const EncoderDims&, const EncoderDims&) = default;
};

class EncoderParams {
 public:
  EncoderParams() = default;
  EncoderParams(EncoderDims dims, double dropout) : dims_(dims), dropout_(dropout) {
    if (dims.vocab_size < 1 || dims.embed < 1 || dims.hidden < 1 || dims.output < 1) {
      throw Error("encoder dimensions must all be >= 1");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
      throw Error("dropout rate must lie in [0, 1)");
    }
    data_.assign(dims.parameter_count(), 0.0);
  }

  /// Same shape, all zeros. Used for gradient accumulators.
  [[nodiscard]] EncoderParams zeros_like() const { return EncoderParams(dims_, dropout_); }

  [[nodiscard]] const EncoderDims& dims() const noexcept { return dims_; }
  [[nodiscard]] double dropout() const noexcept { return dropout_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  [[nodiscard]] std::span<double> flat() noexcept { return data_; }
  [[nodiscard]] std::span<const double> flat() const noexcept { return data_; }

  [[nodiscard]] std::span<double> embedding() noexcept { return block(0, dims_.vocab_size * dims_.embed); }
  [[nodiscard]] std::span<double> w1() noexcept { return block(off_w1(), dims_.hidden * dims_.embed); }
  [[nodiscard]] std::span<double> b1() noexcept { return block(off_b1(), dims_.hidden); }
  [[nodiscard]] std::span<double> w2() noexcept { return block(off_w2(), dims_.output * dims_.hidden); }
  [[nodiscard]] std::span<double> b2() noexcept { return block(off_b2(), dims_.output); }
  [[nodiscard]] std::span<const double> embedding() const noexcept { return block(0, dims_.vocab_size * dims_.embed); }
  [[nodiscard]] std::span<const double> w1() const noexcept { return block(off_w1(), dims_.hidden * dims_.embed); }
  [[nodiscard]] std::span<const double> b1() const noexcept { return block(off_b1(), dims_.hidden); }
  [[nodiscard]] std::span<const double> w2() const noexcept { return block(off_w2(), dims_.output * dims_.hidden); }
  [[nodiscard]] std::span<const double> b2() const noexcept { return block(off_b2(), dims_.output); }

  [[nodiscard]] bool all_finite() const noexcept {
    for (const double v : data_) {
      if (!std::isfinite(v)) {
        return false;
      }
    }
    return true;
  }

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;

 private:
  [[nodiscard]] std::size_t off_w1() const noexcept { return dims_.vocab_size * dims_.embed; }
  [[nodiscard]] std::size_t off_b1() const noexcept { return off_w1() + dims_.hidden * dims_.embed; }
  [[nodiscard]] std::size_t off_w2() const noexcept { return off_b1() + dims_.hidden; }
  [[nodiscard]] std::size_t off_b2() const noexcept { return off_w2() + dims_.output * dims_.hidden; }

  std::span<double> block(std::size_t off, std::size_t n) noexcept { return std::span<double>(data_).subspan(off, n); }
  std::span<const double> block(std::size_t off, std::size_t n) const noexcept {
    return std::span<const double>(data_).subspan(off, n);
  }

  EncoderDims dims_{};
  double dropout_ = 0.0;
  std::vector<double> data_;
};

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero. The
/// embedding lookup is a one-hot input, so its fan-in is 1.
inline EncoderParams init_params(EncoderDims dims, double dropout, std::uint64_t seed) {
  EncoderParams p(dims, dropout);
  Rng rng = Rng::stream(seed, "init");
  const auto fill = [&](std::span<double> block, std::size_t fan_in) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto& v : block) {
      v = rng.uniform(-scale, scale);
    }
  };
  fill(p.embedding(), 1);
  fill(p.w1(), dims.embed);
  fill(p.w2(), dims.hidden);
  return p;
}

/// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardTrace {
  TokenSequence tokens;
  std::vector<double> pooled;  // x
  std::vector<double> hidden;  // tanh output, before dropout
  std::vector<double> mask;    // 0 or 1/(1-p) per hidden unit; all 1 without dropout
  EmbeddingVector output;      // z
};

/// Dropout mask for one forward pass: unit kept with probability 1-p and
/// scaled by 1/(1-p). Depends only on (seed, H, p).
inline std::vector<double> dropout_mask(std::uint64_t seed, std::size_t hidden, double p) {
  std::vector<double> mask(hidden, 1.0);
  if (p <= 0.0) {
    return mask;
  }
  Rng rng(splitmix64_mix(seed));
  const double keep_scale = 1.0 / (1.0 - p);
  for (auto& m : mask) {
    m = rng.uniform() >= p ? keep_scale : 0.0;
  }
  return mask;
}

inline ForwardTrace forward(const EncoderParams& params, const TokenSequence& tokens,
                            std::optional<std::uint64_t> dropout_seed = std::nullopt) {
  const auto& d = params.dims();
  if (tokens.empty()) {
    throw Error("cannot encode an empty token sequence");
  }
  ForwardTrace t;
  t.tokens = tokens;
  t.pooled.assign(d.embed, 0.0);
  const auto emb = params.embedding();
  for (const auto tok : tokens) {
    if (tok >= d.vocab_size) {
      throw Error("token index " + std::to_string(tok) + " outside vocabulary of size " +
                  std::to_string(d.vocab_size));
    }
    const auto row = emb.subspan(static_cast<std::size_t>(tok) * d.embed, d.embed);
    for (std::size_t e = 0; e < d.embed; ++e) {
      t.pooled[e] += row[e];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(tokens.size());
  for (auto& v : t.pooled) {
    v *= inv_n;
  }

  const auto w1 = params.w1();
  const auto b1 = params.b1();
  t.hidden.resize(d.hidden);
  for (std::size_t h = 0; h < d.hidden; ++h) {
    double acc = b1[h];
    const auto row = w1.subspan(h * d.embed, d.embed);
    for (std::size_t e = 0; e < d.embed; ++e) {
      acc += row[e] * t.pooled[e];
    }
    t.hidden[h] = std::tanh(acc);
  }

  t.mask = dropout_seed ? dropout_mask(*dropout_seed, d.hidden, params.dropout()) : std::vector<double>(d.hidden, 1.0);

  const auto w2 = params.w2();
  const auto b2 = params.b2();
  t.output.resize(d.output);
  for (std::size_t o = 0; o < d.output; ++o) {
    double acc = b2[o];
    const auto row = w2.subspan(o * d.hidden, d.hidden);
    for (std::size_t h = 0; h < d.hidden; ++h) {
      acc += row[h] * t.hidden[h] * t.mask[h];
    }
    t.output[o] = acc;
  }
  return t;
}

/// Embeds a token sequence. Without a dropout seed the result is a pure
/// function of (params, tokens).
inline EmbeddingVector encode(const EncoderParams& params, const TokenSequence& tokens,
                              std::optional<std::uint64_t> dropout_seed = std::nullopt) {
  return forward(params, tokens, dropout_seed).output;
}

/// Accumulates d(loss)/d(params) into grad, given d(loss)/d(output).
inline void backward(const EncoderParams& params, const ForwardTrace& t, std::span<const double> d_output,
                     EncoderParams& grad) {
  const auto& d = params.dims();
  const auto w1 = params.w1();
  const auto w2 = params.w2();
  auto g_emb = grad.embedding();
  auto g_w1 = grad.w1();
  auto g_b1 = grad.b1();
  auto g_w2 = grad.w2();
  auto g_b2 = grad.b2();

  std::vector<double> d_hidden(d.hidden, 0.0);
  for (std::size_t o = 0; o < d.output; ++o) {
    const double g = d_output[o];
    if (g == 0.0) {
      continue;
    }
    g_b2[o] += g;
    const auto row = w2.subspan(o * d.hidden, d.hidden);
    auto g_row = g_w2.subspan(o * d.hidden, d.hidden);
    for (std::size_t h = 0; h < d.hidden; ++h) {
      g_row[h] += g * t.hidden[h] * t.mask[h];
      d_hidden[h] += g * row[h];
    }
  }

  std::vector<double> d_pooled(d.embed, 0.0);
  for (std::size_t h = 0; h < d.hidden; ++h) {
    const double g = d_hidden[h] * t.mask[h] * (1.0 - t.hidden[h] * t.hidden[h]);
    if (g == 0.0) {
      continue;
    }
    g_b1[h] += g;
    const auto row = w1.subspan(h * d.embed, d.embed);
    auto g_row = g_w1.subspan(h * d.embed, d.embed);
    for (std::size_t e = 0; e < d.embed; ++e) {
      g_row[e] += g * t.pooled[e];
      d_pooled[e] += g * row[e];
    }
  }

  const double inv_n = 1.0 / static_cast<double>(t.tokens.size());
  for (const auto tok : t.tokens) {
    auto g_row = g_emb.subspan(static_cast<std::size_t>(tok) * d.embed, d.embed);
    for (std::size_t e = 0; e < d.embed; ++e) {
      g_row[e] += d_pooled[e] * inv_n;
    }
  }
}

/// Parameters plus the vocabulary they were trained against.
struct Model {
  Vocabulary vocab;
  EncoderParams params;

  [[nodiscard]] EmbeddingVector embed(std::string_view text) const {
    const auto tokens = tokenize(vocab, text);
    if (tokens.empty()) {
      throw Error("text has no tokens: \"" + std::string(text.substr(0, 60)) + "\"");
    }
    return encode(params, tokens);
  }
};

}  // namespace semcse
