#pragma once

// Deterministic synthetic corpora with known topic structure.
//
// The generator models a small "world": a shared vocabulary used by every
// topic with Zipfian frequencies (function-word like), and one disjoint
// vocabulary per topic. Each document belongs to topic (index mod n_topics)
// and picks a handful of focus words from its topic vocabulary. Every text
// of a document (title, abstract sentences, summaries, query) draws each word
// from the mixture
//
//   shared (Zipf)  |  document focus words  |  whole topic vocabulary
//
// so summaries of one document overlap lexically with its abstract, documents
// of one topic overlap with each other, and the shared words carry noise only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "semcse/corpus.hpp"
#include "semcse/error.hpp"
#include "semcse/rng.hpp"

namespace semcse {

struct SyntheticOptions {
  std::size_t n_docs = 200;
  std::size_t n_topics = 8;
  std::size_t vocab_per_topic = 50;
  std::size_t shared_vocab = 30;
  std::uint64_t seed = 7;
};

/// Word-mixture knobs. The defaults are what the CLI and tests use.
struct SyntheticStyle {
  double shared_prob = 0.55;   // mean rate of shared words
  double shared_spread = 0.4;  // per-text rate ~ U[shared_prob - spread, shared_prob + spread]
  double focus_prob = 0.7;     // among non-shared words
  double zipf_exponent = 2.0;
  std::size_t focus_words = 6;
  std::size_t summaries_per_doc = 3;
};

inline constexpr std::size_t kSyntheticPromptCount = 5;

namespace detail {

inline constexpr std::string_view kSyllables[] = {"ka", "lo", "mi", "re", "su", "ta", "ne", "vo",
                                                  "di", "pa", "go", "bu", "le", "zi", "ro", "fe",
                                                  "hu", "ja", "ko", "ni", "sa", "te", "mo", "ri"};
inline constexpr std::size_t kSyllableCount = std::size(kSyllables);

/// Bijective word form for a word id: base-24 digits (at least three), each
/// rendered as a two-letter syllable.
inline std::string word_form(std::size_t id) {
  std::vector<std::size_t> digits;
  do {
    digits.push_back(id % kSyllableCount);
    id /= kSyllableCount;
  } while (id > 0);
  while (digits.size() < 3) {
    digits.push_back(0);
  }
  std::string out;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    out += kSyllables[*it];
  }
  return out;
}

inline std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') {
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
  }
  return s;
}

class WordSampler {
 public:
  WordSampler(const SyntheticOptions& opt, const SyntheticStyle& style) : opt_(opt), style_(style) {
    double total = 0.0;
    zipf_cdf_.reserve(opt.shared_vocab);
    for (std::size_t r = 0; r < opt.shared_vocab; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), style.zipf_exponent);
      zipf_cdf_.push_back(total);
    }
    for (auto& c : zipf_cdf_) {
      c /= total;
    }
  }

  [[nodiscard]] std::size_t shared_word(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - zipf_cdf_.begin()), opt_.shared_vocab - 1);
  }

  [[nodiscard]] std::size_t topic_word(std::size_t topic, std::size_t local) const {
    return opt_.shared_vocab + topic * opt_.vocab_per_topic + local;
  }

  [[nodiscard]] bool is_topic_word(std::size_t id) const { return id >= opt_.shared_vocab; }

  /// Shared-word rate for one text.
  double text_rate(Rng& rng) const {
    const double r = style_.shared_prob + style_.shared_spread * (2.0 * rng.uniform() - 1.0);
    return std::clamp(r, 0.0, 1.0);
  }

  /// One word id for a document with the given topic and focus set.
  std::size_t draw(Rng& rng, double shared_rate, std::size_t topic, const std::vector<std::size_t>& focus) const {
    if (opt_.shared_vocab > 0 && rng.uniform() < shared_rate) {
      return shared_word(rng);
    }
    if (rng.uniform() < style_.focus_prob) {
      return focus[rng.below(focus.size())];
    }
    return topic_word(topic, rng.below(opt_.vocab_per_topic));
  }

 private:
  SyntheticOptions opt_;
  SyntheticStyle style_;
  std::vector<double> zipf_cdf_;
};

inline std::string render(const std::vector<std::size_t>& ids, bool sentence) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) {
      out += ' ';
    }
    out += i == 0 && sentence ? capitalize(word_form(ids[i])) : word_form(ids[i]);
  }
  if (sentence) {
    out += '.';
  }
  return out;
}

}  // namespace detail

/// Topic label used for documents of topic t.
inline std::string topic_label(std::size_t t) { return "topic-" + std::to_string(t); }

/// Pure function of (options, style): same arguments, same corpus bytes.
inline Corpus generate_synthetic_corpus(const SyntheticOptions& opt, const SyntheticStyle& style = {}) {
  if (opt.n_topics < 2) {
    throw Error("n_topics must be >= 2 (got " + std::to_string(opt.n_topics) + ")");
  }
  if (opt.n_docs < opt.n_topics) {
    throw Error("n_docs must be >= n_topics (got " + std::to_string(opt.n_docs) + " < " +
                std::to_string(opt.n_topics) + ")");
  }
  if (opt.vocab_per_topic < style.focus_words || opt.vocab_per_topic == 0) {
    throw Error("vocab_per_topic must be >= " + std::to_string(std::max<std::size_t>(style.focus_words, 1)));
  }
  if (style.summaries_per_doc < 2) {
    throw Error("synthetic corpora need at least two summaries per document");
  }

  const detail::WordSampler sampler(opt, style);
  Rng rng = Rng::stream(opt.seed, "synthetic-corpus");
  Corpus corpus;

  const auto sentence_of = [&](std::size_t lo, std::size_t hi, double rate, std::size_t topic,
                               const std::vector<std::size_t>& focus) {
    const std::size_t len = lo + rng.below(hi - lo + 1);
    std::vector<std::size_t> ids(len);
    for (auto& id : ids) {
      id = sampler.draw(rng, rate, topic, focus);
    }
    return ids;
  };

  for (std::size_t d = 0; d < opt.n_docs; ++d) {
    const std::size_t topic = d % opt.n_topics;

    // Focus words: distinct local indices via partial Fisher-Yates.
    std::vector<std::size_t> pool(opt.vocab_per_topic);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      pool[i] = i;
    }
    std::vector<std::size_t> focus;
    for (std::size_t i = 0; i < style.focus_words; ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      focus.push_back(sampler.topic_word(topic, pool[i]));
    }

    Document doc;
    char id[32];
    std::snprintf(id, sizeof id, "doc-%04zu", d);
    doc.id = id;
    doc.category = topic_label(topic);
    // Title and abstract share one writing style; each summary and the query
    // get their own.
    const double doc_rate = sampler.text_rate(rng);
    doc.title = detail::render(sentence_of(5, 8, doc_rate, topic, focus), false);
    doc.title = detail::capitalize(doc.title);

    const std::size_t n_sentences = 4 + rng.below(3);
    std::vector<std::vector<std::size_t>> abstract_ids;
    for (std::size_t s = 0; s < n_sentences; ++s) {
      abstract_ids.push_back(sentence_of(8, 14, doc_rate, topic, focus));
    }
    // Anchor word: the abstract always contains focus[0].
    abstract_ids[0][rng.below(abstract_ids[0].size())] = focus[0];
    std::vector<std::size_t> abstract_topic_words;
    for (const auto& sent : abstract_ids) {
      for (const auto w : sent) {
        if (sampler.is_topic_word(w)) {
          abstract_topic_words.push_back(w);
        }
      }
    }
    std::sort(abstract_topic_words.begin(), abstract_topic_words.end());
    abstract_topic_words.erase(std::unique(abstract_topic_words.begin(), abstract_topic_words.end()),
                               abstract_topic_words.end());
    std::string abstract;
    for (std::size_t s = 0; s < abstract_ids.size(); ++s) {
      if (s > 0) {
        abstract += ' ';
      }
      abstract += detail::render(abstract_ids[s], true);
    }
    doc.abstract = std::move(abstract);
    doc.query = detail::render(sentence_of(4, 6, sampler.text_rate(rng), topic, focus), false);

    std::vector<SummaryRecord> summaries;
    for (std::size_t k = 0; k < style.summaries_per_doc; ++k) {
      auto ids = sentence_of(8, 12, sampler.text_rate(rng), topic, focus);
      const bool overlaps = std::any_of(ids.begin(), ids.end(), [&](std::size_t w) {
        return std::binary_search(abstract_topic_words.begin(), abstract_topic_words.end(), w);
      });
      if (!overlaps) {
        ids[rng.below(ids.size())] = abstract_topic_words[rng.below(abstract_topic_words.size())];
      }
      summaries.push_back({doc.id, static_cast<int>(k % kSyntheticPromptCount), detail::render(ids, true)});
    }

    corpus.add_document(std::move(doc));
    for (auto& s : summaries) {
      corpus.add_summary(std::move(s));
    }
  }
  return corpus;
}

/// Word forms of topic t's vocabulary, for tests that scan generated text.
inline std::vector<std::string> topic_vocabulary(const SyntheticOptions& opt, std::size_t t) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < opt.vocab_per_topic; ++i) {
    out.push_back(detail::word_form(opt.shared_vocab + t * opt.vocab_per_topic + i));
  }
  return out;
}

}  // namespace semcse
