#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semcse/corpus.hpp"
#include "semcse/error.hpp"

namespace semcse {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";

/// Lowercased words: maximal runs of ASCII letters/digits or non-ASCII bytes.
inline std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || std::isalnum(u)) {
      cur += static_cast<char>(u < 0x80 ? std::tolower(u) : u);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) {
    out.push_back(std::move(cur));
  }
  return out;
}

class Vocabulary {
 public:
  Vocabulary() : tokens_{std::string(kPadToken), std::string(kUnkToken)} {
    index_.emplace(tokens_[0], kPadId);
    index_.emplace(tokens_[1], kUnkId);
  }

  /// Appends a token; no-op if already present.
  TokenId add(const std::string& token) {
    const auto [it, inserted] = index_.emplace(token, static_cast<TokenId>(tokens_.size()));
    if (inserted) {
      tokens_.push_back(token);
    }
    return it->second;
  }

  [[nodiscard]] TokenId lookup(const std::string& token) const {
    const auto it = index_.find(token);
    return it == index_.end() ? kUnkId : it->second;
  }

  [[nodiscard]] bool contains(const std::string& token) const { return index_.contains(token); }
  [[nodiscard]] const std::string& token(TokenId id) const { return tokens_.at(id); }
  [[nodiscard]] std::size_t size() const noexcept { return tokens_.size(); }
  [[nodiscard]] const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  void save(std::ostream& out) const {
    for (const auto& t : tokens_) {
      out << t << '\n';
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error("cannot write vocabulary file " + path);
    }
    save(out);
  }

  static Vocabulary load(std::istream& in) {
    Vocabulary v;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      if (n < 2) {
        if (line != v.tokens_[n]) {
          throw Error("vocabulary must start with " + std::string(kPadToken) + " and " + std::string(kUnkToken));
        }
      } else if (v.add(line) != n) {
        throw Error("duplicate vocabulary entry \"" + line + "\"");
      }
      ++n;
    }
    if (n < 2) {
      throw Error("vocabulary file is truncated");
    }
    return v;
  }

  static Vocabulary load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw Error("cannot open vocabulary file " + path);
    }
    return load(in);
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Vocabulary over titles, abstracts and summaries. Entries with at least
/// min_count occurrences, by descending count then lexicographic order.
inline Vocabulary build_vocab(const Corpus& corpus, std::size_t min_count = 1) {
  if (corpus.empty()) {
    throw Error("cannot build a vocabulary from an empty corpus");
  }
  std::map<std::string, std::size_t> counts;
  const auto count = [&](std::string_view text) {
    for (auto& w : word_tokens(text)) {
      ++counts[std::move(w)];
    }
  };
  for (const auto& d : corpus.documents()) {
    count(d.title);
    count(d.abstract);
  }
  for (const auto& s : corpus.summaries()) {
    count(s.text);
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) {
      kept.emplace_back(w, c);
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [w, c] : kept) {
    v.add(w);
  }
  return v;
}

inline TokenSequence tokenize(const Vocabulary& vocab, std::string_view text) {
  TokenSequence out;
  for (const auto& w : word_tokens(text)) {
    out.push_back(vocab.lookup(w));
  }
  return out;
}

}  // namespace semcse
