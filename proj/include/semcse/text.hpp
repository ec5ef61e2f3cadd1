#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semcse/error.hpp"

namespace semcse {

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) {
    s.remove_prefix(1);
  }
  while (!s.empty() && is_space(s.back())) {
    s.remove_suffix(1);
  }
  return s;
}

// Abbreviations whose final period never ends a sentence.
inline constexpr std::string_view kNonTerminalAbbreviations[] = {"et al.", "e.g.", "i.e.", "vs.", "Fig.", "Eq."};

inline bool ends_with_abbreviation(std::string_view prefix) {
  for (const auto abbr : kNonTerminalAbbreviations) {
    if (prefix.size() < abbr.size() || prefix.substr(prefix.size() - abbr.size()) != abbr) {
      continue;
    }
    const std::size_t start = prefix.size() - abbr.size();
    if (start == 0 || !std::isalnum(static_cast<unsigned char>(prefix[start - 1]))) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Number of Unicode code points in a UTF-8 string.
inline std::size_t char_count(std::string_view s) {
  std::size_t n = 0;
  for (const char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0U) != 0x80U) {
      ++n;
    }
  }
  return n;
}

/// Splits text into sentences. A sentence ends at '.', '!' or '?' when the
/// terminator is followed by whitespace and then an uppercase letter or digit,
/// unless the terminator closes one of the known abbreviations ("et al.",
/// "e.g.", "i.e.", "vs.", "Fig.", "Eq."). Text without any boundary is one
/// sentence; blank text yields no sentences.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      continue;
    }
    std::size_t j = i + 1;
    if (j >= text.size() || !detail::is_space(text[j])) {
      continue;
    }
    while (j < text.size() && detail::is_space(text[j])) {
      ++j;
    }
    if (j >= text.size()) {
      continue;
    }
    const auto next = static_cast<unsigned char>(text[j]);
    if (!std::isupper(next) && !std::isdigit(next)) {
      continue;
    }
    if (c == '.' && detail::ends_with_abbreviation(text.substr(0, i + 1))) {
      continue;
    }
    const auto sentence = detail::trim(text.substr(start, i + 1 - start));
    if (!sentence.empty()) {
      out.emplace_back(sentence);
    }
    start = j;
  }
  const auto tail = detail::trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) {
    out.emplace_back(tail);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep,
                        std::size_t begin = 0, std::size_t end = std::string::npos) {
  end = std::min(end, parts.size());
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) {
      out += sep;
    }
    out += parts[i];
  }
  return out;
}

struct AbstractHalves {
  std::string first;
  std::string second;
};

/// Splits an abstract at the sentence boundary whose left-hand character
/// count (sum of sentence lengths) is closest to half the total. Ties go to
/// the earlier boundary.
inline AbstractHalves split_abstract_halves(std::string_view abstract) {
  const auto sentences = split_sentences(abstract);
  if (sentences.size() < 2) {
    throw Error("cannot halve an abstract with fewer than two sentences");
  }
  std::size_t total = 0;
  for (const auto& s : sentences) {
    total += char_count(s);
  }
  const double half = static_cast<double>(total) / 2.0;
  std::size_t best_boundary = 1;
  double best_gap = 0.0;
  std::size_t left = 0;
  for (std::size_t b = 1; b < sentences.size(); ++b) {
    left += char_count(sentences[b - 1]);
    const double gap = std::abs(static_cast<double>(left) - half);
    if (b == 1 || gap < best_gap) {
      best_gap = gap;
      best_boundary = b;
    }
  }
  return {join(sentences, " ", 0, best_boundary), join(sentences, " ", best_boundary)};
}

}  // namespace semcse
