#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semcse/error.hpp"
#include "semcse/text.hpp"

namespace semcse {

struct Document {
  std::string id;
  std::string title;
  std::string abstract;
  std::optional<std::string> category;
  std::optional<std::string> query;

  /// Text used whenever a whole paper is embedded.
  [[nodiscard]] std::string title_abstract() const { return title + ". " + abstract; }
};

struct SummaryRecord {
  std::string doc_id;
  int prompt_id = 0;
  std::string text;
};

inline constexpr int kMaxPromptId = 4;

/// Ordered documents plus the summaries attached to each. Every mutation goes
/// through add_document/add_summary, which keep ids unique and summaries
/// pointing at existing documents.
class Corpus {
 public:
  void add_document(Document doc) {
    if (doc.id.empty()) {
      throw Error("document id must be nonempty");
    }
    if (detail::trim(doc.title).empty()) {
      throw Error("document \"" + doc.id + "\" has an empty title");
    }
    if (detail::trim(doc.abstract).empty()) {
      throw Error("document \"" + doc.id + "\" has an empty abstract");
    }
    if (index_.contains(doc.id)) {
      throw Error("duplicate document id \"" + doc.id + "\"");
    }
    index_.emplace(doc.id, documents_.size());
    documents_.push_back(std::move(doc));
    by_doc_.emplace_back();
  }

  void add_summary(SummaryRecord summary) {
    const auto it = index_.find(summary.doc_id);
    if (it == index_.end()) {
      throw Error("summary references unknown document \"" + summary.doc_id + "\"");
    }
    if (summary.prompt_id < 0 || summary.prompt_id > kMaxPromptId) {
      throw Error("summary prompt_id " + std::to_string(summary.prompt_id) + " outside [0,4]");
    }
    if (detail::trim(summary.text).empty()) {
      throw Error("summary for \"" + summary.doc_id + "\" has empty text");
    }
    by_doc_[it->second].push_back(summaries_.size());
    summaries_.push_back(std::move(summary));
  }

  [[nodiscard]] const std::vector<Document>& documents() const noexcept { return documents_; }
  [[nodiscard]] const std::vector<SummaryRecord>& summaries() const noexcept { return summaries_; }
  [[nodiscard]] std::size_t size() const noexcept { return documents_.size(); }
  [[nodiscard]] bool empty() const noexcept { return documents_.empty(); }
  [[nodiscard]] const Document& operator[](std::size_t i) const { return documents_.at(i); }

  /// Summary texts of document i, in insertion order.
  [[nodiscard]] std::vector<std::string_view> summaries_of(std::size_t i) const {
    std::vector<std::string_view> out;
    for (const auto s : by_doc_.at(i)) {
      out.emplace_back(summaries_[s].text);
    }
    return out;
  }

  [[nodiscard]] std::size_t summary_count(std::size_t i) const { return by_doc_.at(i).size(); }

  /// Positions in summaries() belonging to document i.
  [[nodiscard]] const std::vector<std::size_t>& summary_indices(std::size_t i) const { return by_doc_.at(i); }

  [[nodiscard]] std::optional<std::size_t> find(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  /// Documents [begin, end) with their summaries, as a new corpus.
  [[nodiscard]] Corpus slice(std::size_t begin, std::size_t end) const {
    Corpus out;
    end = std::min(end, documents_.size());
    for (std::size_t i = begin; i < end; ++i) {
      out.add_document(documents_[i]);
      for (const auto s : by_doc_[i]) {
        out.add_summary(summaries_[s]);
      }
    }
    return out;
  }

 private:
  std::vector<Document> documents_;
  std::vector<SummaryRecord> summaries_;
  std::vector<std::vector<std::size_t>> by_doc_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::string line_error(std::size_t line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key,
                                                  std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_string()) {
    throw Error(line_error(line, std::string("field \"") + key + "\" must be a string or null"));
  }
  return it->get<std::string>();
}

inline std::string required_string(const nlohmann::json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(line_error(line, std::string("missing string field \"") + key + "\""));
  }
  return it->get<std::string>();
}

}  // namespace detail

/// Reads the JSON-lines corpus format. Blank lines are ignored; everything
/// else must be a `doc` or `summary` object, and a summary must come after
/// its document.
inline Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (detail::trim(raw).empty()) {
      continue;
    }
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(detail::line_error(line_no, std::string("malformed JSON: ") + e.what()));
    }
    if (!obj.is_object()) {
      throw Error(detail::line_error(line_no, "expected a JSON object"));
    }
    const auto kind = detail::required_string(obj, "kind", line_no);
    try {
      if (kind == "doc") {
        Document doc;
        doc.id = detail::required_string(obj, "id", line_no);
        doc.title = detail::required_string(obj, "title", line_no);
        doc.abstract = detail::required_string(obj, "abstract", line_no);
        doc.category = detail::optional_string(obj, "category", line_no);
        doc.query = detail::optional_string(obj, "query", line_no);
        corpus.add_document(std::move(doc));
      } else if (kind == "summary") {
        SummaryRecord s;
        s.doc_id = detail::required_string(obj, "doc_id", line_no);
        const auto pid = obj.find("prompt_id");
        if (pid == obj.end() || !pid->is_number_integer()) {
          throw Error(detail::line_error(line_no, "missing integer field \"prompt_id\""));
        }
        s.prompt_id = pid->get<int>();
        s.text = detail::required_string(obj, "text", line_no);
        corpus.add_summary(std::move(s));
      } else {
        throw Error(detail::line_error(line_no, "unknown kind \"" + kind + "\""));
      }
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) {
        throw;
      }
      throw Error(detail::line_error(line_no, msg));
    }
  }
  return corpus;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open corpus file " + path);
  }
  return parse_corpus(in);
}

inline nlohmann::ordered_json to_json(const Document& d) {
  nlohmann::ordered_json j;
  j["kind"] = "doc";
  j["id"] = d.id;
  j["title"] = d.title;
  j["abstract"] = d.abstract;
  j["category"] = d.category ? nlohmann::ordered_json(*d.category) : nlohmann::ordered_json(nullptr);
  j["query"] = d.query ? nlohmann::ordered_json(*d.query) : nlohmann::ordered_json(nullptr);
  return j;
}

inline nlohmann::ordered_json to_json(const SummaryRecord& s) {
  nlohmann::ordered_json j;
  j["kind"] = "summary";
  j["doc_id"] = s.doc_id;
  j["prompt_id"] = s.prompt_id;
  j["text"] = s.text;
  return j;
}

/// Canonical serialization: each document line followed by its summaries.
inline void save_corpus(const Corpus& corpus, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out << to_json(corpus[i]).dump() << '\n';
    for (const auto s : corpus.summary_indices(i)) {
      out << to_json(corpus.summaries()[s]).dump() << '\n';
    }
  }
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write corpus file " + path);
  }
  save_corpus(corpus, out);
}

inline std::string to_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  save_corpus(corpus, out);
  return out.str();
}

}  // namespace semcse
