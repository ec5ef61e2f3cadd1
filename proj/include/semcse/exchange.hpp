#pragma once

// Embedding exchange files (JSON lines):
//
//   {"source":"name","dim":D}
//   {"key":"doc-0001","vec":[...]}
//   ...

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "semcse/error.hpp"
#include "semcse/ranking.hpp"

namespace semcse {

inline void write_embeddings(const EmbeddingSet& set, std::ostream& out) {
  nlohmann::ordered_json header;
  header["source"] = set.source();
  header["dim"] = set.dim();
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    nlohmann::ordered_json line;
    line["key"] = set.key(i);
    line["vec"] = set.vector(i);
    out << line.dump() << '\n';
  }
}

inline void write_embeddings(const EmbeddingSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write embedding file " + path);
  }
  write_embeddings(set, out);
}

inline EmbeddingSet read_embeddings(std::istream& in, const std::string& label = "embedding file") {
  std::string raw;
  std::size_t line_no = 0;
  std::optional<EmbeddingSet> set;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(label + " line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    try {
      if (!set) {
        if (!j.contains("source") || !j.contains("dim")) {
          throw Error("header must carry \"source\" and \"dim\"");
        }
        set.emplace(j.at("source").get<std::string>(), j.at("dim").get<std::size_t>());
        continue;
      }
      auto vec = j.at("vec").get<std::vector<double>>();
      if (vec.size() != set->dim()) {
        throw Error("vector has dimension " + std::to_string(vec.size()) + " but header says " +
                    std::to_string(set->dim()));
      }
      set->add(j.at("key").get<std::string>(), std::move(vec));
    } catch (const nlohmann::json::exception& e) {
      throw Error(label + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(label + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!set) {
    throw Error(label + ": missing header line");
  }
  return std::move(*set);
}

inline EmbeddingSet read_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open embedding file " + path);
  }
  return read_embeddings(in, path);
}

}  // namespace semcse
