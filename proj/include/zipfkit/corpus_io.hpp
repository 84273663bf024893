#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "zipfkit/corpus.hpp"

namespace zipfkit {

// Shortest round-trip decimal form; stable across runs.
inline std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

// RFC 4180 quoting for fields that need it.
inline std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// One sentence per line, tokens joined by single spaces.
inline void write_corpus_text(std::ostream& out, const Corpus& corpus) {
  for (const auto& sentence : corpus.sentences) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out << ' ';
      out << corpus.intern.surface(sentence[i]);
    }
    out << '\n';
  }
}

inline Corpus read_corpus_text(std::istream& in, std::string source = {}) {
  Corpus corpus;
  corpus.meta.source = std::move(source);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Sentence sentence;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const std::size_t next = line.find(' ', pos);
      const std::size_t end = next == std::string::npos ? line.size() : next;
      if (end > pos) sentence.push_back(corpus.intern.id(std::string_view(line).substr(pos, end - pos)));
      pos = end + 1;
    }
    if (!sentence.empty()) corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

inline nlohmann::json meta_to_json(const CorpusMeta& meta) {
  nlohmann::json j;
  j["source"] = meta.source;
  j["seed"] = meta.seed ? nlohmann::json(*meta.seed) : nlohmann::json(nullptr);
  j["spec"] = meta.spec;
  return j;
}

inline CorpusMeta meta_from_json(const nlohmann::json& j) {
  CorpusMeta meta;
  meta.source = j.value("source", std::string{});
  if (j.contains("seed") && !j["seed"].is_null()) meta.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("spec")) meta.spec = j["spec"];
  return meta;
}

inline void write_rank_csv(std::ostream& out, const RankTable& table) {
  out << "rank,surface,count,freq\n";
  for (const auto& e : table.entries) {
    out << e.rank << ',' << csv_field(e.surface) << ',' << e.count << ','
        << format_double(static_cast<double>(e.count) / static_cast<double>(table.total)) << '\n';
  }
}

}  // namespace zipfkit
