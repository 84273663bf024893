#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zipfkit/error.hpp"

namespace zipfkit {

using TokenId = std::uint32_t;
using Count = std::uint64_t;
using Sentence = std::vector<TokenId>;

struct Token {
  TokenId id = 0;
  std::string surface;

  friend bool operator==(const Token&, const Token&) = default;
};

// Bijection surface <-> dense id, ids handed out in first-seen order.
class InternTable {
 public:
  Token intern(std::string_view surface) {
    if (surface.empty()) throw Error(Errc::InvalidToken, "empty surface");
    std::string key(surface);
    if (auto it = ids_.find(key); it != ids_.end()) return {it->second, std::move(key)};
    const auto id = static_cast<TokenId>(surfaces_.size());
    ids_.emplace(key, id);
    surfaces_.push_back(key);
    return {id, std::move(key)};
  }

  TokenId id(std::string_view surface) { return intern(surface).id; }

  std::optional<TokenId> find(std::string_view surface) const {
    if (auto it = ids_.find(std::string(surface)); it != ids_.end()) return it->second;
    return std::nullopt;
  }

  const std::string& surface(TokenId id) const { return surfaces_.at(id); }
  std::size_t size() const noexcept { return surfaces_.size(); }
  const std::vector<std::string>& surfaces() const noexcept { return surfaces_; }

 private:
  std::unordered_map<std::string, TokenId> ids_;
  std::vector<std::string> surfaces_;
};

// Provenance carried alongside a corpus: where it came from and how to
// regenerate it.
struct CorpusMeta {
  std::string source;
  std::optional<std::uint64_t> seed;
  nlohmann::json spec = nlohmann::json::object();
};

struct Corpus {
  std::vector<Sentence> sentences;
  InternTable intern;
  CorpusMeta meta;

  Count token_count() const noexcept {
    Count n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }

  void add_sentence(std::span<const std::string> words) {
    Sentence s;
    s.reserve(words.size());
    for (const auto& w : words) s.push_back(intern.id(w));
    sentences.push_back(std::move(s));
  }

  std::vector<std::string> words(std::size_t sentence) const {
    std::vector<std::string> out;
    for (TokenId id : sentences.at(sentence)) out.push_back(intern.surface(id));
    return out;
  }

  // Appends another corpus's sentences, re-interning its surfaces.
  void append(const Corpus& other) {
    for (const auto& s : other.sentences) {
      Sentence mapped;
      mapped.reserve(s.size());
      for (TokenId id : s) mapped.push_back(intern.id(other.intern.surface(id)));
      sentences.push_back(std::move(mapped));
    }
  }
};

struct RankEntry {
  TokenId id = 0;
  std::string surface;
  Count count = 0;
  std::uint64_t rank = 0;  // 1-based
};

struct RankTable {
  std::vector<RankEntry> entries;
  Count total = 0;

  std::size_t vocab() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  std::vector<Count> counts() const {
    std::vector<Count> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.count);
    return out;
  }
};

// Rank table over ids with nonzero count. Ties in count are broken by
// ascending surface so every word gets a distinct rank.
inline RankTable rank_table_from_counts(std::span<const Count> counts_by_id,
                                        const InternTable& intern) {
  RankTable table;
  for (std::size_t id = 0; id < counts_by_id.size(); ++id) {
    if (counts_by_id[id] == 0) continue;
    table.entries.push_back({static_cast<TokenId>(id), intern.surface(static_cast<TokenId>(id)),
                             counts_by_id[id], 0});
    table.total += counts_by_id[id];
  }
  if (table.entries.empty()) throw Error(Errc::EmptyCorpus, "no tokens to rank");
  std::sort(table.entries.begin(), table.entries.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.surface < b.surface;
  });
  for (std::size_t i = 0; i < table.entries.size(); ++i) table.entries[i].rank = i + 1;
  return table;
}

inline std::vector<Count> count_tokens(const Corpus& corpus) {
  std::vector<Count> counts(corpus.intern.size(), 0);
  for (const auto& s : corpus.sentences)
    for (TokenId id : s) ++counts[id];
  return counts;
}

inline RankTable build_rank_table(const Corpus& corpus) {
  if (corpus.token_count() == 0) throw Error(Errc::EmptyCorpus, "corpus has no tokens");
  const auto counts = count_tokens(corpus);
  return rank_table_from_counts(counts, corpus.intern);
}

// Convenience for callers holding (surface, count) pairs directly.
inline RankTable make_rank_table(const std::vector<std::pair<std::string, Count>>& word_counts) {
  InternTable intern;
  std::vector<Count> counts;
  for (const auto& [surface, count] : word_counts) {
    const TokenId id = intern.id(surface);
    if (id >= counts.size()) counts.resize(id + 1, 0);
    counts[id] += count;
  }
  return rank_table_from_counts(counts, intern);
}

}  // namespace zipfkit
