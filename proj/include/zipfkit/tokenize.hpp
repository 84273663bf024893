#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zipfkit/corpus.hpp"
#include "zipfkit/error.hpp"

namespace zipfkit {

enum class TokenizerMode { Words, Nmer, Delimiter };
enum class NmerWindow { Sliding, Disjoint };
// What an n-mer scan does with a character outside {A,C,G,T}.
enum class InvalidBasePolicy { Error, Skip, Break };

struct TokenizerConfig {
  TokenizerMode mode = TokenizerMode::Words;
  std::size_t n = 6;
  NmerWindow window = NmerWindow::Sliding;
  char delimiter = 'e';
  bool lowercase = false;
  bool strip_punctuation = false;
  InvalidBasePolicy invalid_base = InvalidBasePolicy::Break;

  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

NLOHMANN_JSON_SERIALIZE_ENUM(TokenizerMode, {{TokenizerMode::Words, "words"},
                                             {TokenizerMode::Nmer, "nmer"},
                                             {TokenizerMode::Delimiter, "delimiter"}})
NLOHMANN_JSON_SERIALIZE_ENUM(NmerWindow, {{NmerWindow::Sliding, "sliding"}, {NmerWindow::Disjoint, "disjoint"}})
NLOHMANN_JSON_SERIALIZE_ENUM(InvalidBasePolicy, {{InvalidBasePolicy::Error, "error"},
                                                 {InvalidBasePolicy::Skip, "skip"},
                                                 {InvalidBasePolicy::Break, "break"}})

// Only the fields that matter for the mode are emitted, so two configs that
// tokenize identically serialize identically.
inline nlohmann::json to_json(const TokenizerConfig& c) {
  nlohmann::json j{{"mode", c.mode}};
  switch (c.mode) {
    case TokenizerMode::Words:
      j["lowercase"] = c.lowercase;
      j["strip_punctuation"] = c.strip_punctuation;
      break;
    case TokenizerMode::Nmer:
      j["n"] = c.n;
      j["window"] = c.window;
      j["invalid_base"] = c.invalid_base;
      break;
    case TokenizerMode::Delimiter:
      j["delimiter"] = std::string(1, c.delimiter);
      break;
  }
  return j;
}

inline TokenizerConfig tokenizer_from_json(const nlohmann::json& j) {
  TokenizerConfig c;
  c.mode = j.value("mode", TokenizerMode::Words);
  c.n = j.value("n", c.n);
  c.window = j.value("window", c.window);
  c.invalid_base = j.value("invalid_base", c.invalid_base);
  c.lowercase = j.value("lowercase", false);
  c.strip_punctuation = j.value("strip_punctuation", false);
  const auto delim = j.value("delimiter", std::string(1, c.delimiter));
  if (delim.size() != 1) throw Error(Errc::InvalidSpec, "delimiter must be a single character");
  c.delimiter = delim[0];
  return c;
}

inline Corpus tokenize_words(std::string_view text, const TokenizerConfig& config = {}) {
  std::string normalized;
  normalized.reserve(text.size());
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (config.strip_punctuation && std::ispunct(uc)) continue;
    normalized += config.lowercase ? static_cast<char>(std::tolower(uc)) : c;
  }

  Corpus corpus;
  corpus.meta.spec = to_json(TokenizerConfig{.mode = TokenizerMode::Words,
                                             .lowercase = config.lowercase,
                                             .strip_punctuation = config.strip_punctuation});
  std::string_view rest(normalized);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    const auto line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);

    Sentence sentence;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      if (end > pos) sentence.push_back(corpus.intern.id(line.substr(pos, end - pos)));
      pos = end;
    }
    if (!sentence.empty()) corpus.sentences.push_back(std::move(sentence));
  }
  if (corpus.sentences.empty()) throw Error(Errc::EmptyCorpus, "no words after normalization");
  return corpus;
}

namespace detail {

inline bool is_acgt(char c) noexcept { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

// Splits an uppercased sequence into maximal runs of valid bases according
// to the invalid-base policy.
inline std::vector<std::string> base_runs(std::string_view seq, InvalidBasePolicy policy) {
  std::vector<std::string> runs(1);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(seq[i])));
    if (is_acgt(c)) {
      runs.back() += c;
      continue;
    }
    switch (policy) {
      case InvalidBasePolicy::Error:
        throw Error(Errc::InvalidBase, std::string("invalid base '") + seq[i] + "' at offset " + std::to_string(i));
      case InvalidBasePolicy::Skip:
        break;
      case InvalidBasePolicy::Break:
        if (!runs.back().empty()) runs.emplace_back();
        break;
    }
  }
  return runs;
}

}  // namespace detail

inline Corpus tokenize_nmers(std::string_view seq, std::size_t n, NmerWindow window,
                             InvalidBasePolicy policy = InvalidBasePolicy::Break) {
  if (n == 0) throw Error(Errc::InvalidSpec, "n must be >= 1");
  if (seq.size() < n)
    throw Error(Errc::SequenceTooShort, "sequence of length " + std::to_string(seq.size()) +
                                            " is shorter than n = " + std::to_string(n));
  Corpus corpus;
  corpus.meta.spec = to_json(TokenizerConfig{.mode = TokenizerMode::Nmer, .n = n, .window = window,
                                             .invalid_base = policy});
  Sentence sentence;
  for (const auto& run : detail::base_runs(seq, policy)) {
    if (run.size() < n) continue;
    const std::size_t step = window == NmerWindow::Sliding ? 1 : n;
    for (std::size_t i = 0; i + n <= run.size(); i += step)
      sentence.push_back(corpus.intern.id(std::string_view(run).substr(i, n)));
  }
  if (sentence.empty())
    throw Error(Errc::SequenceTooShort, "no run of valid bases is at least n long");
  corpus.sentences.push_back(std::move(sentence));
  return corpus;
}

// Pseudo-words bounded by a delimiter character: each token runs from one
// delimiter occurrence to the next, both inclusive, and the closing delimiter
// also opens the following token.
inline Corpus tokenize_delimited(std::string_view text, char delimiter) {
  Corpus corpus;
  corpus.meta.spec = to_json(TokenizerConfig{.mode = TokenizerMode::Delimiter, .delimiter = delimiter});
  Sentence sentence;
  std::size_t open = text.find(delimiter);
  while (open != std::string_view::npos) {
    const std::size_t close = text.find(delimiter, open + 1);
    if (close == std::string_view::npos) break;
    sentence.push_back(corpus.intern.id(text.substr(open, close - open + 1)));
    open = close;
  }
  if (sentence.empty())
    throw Error(Errc::NoTokens, std::string("fewer than two '") + delimiter + "' characters");
  corpus.sentences.push_back(std::move(sentence));
  return corpus;
}

// Dispatch on config. In n-mer mode all whitespace is removed first so a
// multi-line sequence reads as one strand.
inline Corpus tokenize(std::string_view text, const TokenizerConfig& config) {
  switch (config.mode) {
    case TokenizerMode::Words:
      return tokenize_words(text, config);
    case TokenizerMode::Nmer: {
      std::string seq;
      for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) seq += c;
      return tokenize_nmers(seq, config.n, config.window, config.invalid_base);
    }
    case TokenizerMode::Delimiter:
      return tokenize_delimited(text, config.delimiter);
  }
  throw Error(Errc::InvalidSpec, "unknown tokenizer mode");
}

}  // namespace zipfkit
