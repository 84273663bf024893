#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "zipfkit/corpus.hpp"
#include "zipfkit/error.hpp"
#include "zipfkit/rng.hpp"

namespace zipfkit {

inline std::string word_surface(std::size_t index_from_one) {
  return "w" + std::to_string(index_from_one);
}

namespace detail {

inline std::vector<double> cumulative_of(const std::vector<double>& probs) {
  std::vector<double> cum(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cum[i] = acc;
  }
  if (!cum.empty()) cum.back() = 1.0;
  return cum;
}

// Inverse-CDF lookup: first index whose cumulative mass exceeds u.
inline std::size_t draw_index(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(idx, cumulative.size() - 1);
}

// Maps 0-based word index to a TokenId, interning "w<j>" on first use.
class LazyWordIds {
 public:
  explicit LazyWordIds(std::size_t vocab) : ids_(vocab, kUnset) {}

  TokenId get(std::size_t index, InternTable& intern) {
    if (ids_[index] == kUnset) ids_[index] = intern.id(word_surface(index + 1));
    return ids_[index];
  }

 private:
  static constexpr TokenId kUnset = std::numeric_limits<TokenId>::max();
  std::vector<TokenId> ids_;
};

}  // namespace detail

// Biased M-sided die with p_i proportional to i^-xi.
struct DieSpec {
  std::size_t M = 1;
  double xi = 1.0;
  std::vector<double> probs;
  std::vector<double> cumulative;
};

inline DieSpec make_die(std::size_t M, double xi) {
  if (M == 0) throw Error(Errc::InvalidSpec, "die needs at least one side");
  if (!std::isfinite(xi) || xi < 0.0) throw Error(Errc::InvalidSpec, "xi must be finite and >= 0");
  DieSpec die{M, xi, std::vector<double>(M), {}};
  // Sum smallest terms first.
  double z = 0.0;
  for (std::size_t i = M; i >= 1; --i) z += std::pow(static_cast<double>(i), -xi);
  for (std::size_t i = 0; i < M; ++i) die.probs[i] = std::pow(static_cast<double>(i + 1), -xi) / z;
  die.cumulative = detail::cumulative_of(die.probs);
  return die;
}

inline nlohmann::json to_json(const DieSpec& die) {
  return {{"kind", "die"}, {"M", die.M}, {"xi", die.xi}, {"probs", die.probs}};
}

inline Corpus die_stream(const DieSpec& die, std::uint64_t n_tokens, std::uint64_t seed) {
  if (n_tokens == 0) throw Error(Errc::EmptyRequest, "n_tokens must be >= 1");
  Corpus corpus;
  corpus.meta.seed = seed;
  corpus.meta.source = "generator:die";
  corpus.meta.spec = {{"kind", "die"}, {"M", die.M}, {"xi", die.xi}, {"tokens", n_tokens}};
  Rng rng(seed);
  detail::LazyWordIds ids(die.M);
  Sentence stream;
  stream.reserve(n_tokens);
  for (std::uint64_t t = 0; t < n_tokens; ++t)
    stream.push_back(ids.get(detail::draw_index(die.cumulative, rng.uniform()), corpus.intern));
  corpus.sentences.push_back(std::move(stream));
  return corpus;
}

// First-order Markov chain over M words with per-step sentence termination.
struct MarkovSpec {
  std::size_t M = 1;
  std::vector<std::vector<double>> transition;
  std::vector<double> initial;
  double sentence_end_prob = 0.5;
};

inline void validate(const MarkovSpec& spec) {
  constexpr double kTol = 1e-12;
  auto check_row = [&](const std::vector<double>& row, const char* what) {
    if (row.size() != spec.M) throw Error(Errc::InvalidSpec, std::string(what) + " has wrong length");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw Error(Errc::InvalidSpec, std::string(what) + " has a negative or non-finite entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kTol) throw Error(Errc::InvalidSpec, std::string(what) + " does not sum to 1");
  };
  if (spec.M == 0) throw Error(Errc::InvalidSpec, "markov chain needs at least one state");
  if (spec.transition.size() != spec.M) throw Error(Errc::InvalidSpec, "transition must be M x M");
  for (const auto& row : spec.transition) check_row(row, "transition row");
  check_row(spec.initial, "initial distribution");
  if (!(spec.sentence_end_prob > 0.0 && spec.sentence_end_prob < 1.0))
    throw Error(Errc::InvalidSpec, "sentence_end_prob must lie in (0, 1)");
}

inline nlohmann::json to_json(const MarkovSpec& spec) {
  return {{"kind", "markov"},
          {"M", spec.M},
          {"transition", spec.transition},
          {"initial", spec.initial},
          {"sentence_end_prob", spec.sentence_end_prob}};
}

inline MarkovSpec markov_from_json(const nlohmann::json& j) {
  MarkovSpec spec;
  try {
    spec.M = j.at("M").get<std::size_t>();
    spec.transition = j.at("transition").get<std::vector<std::vector<double>>>();
    spec.initial = j.at("initial").get<std::vector<double>>();
    spec.sentence_end_prob = j.at("sentence_end_prob").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidSpec, std::string("markov spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

inline Corpus markov_stream(const MarkovSpec& spec, std::uint64_t n_sentences, std::uint64_t seed) {
  validate(spec);
  if (n_sentences == 0) throw Error(Errc::EmptyRequest, "n_sentences must be >= 1");
  Corpus corpus;
  corpus.meta.seed = seed;
  corpus.meta.source = "generator:markov";
  corpus.meta.spec = to_json(spec);
  corpus.meta.spec["sentences"] = n_sentences;

  const auto initial = detail::cumulative_of(spec.initial);
  std::vector<std::vector<double>> rows;
  rows.reserve(spec.M);
  for (const auto& row : spec.transition) rows.push_back(detail::cumulative_of(row));

  Rng rng(seed);
  detail::LazyWordIds ids(spec.M);
  for (std::uint64_t s = 0; s < n_sentences; ++s) {
    Sentence sentence;
    std::size_t state = detail::draw_index(initial, rng.uniform());
    for (;;) {
      sentence.push_back(ids.get(state, corpus.intern));
      if (rng.bernoulli(spec.sentence_end_prob)) break;
      state = detail::draw_index(rows[state], rng.uniform());
    }
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

}  // namespace zipfkit
