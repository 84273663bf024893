#pragma once

// Exact-Zipf grammar over a depth-M factorial tree.
//
// Every root-to-leaf path spells a permutation of the M word labels and all
// M! paths are equally likely. The tree has (M-1)!/(M-i)! level-i branches
// labelled j, one per length-(i-1) prefix that avoids j, and each such branch
// lies on (M-i)! paths. Retaining the label on a[j][i] of them (the rest emit
// nothing) makes w_j appear on
//
//   sum_i a[j][i] * (M-i)!
//
// of the M! paths. Choosing that count to be M!/j gives word frequencies in
// exact 1/j proportion. Branches are never materialized: a level-i branch is
// identified by the lexicographic rank of its prefix, and the label is kept
// when that rank is below a[j][i].

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "zipfkit/corpus.hpp"
#include "zipfkit/error.hpp"
#include "zipfkit/generators.hpp"
#include "zipfkit/rng.hpp"

namespace zipfkit {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Sampling cost is O(M^2) big-integer operations per sentence; beyond this the
// tree is too deep to be useful.
inline constexpr std::size_t kMaxGrammarWords = 1000;
inline constexpr std::size_t kEnumerationCap = 8;

// 1-based word label.
using Word = std::uint32_t;

inline BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

// n! / m! for m <= n, i.e. the falling product n (n-1) ... (m+1).
inline BigInt falling_ratio(std::size_t n, std::size_t m) {
  BigInt f = 1;
  for (std::size_t k = m + 1; k <= n; ++k) f *= k;
  return f;
}

namespace detail {

inline void check_word_count(std::size_t M) {
  if (M == 0) throw Error(Errc::InvalidSpec, "grammar needs at least one word");
  if (M > kMaxGrammarWords)
    throw Error(Errc::CapacityExceeded, "M = " + std::to_string(M) + " exceeds " +
                                            std::to_string(kMaxGrammarWords));
}

}  // namespace detail

// Number of label-j branches at `level` (1-based): (M-1)!/(M-level)!.
inline BigInt level_cap(std::size_t M, std::size_t level) { return falling_ratio(M - 1, M - level); }

// Paths below one branch at `level`: (M-level)!.
inline BigInt level_weight(std::size_t M, std::size_t level) { return factorial(M - level); }

// k_j = M!/j: path counts giving frequency 1/j to word j.
inline std::vector<BigInt> zipf_targets(std::size_t M) {
  detail::check_word_count(M);
  const BigInt total = factorial(M);
  std::vector<BigInt> k;
  k.reserve(M);
  for (std::size_t j = 1; j <= M; ++j) k.push_back(total / j);
  return k;
}

// Greedy factorial-base digits: take as many branches as possible at each
// level, shallowest first.
inline std::vector<BigInt> allocate(std::size_t M, const BigInt& k) {
  detail::check_word_count(M);
  if (k < 0 || k > factorial(M)) throw Error(Errc::InvalidTarget, "k must lie in [0, M!]");
  std::vector<BigInt> a(M);
  BigInt remainder = k;
  for (std::size_t i = 1; i <= M; ++i) {
    const BigInt weight = level_weight(M, i);
    const BigInt cap = level_cap(M, i);
    BigInt take = remainder / weight;
    if (take > cap) take = cap;
    a[i - 1] = take;
    remainder -= take * weight;
  }
  if (remainder != 0)
    throw Error(Errc::InvalidTarget, "greedy allocation left a nonzero remainder");
  return a;
}

inline void check_allocation(std::size_t M, const std::vector<BigInt>& a) {
  if (a.size() != M) throw Error(Errc::InvalidAllocation, "allocation length must equal M");
  for (std::size_t i = 1; i <= M; ++i) {
    if (a[i - 1] < 0 || a[i - 1] > level_cap(M, i))
      throw Error(Errc::InvalidAllocation, "level " + std::to_string(i) + " exceeds its cap");
  }
}

// Number of paths (out of M!) emitting the word with allocation `a`.
inline BigInt path_count(std::size_t M, const std::vector<BigInt>& a) {
  check_allocation(M, a);
  BigInt n = 0;
  for (std::size_t i = 1; i <= M; ++i) n += a[i - 1] * level_weight(M, i);
  return n;
}

inline Rational path_fraction(std::size_t M, const std::vector<BigInt>& a) {
  detail::check_word_count(M);
  return Rational(path_count(M, a), factorial(M));
}

// Lexicographic rank of `prefix` among all length-L sequences of distinct
// symbols from {1..M} \ {excluded}. Int must hold (M-1)!.
template <class Int = BigInt>
Int prefix_rank(std::span<const Word> prefix, Word excluded, std::size_t M) {
  const std::size_t L = prefix.size();
  if (M == 0 || excluded < 1 || excluded > M || L > M - 1)
    throw Error(Errc::InvalidPrefix, "prefix longer than M-1 or bad excluded symbol");
  std::vector<bool> used(M + 1, false);
  used[excluded] = true;
  for (Word s : prefix) {
    if (s < 1 || s > M) throw Error(Errc::InvalidPrefix, "symbol out of range");
    if (used[s]) throw Error(Errc::InvalidPrefix, "repeated or excluded symbol in prefix");
    used[s] = true;
  }
  std::fill(used.begin(), used.end(), false);
  used[excluded] = true;

  // completions[t]: ways to fill positions t+1..L-1 from the symbols left
  // after t+1 picks, i.e. (M-2-t)!/(M-1-L)!.
  Int rank = 0;
  for (std::size_t t = 0; t < L; ++t) {
    Int completions = 1;
    for (std::size_t k = M - L; k <= M - 2 - t; ++k) completions *= static_cast<Int>(k);
    std::size_t smaller = 0;
    for (Word s = 1; s < prefix[t]; ++s)
      if (!used[s]) ++smaller;
    rank += static_cast<Int>(smaller) * completions;
    used[prefix[t]] = true;
  }
  return rank;
}

struct GrammarSpec {
  std::size_t M = 1;
  std::vector<std::vector<BigInt>> alloc;  // alloc[j-1][i-1]
  std::vector<BigInt> target;              // target[j-1] = sum_i alloc * (M-i)!
};

inline void validate(const GrammarSpec& spec) {
  detail::check_word_count(spec.M);
  if (spec.alloc.size() != spec.M || spec.target.size() != spec.M)
    throw Error(Errc::InvalidAllocation, "grammar needs one allocation and target per word");
  const BigInt total = factorial(spec.M);
  for (std::size_t j = 0; j < spec.M; ++j) {
    const BigInt k = path_count(spec.M, spec.alloc[j]);
    if (k != spec.target[j] || k > total)
      throw Error(Errc::InvalidAllocation, "allocation of w" + std::to_string(j + 1) +
                                                " does not reach its target");
  }
}

// Grammar from arbitrary per-word targets (path counts out of M!).
inline GrammarSpec grammar_for_targets(std::size_t M, const std::vector<BigInt>& targets) {
  detail::check_word_count(M);
  if (targets.size() != M) throw Error(Errc::InvalidTarget, "need one target per word");
  GrammarSpec spec{M, {}, targets};
  spec.alloc.reserve(M);
  for (const auto& k : targets) spec.alloc.push_back(allocate(M, k));
  return spec;
}

inline GrammarSpec build_grammar(std::size_t M) { return grammar_for_targets(M, zipf_targets(M)); }

struct PathSample {
  std::vector<Word> perm;
  std::vector<Word> emitted;
};

// Emission decisions for one fixed path. Shared by the sampler and the
// enumerator so both apply the identical rule.
template <class Int = BigInt>
std::vector<Word> emit_path(std::span<const Word> perm, const std::vector<std::vector<Int>>& alloc) {
  const std::size_t M = perm.size();
  std::vector<Word> emitted;
  for (std::size_t i = 0; i < M; ++i) {
    const Word j = perm[i];
    const Int& retained = alloc[j - 1][i];
    if (retained == 0) continue;
    if (prefix_rank<Int>(perm.first(i), j, M) < retained) emitted.push_back(j);
  }
  return emitted;
}

namespace detail {

inline constexpr std::size_t kNativeRankLimit = 20;  // 20! < 2^64

inline std::vector<std::vector<std::uint64_t>> narrow(const std::vector<std::vector<BigInt>>& alloc) {
  std::vector<std::vector<std::uint64_t>> out;
  out.reserve(alloc.size());
  for (const auto& row : alloc) {
    auto& r = out.emplace_back();
    for (const auto& v : row) r.push_back(v.convert_to<std::uint64_t>());
  }
  return out;
}

}  // namespace detail

// Stateful sampler: one uniformly random root-to-leaf path per call.
class GrammarSampler {
 public:
  GrammarSampler(const GrammarSpec& spec, std::uint64_t seed)
      : spec_(spec), rng_(seed), perm_(spec.M) {
    validate(spec_);
    if (spec_.M <= detail::kNativeRankLimit) native_alloc_ = detail::narrow(spec_.alloc);
  }

  PathSample next() {
    std::iota(perm_.begin(), perm_.end(), Word{1});
    shuffle(perm_, rng_);
    PathSample sample{perm_, {}};
    sample.emitted = native_alloc_.empty() ? emit_path<BigInt>(perm_, spec_.alloc)
                                           : emit_path<std::uint64_t>(perm_, native_alloc_);
    return sample;
  }

  const GrammarSpec& spec() const noexcept { return spec_; }

 private:
  GrammarSpec spec_;
  Rng rng_;
  std::vector<Word> perm_;
  std::vector<std::vector<std::uint64_t>> native_alloc_;
};

inline PathSample sample_sentence(const GrammarSpec& spec, Rng& rng) {
  validate(spec);
  std::vector<Word> perm(spec.M);
  std::iota(perm.begin(), perm.end(), Word{1});
  shuffle(perm, rng);
  auto emitted = emit_path<BigInt>(perm, spec.alloc);
  return {std::move(perm), std::move(emitted)};
}

// Sentence corpus of `n_sentences` sampled paths. Paths with no retained
// label produce empty sentences and are kept so sentence indices line up
// with draws.
inline Corpus grammar_stream(const GrammarSpec& spec, std::uint64_t n_sentences, std::uint64_t seed) {
  if (n_sentences == 0) throw Error(Errc::EmptyRequest, "n_sentences must be >= 1");
  GrammarSampler sampler(spec, seed);
  Corpus corpus;
  corpus.meta.seed = seed;
  corpus.meta.source = "generator:grammar";
  corpus.meta.spec = {{"kind", "grammar"}, {"M", spec.M}, {"sentences", n_sentences}};
  detail::LazyWordIds ids(spec.M);
  for (std::uint64_t s = 0; s < n_sentences; ++s) {
    const auto sample = sampler.next();
    Sentence sentence;
    sentence.reserve(sample.emitted.size());
    for (Word w : sample.emitted) sentence.push_back(ids.get(w - 1, corpus.intern));
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

using SentenceDistribution = std::map<std::vector<Word>, Rational>;

// Exact distribution over emitted sentences, by visiting all M! paths.
inline SentenceDistribution enumerate_all(const GrammarSpec& spec) {
  validate(spec);
  if (spec.M > kEnumerationCap)
    throw Error(Errc::CapacityExceeded, "enumeration is limited to M <= " + std::to_string(kEnumerationCap));
  const auto alloc = detail::narrow(spec.alloc);
  std::map<std::vector<Word>, std::uint64_t> paths;
  std::vector<Word> perm(spec.M);
  std::iota(perm.begin(), perm.end(), Word{1});
  do {
    ++paths[emit_path<std::uint64_t>(perm, alloc)];
  } while (std::next_permutation(perm.begin(), perm.end()));

  const BigInt total = factorial(spec.M);
  SentenceDistribution dist;
  for (const auto& [sentence, count] : paths) dist.emplace(sentence, Rational(BigInt(count), total));
  return dist;
}

// P(sentence contains w_j) for j = 1..M. Each word appears at most once per
// path, so this is also the expected count per sentence.
inline std::vector<Rational> word_marginals(const SentenceDistribution& dist, std::size_t M) {
  std::vector<Rational> marginal(M, Rational(0));
  for (const auto& [sentence, p] : dist)
    for (Word w : sentence) marginal.at(w - 1) += p;
  return marginal;
}

namespace detail {

inline nlohmann::json bigint_json(const BigInt& v) {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
  return v.str();
}

inline BigInt bigint_from_json(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw Error(Errc::InvalidSpec, "expected an integer or decimal string");
}

}  // namespace detail

inline nlohmann::json to_json(const GrammarSpec& spec) {
  nlohmann::json alloc = nlohmann::json::array();
  for (const auto& row : spec.alloc) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(detail::bigint_json(v));
    alloc.push_back(std::move(r));
  }
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& k : spec.target) targets.push_back(detail::bigint_json(k));
  return {{"M", spec.M}, {"alloc", std::move(alloc)}, {"targets", std::move(targets)}};
}

inline GrammarSpec grammar_from_json(const nlohmann::json& j) {
  GrammarSpec spec;
  try {
    spec.M = j.at("M").get<std::size_t>();
    for (const auto& row : j.at("alloc")) {
      auto& r = spec.alloc.emplace_back();
      for (const auto& v : row) r.push_back(detail::bigint_from_json(v));
    }
    for (const auto& v : j.at("targets")) spec.target.push_back(detail::bigint_from_json(v));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidSpec, std::string("grammar spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

// CSV rows `sentence,probability_num,probability_den`, sentence as
// space-joined surfaces.
inline void write_enumeration_csv(std::ostream& out, const SentenceDistribution& dist) {
  out << "sentence,probability_num,probability_den\n";
  for (const auto& [sentence, p] : dist) {
    for (std::size_t i = 0; i < sentence.size(); ++i) out << (i ? " " : "") << word_surface(sentence[i]);
    out << ',' << numerator(p) << ',' << denominator(p) << '\n';
  }
}

}  // namespace zipfkit
