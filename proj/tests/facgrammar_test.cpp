#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "test_support.hpp"
#include "zipfkit/facgrammar.hpp"
#include "zipfkit/special.hpp"

using namespace zipfkit;

namespace {

template <class F>
void expect_errc(Errc code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

std::vector<BigInt> big(std::initializer_list<int> xs) { return {xs.begin(), xs.end()}; }

// Fraction of paths in the product form a_1/M + a_2/(M(M-1)) + ..., built
// without factorial helpers from the library.
Rational fraction_product_form(std::size_t M, const std::vector<BigInt>& a) {
  Rational f = 0;
  BigInt denom = 1;
  for (std::size_t i = 1; i <= M; ++i) {
    denom *= static_cast<unsigned>(M - i + 1);
    f += Rational(a[i - 1], denom);
  }
  return f;
}

// All length-L sequences of distinct symbols from {1..M}\{excluded}, in
// lexicographic order.
std::vector<std::vector<Word>> sorted_prefixes(std::size_t M, Word excluded, std::size_t L) {
  std::vector<std::vector<Word>> out;
  std::vector<Word> cur;
  std::vector<bool> used(M + 1, false);
  used[excluded] = true;
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == L) {
      out.push_back(cur);
      return;
    }
    for (Word s = 1; s <= M; ++s) {
      if (used[s]) continue;
      used[s] = true;
      cur.push_back(s);
      self(self);
      cur.pop_back();
      used[s] = false;
    }
  };
  rec(rec);
  return out;
}

std::vector<BigInt> random_allocation(std::size_t M, Rng& rng) {
  std::vector<BigInt> a(M);
  for (std::size_t i = 1; i <= M; ++i) {
    const auto cap = level_cap(M, i).convert_to<std::uint64_t>();
    a[i - 1] = rng.below(cap + 1);
  }
  return a;
}

}  // namespace

TEST(ZipfTargets, SmallCases) {
  EXPECT_EQ(zipf_targets(1), big({1}));
  EXPECT_EQ(zipf_targets(4), big({24, 12, 8, 6}));
}

TEST(ZipfTargets, LargeMUsesBigIntegers) {
  const auto k = zipf_targets(30);
  EXPECT_EQ(k[0], factorial(30));
  EXPECT_GT(k[0], BigInt(std::numeric_limits<std::uint64_t>::max()));
  for (std::size_t j = 1; j <= 30; ++j) EXPECT_EQ(k[j - 1] * j, factorial(30));
}

TEST(ZipfTargets, RejectsBadSizes) {
  expect_errc(Errc::InvalidSpec, [] { zipf_targets(0); });
  expect_errc(Errc::CapacityExceeded, [] { zipf_targets(kMaxGrammarWords + 1); });
}

TEST(Allocate, Examples) {
  for (std::size_t M = 1; M <= 7; ++M) EXPECT_EQ(allocate(M, 0), std::vector<BigInt>(M, 0));
  EXPECT_EQ(allocate(4, 24), big({1, 3, 6, 6}));
  EXPECT_EQ(allocate(4, 8), big({1, 1, 0, 0}));
  EXPECT_EQ(fraction_product_form(4, big({1, 1, 0, 0})), Rational(1, 3));
}

TEST(Allocate, RejectsOutOfRangeTargets) {
  expect_errc(Errc::InvalidTarget, [] { allocate(4, -1); });
  expect_errc(Errc::InvalidTarget, [] { allocate(4, 25); });
}

TEST(Allocate, EveryTargetReachableUpToSix) {
  for (std::size_t M = 1; M <= 6; ++M) {
    const BigInt total = factorial(M);
    for (BigInt k = 0; k <= total; ++k) {
      const auto a = allocate(M, k);
      for (std::size_t i = 1; i <= M; ++i) {
        ASSERT_GE(a[i - 1], 0);
        ASSERT_LE(a[i - 1], level_cap(M, i));
      }
      ASSERT_EQ(fraction_product_form(M, a), Rational(k, total)) << "M=" << M << " k=" << k;
      ASSERT_EQ(path_fraction(M, a), Rational(k, total));
    }
  }
}

TEST(PathFraction, Examples) {
  for (std::size_t M = 1; M <= 8; ++M) {
    std::vector<BigInt> a(M, 0);
    a[0] = 1;
    EXPECT_EQ(path_fraction(M, a), Rational(1, M));
  }
  EXPECT_EQ(path_fraction(4, big({1, 3, 6, 6})), Rational(1));
  for (std::size_t j = 1; j <= 4; ++j) EXPECT_EQ(path_fraction(4, allocate(4, BigInt(24 / j))), Rational(1, j));
}

TEST(PathFraction, RejectsCapViolations) {
  expect_errc(Errc::InvalidAllocation, [] { path_fraction(4, big({2, 0, 0, 0})); });
  expect_errc(Errc::InvalidAllocation, [] { path_fraction(4, big({0, 4, 0, 0})); });
  expect_errc(Errc::InvalidAllocation, [] { path_fraction(4, big({0, 0, -1, 0})); });
  expect_errc(Errc::InvalidAllocation, [] { path_fraction(4, big({1, 0, 0})); });
}

TEST(PathFraction, FullRetentionCoversEveryPath) {
  for (std::size_t M = 1; M <= 15; ++M) {
    BigInt sum = 0;
    std::vector<BigInt> caps;
    for (std::size_t i = 1; i <= M; ++i) {
      sum += level_cap(M, i) * level_weight(M, i);
      caps.push_back(level_cap(M, i));
    }
    EXPECT_EQ(sum, factorial(M));
    EXPECT_EQ(path_fraction(M, caps), Rational(1));
  }
}

TEST(BuildGrammar, SingleWord) {
  const auto g = build_grammar(1);
  EXPECT_EQ(g.alloc, std::vector<std::vector<BigInt>>{big({1})});
  const auto dist = enumerate_all(g);
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_EQ(dist.begin()->first, std::vector<Word>{1});
  EXPECT_EQ(dist.begin()->second, Rational(1));
}

TEST(BuildGrammar, FourWordAllocation) {
  const auto g = build_grammar(4);
  const std::vector<std::vector<BigInt>> want{big({1, 3, 6, 6}), big({1, 3, 0, 0}), big({1, 1, 0, 0}),
                                              big({1, 0, 0, 0})};
  EXPECT_EQ(g.alloc, want);
  EXPECT_EQ(g.target, big({24, 12, 8, 6}));
}

TEST(PrefixRank, EmptyPrefixIsZero) {
  for (std::size_t M = 1; M <= 6; ++M)
    for (Word j = 1; j <= M; ++j) EXPECT_EQ(prefix_rank({}, j, M), 0);
}

TEST(PrefixRank, SmallListing) {
  const std::vector<Word> one{1}, three{3};
  EXPECT_EQ(prefix_rank(one, 2, 3), 0);
  EXPECT_EQ(prefix_rank(three, 2, 3), 1);
}

TEST(PrefixRank, MatchesExhaustiveListing) {
  for (std::size_t M = 1; M <= 6; ++M) {
    for (Word excluded = 1; excluded <= M; ++excluded) {
      for (std::size_t L = 0; L + 1 <= M; ++L) {
        const auto listing = sorted_prefixes(M, excluded, L);
        ASSERT_EQ(BigInt(listing.size()), level_cap(M, L + 1));
        for (std::size_t idx = 0; idx < listing.size(); ++idx) {
          ASSERT_EQ(prefix_rank(listing[idx], excluded, M), idx);
          ASSERT_EQ(prefix_rank<std::uint64_t>(listing[idx], excluded, M), idx);
        }
      }
    }
  }
}

TEST(PrefixRank, RejectsMalformedPrefixes) {
  expect_errc(Errc::InvalidPrefix, [] { prefix_rank(std::vector<Word>{1, 1}, 3, 4); });
  expect_errc(Errc::InvalidPrefix, [] { prefix_rank(std::vector<Word>{5}, 3, 4); });
  expect_errc(Errc::InvalidPrefix, [] { prefix_rank(std::vector<Word>{0}, 3, 4); });
  expect_errc(Errc::InvalidPrefix, [] { prefix_rank(std::vector<Word>{3}, 3, 4); });
  expect_errc(Errc::InvalidPrefix, [] { prefix_rank(std::vector<Word>{1, 2, 4, 3}, 3, 4); });
  expect_errc(Errc::InvalidPrefix, [] { prefix_rank(std::vector<Word>{}, 5, 4); });
}

TEST(SampleSentence, SingleWordAlwaysEmitted) {
  const auto g = build_grammar(1);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample_sentence(g, rng).emitted, std::vector<Word>{1});
}

TEST(SampleSentence, PermutationAndSubsequence) {
  const auto g = build_grammar(7);
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto s = sample_sentence(g, rng);
    auto sorted = s.perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Word> ident(7);
    std::iota(ident.begin(), ident.end(), Word{1});
    ASSERT_EQ(sorted, ident);
    auto it = s.perm.begin();
    for (Word w : s.emitted) {
      it = std::find(it, s.perm.end(), w);
      ASSERT_NE(it, s.perm.end()) << "emitted is not a subsequence of perm";
      ++it;
    }
    // w1 keeps every label, so it is on every path.
    EXPECT_NE(std::find(s.emitted.begin(), s.emitted.end(), 1u), s.emitted.end());
  }
}

TEST(SampleSentence, FourthWordOnSixOfTwentyFourPaths) {
  const auto g = build_grammar(4);
  std::vector<Word> perm{1, 2, 3, 4};
  int with_w4 = 0, with_w1 = 0;
  do {
    const auto e = emit_path<BigInt>(perm, g.alloc);
    with_w4 += std::count(e.begin(), e.end(), 4u);
    with_w1 += std::count(e.begin(), e.end(), 1u);
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(with_w4, 6);
  EXPECT_EQ(with_w1, 24);
}

TEST(SampleSentence, NativeAndBigIntegerRulesAgree) {
  Rng rng(21);
  for (std::size_t M : {3, 6, 9, 15}) {
    GrammarSpec g;
    g.M = M;
    for (std::size_t j = 0; j < M; ++j) g.alloc.push_back(random_allocation(M, rng));
    const auto narrow = detail::narrow(g.alloc);
    std::vector<Word> perm(M);
    std::iota(perm.begin(), perm.end(), Word{1});
    for (int trial = 0; trial < 200; ++trial) {
      shuffle(perm, rng);
      ASSERT_EQ(emit_path<BigInt>(perm, g.alloc), emit_path<std::uint64_t>(perm, narrow));
    }
  }
}

TEST(SampleSentence, SamplerMatchesEmissionRule) {
  const auto g = build_grammar(6);
  GrammarSampler sampler(g, 31);
  for (int i = 0; i < 300; ++i) {
    const auto s = sampler.next();
    EXPECT_EQ(s.emitted, emit_path<BigInt>(s.perm, g.alloc));
  }
}

TEST(SampleSentence, WorksBeyondNativeIntegers) {
  const auto g = build_grammar(25);
  GrammarSampler sampler(g, 4);
  for (int i = 0; i < 50; ++i) {
    const auto s = sampler.next();
    EXPECT_EQ(s.perm.size(), 25u);
    EXPECT_NE(std::find(s.emitted.begin(), s.emitted.end(), 1u), s.emitted.end());
  }
}

TEST(EnumerateAll, FourWordMarginalsAreHarmonic) {
  const auto dist = enumerate_all(build_grammar(4));
  Rational sum = 0;
  for (const auto& [sentence, p] : dist) sum += p;
  EXPECT_EQ(sum, Rational(1));
  const auto m = word_marginals(dist, 4);
  for (std::size_t j = 1; j <= 4; ++j) EXPECT_EQ(m[j - 1], Rational(1, j));
}

TEST(EnumerateAll, CapIsEnforced) {
  EXPECT_NO_THROW(enumerate_all(build_grammar(kEnumerationCap)));
  expect_errc(Errc::CapacityExceeded, [] { enumerate_all(build_grammar(kEnumerationCap + 1)); });
}

TEST(EnumerateAll, MarginalsEqualPathFractionForRandomAllocations) {
  Rng rng(77);
  for (std::size_t M = 1; M <= 6; ++M) {
    for (int trial = 0; trial < 20; ++trial) {
      GrammarSpec g;
      g.M = M;
      for (std::size_t j = 0; j < M; ++j) {
        g.alloc.push_back(random_allocation(M, rng));
        g.target.push_back(path_count(M, g.alloc.back()));
      }
      const auto m = word_marginals(enumerate_all(g), M);
      for (std::size_t j = 0; j < M; ++j) ASSERT_EQ(m[j], fraction_product_form(M, g.alloc[j]));
    }
  }
}

TEST(EnumerateAll, WordsAreIndependentOfEachOthersAllocation) {
  Rng rng(5);
  const std::size_t M = 5;
  GrammarSpec g;
  g.M = M;
  for (std::size_t j = 0; j < M; ++j) g.alloc.push_back(random_allocation(M, rng));
  std::vector<Word> perm(M);
  std::iota(perm.begin(), perm.end(), Word{1});
  do {
    const auto base = emit_path<BigInt>(perm, g.alloc);
    for (std::size_t j = 0; j < M; ++j) {
      auto changed = g.alloc;
      changed[j] = random_allocation(M, rng);
      auto other = emit_path<BigInt>(perm, changed);
      auto strip = [&](std::vector<Word> v) {
        v.erase(std::remove(v.begin(), v.end(), static_cast<Word>(j + 1)), v.end());
        return v;
      };
      ASSERT_EQ(strip(base), strip(other));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(EnumerateAll, SamplerAgreesByChiSquare) {
  const auto g = build_grammar(4);
  const auto dist = enumerate_all(g);
  std::map<std::vector<Word>, std::size_t> index;
  std::vector<double> probs;
  for (const auto& [sentence, p] : dist) {
    index[sentence] = probs.size();
    probs.push_back(static_cast<double>(p));
  }
  const std::uint64_t n = 1000000;
  std::vector<double> observed(probs.size(), 0.0);
  GrammarSampler sampler(g, 2718);
  for (std::uint64_t i = 0; i < n; ++i) observed[index.at(sampler.next().emitted)] += 1.0;
  const double stat = zipfkit::testing::chi_square_statistic(observed, probs, static_cast<double>(n));
  EXPECT_GT(special::chi_square_sf(stat, static_cast<double>(probs.size() - 1)), 0.001);
}

TEST(GrammarStream, TwelveWordMarginalsWithinThreeSigma) {
  const std::uint64_t n = 10000;
  const auto g = build_grammar(12);
  const auto corpus = grammar_stream(g, n, 1);
  std::vector<double> counts(12, 0.0);
  for (const auto& s : corpus.sentences)
    for (TokenId id : s) counts[std::stoul(corpus.intern.surface(id).substr(1)) - 1] += 1.0;
  for (std::size_t j = 1; j <= 12; ++j) {
    const double p = static_cast<double>(path_fraction(12, g.alloc[j - 1]));
    const double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
    EXPECT_NEAR(counts[j - 1], static_cast<double>(n) * p, std::max(3 * sd, 1.0)) << "w" << j;
  }
}

TEST(GrammarJson, RoundTripIncludingBigValues) {
  for (std::size_t M : {4, 12, 22}) {
    const auto g = build_grammar(M);
    const auto back = grammar_from_json(to_json(g));
    EXPECT_EQ(back.M, g.M);
    EXPECT_EQ(back.alloc, g.alloc);
    EXPECT_EQ(back.target, g.target);
  }
  EXPECT_TRUE(to_json(build_grammar(22))["targets"][0].is_string());
}

TEST(GrammarJson, RejectsInconsistentTargets) {
  auto j = to_json(build_grammar(4));
  j["targets"][1] = 13;
  expect_errc(Errc::InvalidAllocation, [&] { grammar_from_json(j); });
}

TEST(EnumerationCsv, Format) {
  std::ostringstream out;
  write_enumeration_csv(out, enumerate_all(build_grammar(2)));
  // M=2: w1 on both paths, w2 on one (level 1 branch only).
  EXPECT_EQ(out.str(), "sentence,probability_num,probability_den\nw1,1,2\nw2 w1,1,2\n");
}
