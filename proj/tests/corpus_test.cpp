#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"
#include "zipfkit/corpus.hpp"
#include "zipfkit/corpus_io.hpp"
#include "zipfkit/facgrammar.hpp"

using namespace zipfkit;

namespace {

Corpus corpus_of(const std::vector<std::vector<std::string>>& sentences) {
  Corpus c;
  for (const auto& s : sentences) c.add_sentence(s);
  return c;
}

Corpus random_corpus(Rng& rng, std::size_t sentences, std::size_t vocab) {
  Corpus c;
  for (std::size_t s = 0; s < sentences; ++s) {
    std::vector<std::string> words(1 + rng.below(8));
    for (auto& w : words) w = "v" + std::to_string(rng.below(vocab));
    c.add_sentence(words);
  }
  return c;
}

}  // namespace

TEST(InternTable, IsIdempotent) {
  InternTable t;
  const Token a = t.intern("abc");
  const Token b = t.intern("abc");
  EXPECT_EQ(a, b);
  EXPECT_EQ(t.size(), 1u);
}

TEST(InternTable, AssignsDenseIdsInFirstSeenOrder) {
  InternTable t;
  EXPECT_EQ(t.id("x"), 0u);
  EXPECT_EQ(t.id("y"), 1u);
  EXPECT_EQ(t.id("x"), 0u);
  EXPECT_EQ(t.id("z"), 2u);
  EXPECT_EQ(t.surface(1), "y");
}

TEST(InternTable, RejectsEmptySurface) {
  InternTable t;
  try {
    t.intern("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidToken);
  }
}

TEST(InternTable, SurfaceRoundTrips) {
  Rng rng(3);
  InternTable t;
  for (int i = 0; i < 500; ++i) {
    const std::string s = "s" + std::to_string(rng.below(200));
    EXPECT_EQ(t.surface(t.id(s)), s);
    EXPECT_EQ(t.find(s), t.id(s));
  }
  EXPECT_FALSE(t.find("missing").has_value());
}

TEST(RankTable, CountsAndRanksOneSentence) {
  const auto table = build_rank_table(corpus_of({{"w1", "w1", "w2"}}));
  ASSERT_EQ(table.vocab(), 2u);
  EXPECT_EQ(table.total, 3u);
  EXPECT_EQ(table.entries[0].surface, "w1");
  EXPECT_EQ(table.entries[0].count, 2u);
  EXPECT_EQ(table.entries[0].rank, 1u);
  EXPECT_EQ(table.entries[1].surface, "w2");
  EXPECT_EQ(table.entries[1].count, 1u);
  EXPECT_EQ(table.entries[1].rank, 2u);
}

TEST(RankTable, TiesBreakLexicographically) {
  const auto table = build_rank_table(corpus_of({{"pear", "apple", "fig"}, {"fig", "apple", "pear"}}));
  ASSERT_EQ(table.vocab(), 3u);
  EXPECT_EQ(table.entries[0].surface, "apple");
  EXPECT_EQ(table.entries[1].surface, "fig");
  EXPECT_EQ(table.entries[2].surface, "pear");
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(table.entries[i].count, 2u);
    EXPECT_EQ(table.entries[i].rank, i + 1);
  }
}

TEST(RankTable, EmptyCorpusIsAnError) {
  Corpus empty;
  try {
    build_rank_table(empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyCorpus);
  }
}

TEST(RankTable, SortedAndSumsToTotal) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Corpus c = random_corpus(rng, 1 + rng.below(40), 1 + rng.below(30));
    const auto table = build_rank_table(c);
    Count sum = 0;
    for (std::size_t i = 0; i < table.vocab(); ++i) {
      sum += table.entries[i].count;
      EXPECT_EQ(table.entries[i].rank, i + 1);
      if (i + 1 < table.vocab()) {
        EXPECT_GE(table.entries[i].count, table.entries[i + 1].count);
      }
    }
    EXPECT_EQ(sum, table.total);
    EXPECT_EQ(table.total, c.token_count());
  }
}

TEST(RankTable, IndependentOfSentenceOrder) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Corpus c = random_corpus(rng, 2 + rng.below(30), 1 + rng.below(20));
    std::vector<std::vector<std::string>> sentences;
    for (std::size_t i = 0; i < c.sentences.size(); ++i) sentences.push_back(c.words(i));
    shuffle(sentences, rng);
    const auto a = build_rank_table(c);
    const auto b = build_rank_table(corpus_of(sentences));
    ASSERT_EQ(a.vocab(), b.vocab());
    EXPECT_EQ(a.total, b.total);
    for (std::size_t i = 0; i < a.vocab(); ++i) {
      EXPECT_EQ(a.entries[i].surface, b.entries[i].surface);
      EXPECT_EQ(a.entries[i].count, b.entries[i].count);
    }
  }
}

TEST(RankTable, GrammarCorpusApproachesHarmonicRatios) {
  // Each word occurs at most once per sentence, so its count over n sentences
  // is Binomial(n, 1/j).
  const std::uint64_t n = 100000;
  const auto table = build_rank_table(grammar_stream(build_grammar(4), n, 2024));
  ASSERT_EQ(table.vocab(), 4u);
  for (std::size_t j = 1; j <= 4; ++j) {
    const auto& e = table.entries[j - 1];
    EXPECT_EQ(e.surface, "w" + std::to_string(j));
    const double p = 1.0 / static_cast<double>(j);
    const double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
    EXPECT_NEAR(static_cast<double>(e.count), static_cast<double>(n) * p, std::max(3 * sd, 1.0)) << "w" << j;
  }
}

TEST(CorpusText, RoundTripsThroughLineFormat) {
  Rng rng(5);
  const Corpus c = random_corpus(rng, 25, 12);
  std::stringstream buf;
  write_corpus_text(buf, c);
  const Corpus back = read_corpus_text(buf);
  ASSERT_EQ(back.sentences.size(), c.sentences.size());
  for (std::size_t i = 0; i < c.sentences.size(); ++i) EXPECT_EQ(back.words(i), c.words(i));
}

TEST(CorpusText, WritesSingleSpaces) {
  std::ostringstream out;
  write_corpus_text(out, corpus_of({{"a", "b"}, {"c"}}));
  EXPECT_EQ(out.str(), "a b\nc\n");
}

TEST(CorpusMeta, JsonRoundTrip) {
  CorpusMeta meta{"generator:die", 42, {{"kind", "die"}, {"M", 4}}};
  const auto back = meta_from_json(meta_to_json(meta));
  EXPECT_EQ(back.source, meta.source);
  EXPECT_EQ(back.seed, meta.seed);
  EXPECT_EQ(back.spec, meta.spec);
}

TEST(RankCsv, HeaderAndQuoting) {
  const auto table = make_rank_table({{"a,b", 3}, {"c", 1}});
  std::ostringstream out;
  write_rank_csv(out, table);
  EXPECT_EQ(out.str(), "rank,surface,count,freq\n1,\"a,b\",3,0.75\n2,c,1,0.25\n");
}
