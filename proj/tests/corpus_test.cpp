#include "lexchoice/corpus.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace lexchoice;

TEST(Ingest, SlashFormatLowercasesAndKeepsTags) {
  const auto ts = ingest("The/DT team/NN 's/POS most/RBS urgent/JJ task/NN", {});
  ASSERT_EQ(ts.size(), 6u);
  EXPECT_EQ(ts.sentence_count, 1u);
  EXPECT_EQ(ts.tokens[0].surface, "the");
  EXPECT_EQ(ts.tokens[0].pos, "DT");
  EXPECT_EQ(ts.tokens[2].surface, "'s");
  EXPECT_EQ(ts.tokens[2].pos, "POS");
  EXPECT_EQ(ts.tokens[5].surface, "task");
  for (const auto& t : ts.tokens) EXPECT_FALSE(t.is_stop);
}

TEST(Ingest, EmptyInput) {
  const auto ts = ingest("", {});
  EXPECT_TRUE(ts.empty());
  EXPECT_EQ(ts.sentence_count, 0u);
  EXPECT_TRUE(ingest("\n  \n", {}).empty());
}

TEST(Ingest, StopTagsFlagged) {
  const auto ts = ingest("1989/CD Chernobyl/NNP %/SYM ,/, plants/NNS", {});
  ASSERT_EQ(ts.size(), 5u);
  EXPECT_TRUE(ts.tokens[0].is_stop);
  EXPECT_TRUE(ts.tokens[1].is_stop);
  EXPECT_TRUE(ts.tokens[2].is_stop);
  EXPECT_TRUE(ts.tokens[3].is_stop);
  EXPECT_FALSE(ts.tokens[4].is_stop);
}

TEST(Ingest, SentenceIdsFollowLines) {
  const auto ts = ingest("a/NN b/NN\n\nc/NN\n", {});
  ASSERT_EQ(ts.size(), 3u);
  EXPECT_EQ(ts.sentence_count, 2u);
  EXPECT_EQ(ts.tokens[1].sentence_id, 0u);
  EXPECT_EQ(ts.tokens[2].sentence_id, 1u);
}

TEST(Ingest, SurfaceMayContainSlash) {
  const auto ts = ingest("1/2/CD", {});
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts.tokens[0].surface, "1/2");
  EXPECT_EQ(ts.tokens[0].pos, "CD");
}

TEST(Ingest, MissingSeparatorReportsLineAndColumn) {
  try {
    ingest("a/NN b/NN\nc/NN broken d/NN", {});
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 6u);
  }
  EXPECT_THROW(ingest("x/", {}), FormatError);
  EXPECT_THROW(ingest("/NN", {}), FormatError);
}

TEST(Ingest, TsvFormat) {
  CorpusConfig cfg;
  cfg.format = TagFormat::kTsv;
  const auto ts = ingest("The\tDT\nTask\tNN\n\n1987\tCD\n", cfg);
  ASSERT_EQ(ts.size(), 3u);
  EXPECT_EQ(ts.sentence_count, 2u);
  EXPECT_EQ(ts.tokens[1].surface, "task");
  EXPECT_TRUE(ts.tokens[2].is_stop);
  EXPECT_EQ(ts.tokens[2].sentence_id, 1u);
  try {
    ingest("ok\tNN\nbad line\n", cfg);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Vocabulary, HandCount) {
  CorpusConfig cfg;
  cfg.stop_threshold = 2;
  auto ts = ingest("a/NN a/NN b/NN b/NN b/NN", cfg);
  const auto vocab = build_vocabulary(ts, cfg);
  EXPECT_EQ(vocab.count("a"), 2u);
  EXPECT_EQ(vocab.count("b"), 3u);
  EXPECT_EQ(vocab.total_tokens, 5u);
  EXPECT_FALSE(ts.tokens[0].is_stop);
  EXPECT_TRUE(ts.tokens[2].is_stop);
  EXPECT_TRUE(vocab.is_frequency_stop("b"));
}

TEST(Vocabulary, EmptyStream) {
  TokenStream ts;
  const auto vocab = build_vocabulary(ts, {});
  EXPECT_TRUE(vocab.freq.empty());
  EXPECT_EQ(vocab.total_tokens, 0u);
}

TEST(Vocabulary, DefaultThreshold) {
  CorpusConfig cfg;
  EXPECT_EQ(cfg.stop_threshold, 800u);
  cfg.stop_threshold = 0;
  TokenStream ts;
  EXPECT_THROW(build_vocabulary(ts, cfg), InvalidInput);
}

TEST(Vocabulary, StopWordsStillCounted) {
  auto ts = ingest("1989/CD 1989/CD task/NN", {});
  const auto vocab = build_vocabulary(ts, {});
  EXPECT_EQ(vocab.count("1989"), 2u);
  EXPECT_TRUE(ts.tokens[0].is_stop);
}

TEST(Vocabulary, FileRoundTrip) {
  CorpusConfig cfg;
  cfg.stop_threshold = 3;
  auto ts = ingest("b/NN a/NN b/NN\nc/CD\n", cfg);
  const auto vocab = build_vocabulary(ts, cfg);
  const auto text = write_vocabulary(vocab);
  EXPECT_EQ(text, "N=4\nF=3\na\t1\nb\t2\nc\t1\n");
  const auto back = read_vocabulary(text);
  EXPECT_EQ(back.freq, vocab.freq);
  EXPECT_EQ(back.total_tokens, 4u);
  EXPECT_EQ(back.stop_threshold, 3u);
  EXPECT_THROW(read_vocabulary("N=5\nF=3\na\t1\n"), FormatError);
}

// Invariants over random streams.
class CorpusProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(CorpusProperty, SerializeIngestRoundTrip) {
  std::mt19937_64 rng(GetParam());
  const auto ts = lexchoice::testing::random_stream(rng, 500, 60);
  for (auto fmt : {TagFormat::kSlash, TagFormat::kTsv}) {
    CorpusConfig cfg;
    cfg.format = fmt;
    EXPECT_EQ(ingest(serialize(ts, fmt), cfg), ts);
  }
}

TEST_P(CorpusProperty, FrequenciesSumToTotal) {
  std::mt19937_64 rng(GetParam());
  auto ts = lexchoice::testing::random_stream(rng, 1 + rng() % 2000, 1 + rng() % 300);
  const auto vocab = build_vocabulary(ts, {});
  std::uint64_t sum = 0;
  for (const auto& [w, n] : vocab.freq) sum += n;
  EXPECT_EQ(sum, vocab.total_tokens);
  EXPECT_EQ(vocab.total_tokens, ts.size());
}

TEST_P(CorpusProperty, RaisingThresholdNeverAddsStopWords) {
  std::mt19937_64 rng(GetParam());
  auto ts = lexchoice::testing::random_stream(rng, 3000, 40);
  std::set<std::string> previous;
  bool first = true;
  for (std::uint64_t f : {1u, 5u, 20u, 60u, 100u, 1000u}) {
    CorpusConfig cfg;
    cfg.stop_threshold = f;
    auto copy = ts;
    const auto vocab = build_vocabulary(copy, cfg);
    std::set<std::string> stopped;
    for (const auto& [w, n] : vocab.freq) {
      if (vocab.is_frequency_stop(w)) stopped.insert(w);
    }
    if (!first) {
      EXPECT_TRUE(std::includes(previous.begin(), previous.end(), stopped.begin(), stopped.end()));
    }
    previous = std::move(stopped);
    first = false;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CorpusProperty, ::testing::Values(1, 2, 3, 4, 5, 6, 7, 8));
