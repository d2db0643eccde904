#include <gtest/gtest.h>

#include <algorithm>

#include "opinion/error.hpp"
#include "opinion/polarity.hpp"
#include "opinion/rng.hpp"
#include "opinion/text.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace opinion;

namespace {

const std::filesystem::path kData = OPINION_DATA_DIR;

PolarityLexicon small() { return PolarityLexicon::parse("goed\t0.6\nslecht\t-0.7\n"); }

}  // namespace

TEST(Lexicon, LoadsTwoWords) {
  const auto lex = small();
  EXPECT_EQ(lex.words().size(), 2u);
  EXPECT_EQ(lex.entry_count(), 2u);
}

TEST(Lexicon, OutOfRangeScoreNamesLine) {
  try {
    PolarityLexicon::parse("x\t1.5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("score out of range, line 1"), std::string::npos);
  }
}

TEST(Lexicon, DuplicateTermRejected) {
  try {
    PolarityLexicon::parse("# c\ngoed\t0.5\nGoed\t0.6\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Lexicon, ShippedToyLexicon) {
  const auto lex = PolarityLexicon::load(kData / "lexicon/toy_nl.tsv");
  EXPECT_EQ(lex.entry_count(), 60u);
  EXPECT_EQ(lex.words().size(), 50u);
  EXPECT_EQ(lex.emoji().size(), 10u);
  for (const auto& [w, s] : lex.words()) {
    EXPECT_EQ(lex.emoji().count(w), 0u);
    EXPECT_EQ(text::fold_case(w), w);
  }
}

TEST(Score, MeanOfTwoHits) {
  const auto s = score(small(), "goed maar slecht");
  EXPECT_NEAR(s.value, -0.05, 1e-15);
  EXPECT_EQ(s.hits, 2u);
  EXPECT_FALSE(s.is_zero);
}

TEST(Score, NoHitsIsZero) {
  const auto s = score(small(), "niets te melden");
  EXPECT_EQ(s.value, 0.0);
  EXPECT_EQ(s.hits, 0u);
  EXPECT_TRUE(s.is_zero);
}

TEST(Score, RepeatedTokensCountEachTime) {
  const auto lex = small();
  const auto s = score(lex, "goed goed slecht");
  EXPECT_EQ(s.hits, 3u);
  EXPECT_NEAR(s.value, (0.6 + 0.6 - 0.7) / 3, 1e-15);
  EXPECT_NEAR(score(lex, "goed goed").value, 0.6, 1e-15);
}

TEST(Score, EmojiAttachedToWords) {
  auto lex = small();
  lex.add_emoji("👍", 0.6);
  lex.add_emoji("😷", -0.3);
  EXPECT_NEAR(score(lex, "👍").value, 0.6, 1e-15);
  const auto s = score(lex, "slecht😷😷");
  EXPECT_EQ(s.hits, 3u);
  EXPECT_NEAR(s.value, (-0.7 - 0.3 - 0.3) / 3, 1e-15);
}

TEST(Score, LongestEmojiSequenceWins) {
  PolarityLexicon lex;
  lex.add_emoji("❤", 0.5);
  lex.add_emoji("❤️", 0.8);
  const auto s = score(lex, "ik ❤️ je");
  EXPECT_EQ(s.hits, 1u);
  EXPECT_NEAR(s.value, 0.8, 1e-15);
}

TEST(Score, BagOfWordsAndBounds) {
  const auto lex = PolarityLexicon::load(kData / "lexicon/toy_nl.tsv");
  Rng rng(11);
  std::vector<std::string> pool = {"goed", "slecht", "mooi", "vreselijk", "de", "het", "👍",
                                   "😢",   "blij",   "bang", "fiets", "weer"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> toks;
    const std::size_t n = 1 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) toks.push_back(pool[rng.below(pool.size())]);
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& t : v) s += t + " ";
      return s;
    };
    const auto a = score(lex, join(toks));
    rng.shuffle(std::span<std::string>(toks));
    const auto b = score(lex, join(toks));
    EXPECT_NEAR(a.value, b.value, 1e-12);
    EXPECT_GE(a.value, -1.0);
    EXPECT_LE(a.value, 1.0);
    EXPECT_EQ(b.value, score(lex, join(toks)).value);
  }
}

TEST(Score, AddingWordMovesMeanTowardIt) {
  const auto lex = small();
  const double before = score(lex, "goed goed slecht").value;
  const double after = score(lex, "goed goed slecht slecht").value;
  EXPECT_LT(after, before);
}

TEST(Summary, EmptyStream) {
  PolaritySummary s;
  EXPECT_EQ(s.mean(), 0.0);
  EXPECT_EQ(s.nonzero_fraction(), 0.0);
}

TEST(Summary, HandMeanOfThree) {
  auto lex = small();
  std::vector<Message> msgs(3);
  msgs[0].text = "goed";
  msgs[1].text = "slecht";
  msgs[2].text = "niets";
  std::size_t i = 0;
  const auto summary = score_stream(
      lex, [&](Message& m) { return i < msgs.size() ? (m = msgs[i++], true) : false; },
      [](const Message&, const PolarityScore&) {});
  EXPECT_NEAR(summary.mean(), oracle::mean({0.6, -0.7, 0.0}), 1e-15);
  EXPECT_NEAR(summary.mean(), -0.1 / 3, 1e-15);
  EXPECT_NEAR(summary.nonzero_fraction(), 2.0 / 3, 1e-15);
  EXPECT_NEAR(summary.mean(true), -0.05, 1e-15);
}

TEST(Summary, TwoThirdsNonzeroCorpus) {
  const auto lex = PolarityLexicon::load(kData / "lexicon/toy_nl.tsv");
  PolaritySummary s;
  for (int i = 0; i < 3000; ++i) s.add(score(lex, i % 3 == 2 ? "de trein" : "een mooi dag"));
  EXPECT_NEAR(s.nonzero_fraction(), 2.0 / 3, 1e-12);
}

TEST(Summary, IdenticalTextsGiveSingleValue) {
  const auto lex = small();
  PolaritySummary s;
  for (int i = 0; i < 7; ++i) s.add(score(lex, "goed maar slecht"));
  EXPECT_NEAR(s.mean(), -0.05, 1e-15);
}

TEST(Summary, ShardMergeMatchesSequential) {
  const auto lex = PolarityLexicon::load(kData / "lexicon/toy_nl.tsv");
  PolaritySummary all, a, b;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto s = score(lex, synth::message(i, 0).text + (i % 2 ? " mooi" : " bang"));
    all.add(s);
    (i < 400 ? a : b).add(s);
  }
  b.merge(a);
  EXPECT_EQ(b.count(), all.count());
  EXPECT_NEAR(b.mean(), all.mean(), 1e-9);
}
