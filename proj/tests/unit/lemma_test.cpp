#include <gtest/gtest.h>

#include "exvocab/error.hpp"
#include "exvocab/lemma.hpp"
#include "exvocab/vocabulary.hpp"
#include "generators.hpp"

namespace exvocab {
namespace {

TEST(Lemma, Examples) {
  const Lemmatizer lem;
  EXPECT_EQ(lem.lemmatize("chatbots"), "chatbot");
  for (const char* w : {"delves", "delving", "delved", "delve"}) EXPECT_EQ(lem.lemmatize(w), "delve") << w;
  EXPECT_EQ(lem.lemmatize("analyse"), "analyze");
}

TEST(Lemma, SuffixRules) {
  const Lemmatizer lem;
  EXPECT_EQ(lem.lemmatize("studies"), "study");
  EXPECT_EQ(lem.lemmatize("masks"), "mask");
  EXPECT_EQ(lem.lemmatize("approaches"), "approach");
  EXPECT_EQ(lem.lemmatize("underscores"), "underscore");
  EXPECT_EQ(lem.lemmatize("showcasing"), "showcase");
  EXPECT_EQ(lem.lemmatize("enhancing"), "enhance");
  EXPECT_EQ(lem.lemmatize("exhibited"), "exhibit");
  EXPECT_EQ(lem.lemmatize("mapped"), "map");
  EXPECT_EQ(lem.lemmatize("analysis"), "analysis");
  EXPECT_EQ(lem.lemmatize("virus"), "virus");
  EXPECT_EQ(lem.lemmatize("across"), "across");
}

TEST(Lemma, BritishSpellingBeforeOverrides) {
  const Lemmatizer lem(parse_word_map("tumours,tumor\n"), parse_word_map("colour,color\ntumour,tumor\n"));
  EXPECT_EQ(lem.lemmatize("colours"), "color");
  EXPECT_EQ(lem.lemmatize("tumours"), "tumor");
}

TEST(Lemma, LexiconGatesSuffixCandidates) {
  const Vocabulary lexicon(std::vector<std::string>{"cases", "case", "phases", "phase"});
  const Lemmatizer with(starter_lemma_overrides(), starter_spelling_map(), &lexicon);
  EXPECT_EQ(with.lemmatize("cases"), "case");  // "cas" is not in the lexicon
  EXPECT_EQ(with.lemmatize("phases"), "phase");
  EXPECT_EQ(with.lemmatize("bases"), "basis");  // overrides come before the lexicon
  EXPECT_EQ(with.lemmatize("hoping"), "hoping");  // no candidate in the lexicon
}

TEST(Lemma, WordMapParsing) {
  const auto m = parse_word_map("word,lemma\n# note\nMice, mouse \n");
  ASSERT_EQ(m.size(), 1U);
  EXPECT_EQ(m.at("mice"), "mouse");
  EXPECT_THROW(parse_word_map("a,b,c\n"), Error);
  EXPECT_THROW(parse_word_map("a,\n"), Error);
}

TEST(Lemma, IdempotenceProperty) {
  const Lemmatizer plain;
  const std::vector<std::string> suffixes = {"", "s", "es", "ies", "ing", "ed", "ied", "eed", "ses", "ss"};
  std::size_t n = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    testing::Gen g(testing::case_seed(61, i));
    const std::string w = g.word(2, 9, 26) + suffixes[g.index(suffixes.size())];
    const std::string once = plain.lemmatize(w);
    ASSERT_EQ(plain.lemmatize(once), once) << w;

    std::vector<std::string> lex = g.lexicon(20, 26);
    lex.push_back(w);
    lex.push_back(once);
    const Vocabulary vocab(lex);
    const Lemmatizer gated(starter_lemma_overrides(), starter_spelling_map(), &vocab);
    const std::string g1 = gated.lemmatize(w);
    ASSERT_EQ(gated.lemmatize(g1), g1) << w;
    ++n;
  }
  // Every shipped override and spelling entry too.
  for (const auto& table : {starter_lemma_overrides(), starter_spelling_map()}) {
    for (const auto& [from, to] : table) {
      const std::string once = plain.lemmatize(from);
      ASSERT_EQ(plain.lemmatize(once), once) << from;
      ++n;
    }
  }
  EXPECT_GE(n, 1000U);
}

}  // namespace
}  // namespace exvocab
