#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "exvocab/count.hpp"
#include "exvocab/error.hpp"
#include "exvocab/ingest.hpp"
#include "exvocab/synth.hpp"
#include "exvocab/tokenize.hpp"
#include "exvocab/vocabulary.hpp"
#include "generators.hpp"

namespace exvocab {
namespace {

Document doc(int year, std::string text, std::string id = "") {
  Document d;
  d.id = id.empty() ? text : id;
  d.year = year;
  d.text = std::move(text);
  return d;
}

CountOptions opts(std::vector<int> years, unsigned workers = 1) {
  CountOptions o;
  o.years = std::move(years);
  o.workers = workers;
  o.batch_size = 7;  // small batches exercise the shard hand-off
  return o;
}

// Test-local oracle: split on anything that is not an ASCII letter, digit or
// underscore (non-ASCII bytes count as word bytes), lowercase, dedupe.
std::set<std::string> naive_tokens(const std::string& text) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = std::isalnum(c) || c == '_' || c >= 0x80;
    if (word) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

TEST(Tokenize, BinaryLowercaseSets) {
  EXPECT_EQ(tokenize("Mask and masks"), (std::set<std::string>{"and", "mask", "masks"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("CO2 levels").count("co2"));
  EXPECT_FALSE(is_eligible_word("co2"));
  EXPECT_FALSE(is_eligible_word("and"));
  EXPECT_FALSE(is_eligible_word("caf\xc3\xa9s"));
  EXPECT_TRUE(is_eligible_word("mask"));
  EXPECT_TRUE(is_eligible_word("masks"));
}

TEST(Tokenize, UnicodePunctuationSeparates) {
  EXPECT_EQ(tokenize("alpha\xe2\x80\x94" "beta\xc2\xa9gamma"), (std::set<std::string>{"alpha", "beta", "gamma"}));
}

TEST(Vocabulary, SingleDocument) {
  const std::vector<Document> docs = {doc(2020, "alpha beta beta")};
  EXPECT_EQ(build_vocabulary(docs).words(), (std::vector<std::string>{"alpha", "beta"}));
}

TEST(Vocabulary, MinDfThreshold) {
  const std::vector<Document> docs = {doc(2020, "gamma delta", "1"), doc(2020, "delta", "2"),
                                      doc(2020, "delta", "3"), doc(2020, "epsilon delta", "4")};
  VocabularyOptions o;
  o.min_df = 0.5;
  const Vocabulary v = build_vocabulary(docs, o);
  EXPECT_FALSE(v.contains("gamma"));
  EXPECT_TRUE(v.contains("delta"));
}

TEST(Vocabulary, EligibilityFilterAndFullMode) {
  const std::vector<Document> docs = {doc(2020, "Mask and masks, CO2 x caf\xc3\xa9")};
  EXPECT_EQ(build_vocabulary(docs).words(), (std::vector<std::string>{"mask", "masks"}));
  VocabularyOptions full;
  full.eligible_only = false;
  const Vocabulary v = build_vocabulary(docs, full);
  EXPECT_TRUE(v.contains("and"));
  EXPECT_TRUE(v.contains("co2"));
  EXPECT_FALSE(v.contains("x"));
}

TEST(Vocabulary, EmptyCorpusIsAnError) {
  try {
    build_vocabulary(std::vector<Document>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
    EXPECT_EQ(std::string(e.what()), "no documents");
  }
}

TEST(Vocabulary, WordListParsing) {
  EXPECT_EQ(parse_word_list("# c\nalpha\n\n beta \n"), (std::vector<std::string>{"alpha", "beta"}));
}

TEST(Count, SpecExample) {
  const std::vector<Document> docs = {doc(2020, "alpha beta", "1"), doc(2020, "alpha alpha", "2"),
                                      doc(2021, "beta", "3")};
  const Vocabulary v(std::vector<std::string>{"alpha", "beta"});
  const OccurrenceMatrix m = count_occurrences(docs, v, opts({2020, 2021}));
  EXPECT_EQ(m.count(*m.word_index("alpha"), 0), 2U);
  EXPECT_EQ(m.count(*m.word_index("alpha"), 1), 0U);
  EXPECT_EQ(m.count(*m.word_index("beta"), 0), 1U);
  EXPECT_EQ(m.count(*m.word_index("beta"), 1), 1U);
  EXPECT_EQ(m.totals(), (std::vector<std::uint64_t>{2, 1}));
}

TEST(Count, EmptyYearInRange) {
  const std::vector<Document> docs = {doc(2020, "alpha")};
  const OccurrenceMatrix m = count_occurrences(docs, Vocabulary({"alpha"}), opts({2020, 2021, 2022}));
  EXPECT_EQ(m.total(2), 0U);
  EXPECT_EQ(m.count(0, 2), 0U);
}

TEST(Count, OutOfRangeYearStrictAndLenient) {
  const std::vector<Document> docs = {doc(2020, "alpha", "1"), doc(2030, "alpha", "2")};
  const Vocabulary v({"alpha"});
  try {
    count_occurrences(docs, v, opts({2020}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kYearOutOfRange);
  }
  CountOptions lenient = opts({2020});
  lenient.strict = false;
  CountTally tally;
  const auto m = count_occurrences(docs, v, lenient, &tally);
  EXPECT_EQ(tally.out_of_range, 1U);
  EXPECT_EQ(m.total(0), 1U);
}

TEST(Count, OracleEquivalenceProperty) {
  const std::vector<int> years = {2018, 2019, 2020, 2021};
  for (std::uint64_t i = 0; i < 200; ++i) {
    testing::Gen g(testing::case_seed(7, i));
    const auto lex = g.lexicon(static_cast<std::size_t>(g.range(5, 40)));
    const auto docs = g.corpus(static_cast<std::size_t>(g.range(1, 150)), lex, 2018, 2021);
    const Vocabulary v(lex);
    const auto m = count_occurrences(docs, v, opts(years, static_cast<unsigned>(g.range(1, 4))));
    ASSERT_EQ(m, oracle_counts(docs, v.words(), years)) << "case " << i;
    // Second, test-local oracle.
    std::map<std::string, std::vector<std::uint64_t>> naive;
    for (const auto& w : v.words()) naive[w].assign(years.size(), 0);
    for (const auto& d : docs) {
      const std::size_t y = static_cast<std::size_t>(d.year - 2018);
      for (const auto& t : naive_tokens(d.text)) {
        auto it = naive.find(t);
        if (it != naive.end()) ++it->second[y];
      }
    }
    for (const auto& [w, row] : naive) {
      const auto r = m.row(*m.word_index(w));
      ASSERT_TRUE(std::equal(r.begin(), r.end(), row.begin())) << w;
    }
  }
}

TEST(Count, OrderIndependenceAndBinarityProperty) {
  const std::vector<int> years = {2020, 2021};
  for (std::uint64_t i = 0; i < 200; ++i) {
    testing::Gen g(testing::case_seed(8, i));
    const auto lex = g.lexicon(20);
    auto docs = g.corpus(60, lex, 2020, 2021);
    const Vocabulary v(lex);
    const auto base = count_occurrences(docs, v, opts(years));
    std::vector<Document> shuffled = docs;
    for (std::size_t k = shuffled.size(); k > 1; --k) std::swap(shuffled[k - 1], shuffled[g.index(k)]);
    ASSERT_EQ(count_occurrences(shuffled, v, opts(years, 3)), base);
    // Repeat a word already present in one document.
    auto& d = docs[g.index(docs.size())];
    const auto toks = tokenize(d.text);
    if (!toks.empty()) d.text += " " + *toks.begin() + " " + *toks.begin();
    ASSERT_EQ(count_occurrences(docs, v, opts(years)), base);
  }
}

TEST(Merge, MonoidLawsProperty) {
  const std::vector<int> years = {2019, 2020, 2021};
  for (std::uint64_t i = 0; i < 1000; ++i) {
    testing::Gen g(testing::case_seed(9, i));
    const auto lex = g.lexicon(12);
    const Vocabulary v(lex);
    const auto docs = g.corpus(static_cast<std::size_t>(g.range(0, 60)), lex, 2019, 2021, 6);
    const std::size_t c1 = g.index(docs.size() + 1);
    const std::size_t c2 = c1 + g.index(docs.size() - c1 + 1);
    const std::span<const Document> all(docs);
    const auto a = count_occurrences(all.subspan(0, c1), v, opts(years));
    const auto b = count_occurrences(all.subspan(c1, c2 - c1), v, opts(years));
    const auto c = count_occurrences(all.subspan(c2), v, opts(years));
    const OccurrenceMatrix zero(years, v.words());
    ASSERT_EQ(merge(a, zero), a);
    ASSERT_EQ(merge(zero, a), a);
    ASSERT_EQ(merge(a, b), merge(b, a));
    ASSERT_EQ(merge(merge(a, b), c), merge(a, merge(b, c)));
    ASSERT_EQ(merge(merge(a, b), c), count_occurrences(all, v, opts(years)));
  }
}

TEST(Merge, FourShardsEqualSequential) {
  testing::Gen g(10);
  const auto lex = g.lexicon(60);
  const auto docs = g.corpus(1000, lex, 2020, 2022);
  const Vocabulary v(lex);
  const std::vector<int> years = {2020, 2021, 2022};
  const std::span<const Document> all(docs);
  OccurrenceMatrix merged(years, v.words());
  for (int s = 0; s < 4; ++s) merged = merge(merged, count_occurrences(all.subspan(s * 250, 250), v, opts(years)));
  EXPECT_EQ(merged, count_occurrences(all, v, opts(years)));
  EXPECT_EQ(merged, count_occurrences(all, v, opts(years, 4)));
}

TEST(Merge, MismatchedShapesRejected) {
  const OccurrenceMatrix a({2020}, {"alpha"});
  EXPECT_THROW(merge(a, OccurrenceMatrix({2021}, {"alpha"})), Error);
  EXPECT_THROW(merge(a, OccurrenceMatrix({2020}, {"beta"})), Error);
}

TEST(Containment, SpecExamples) {
  const std::vector<Document> docs = {doc(2020, "alpha beta", "1"), doc(2020, "gamma", "2")};
  const auto c = containment_counts(docs, {"alpha", "beta"}, opts({2020}));
  EXPECT_EQ(c.hits, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(c.totals, (std::vector<std::uint64_t>{2}));
  EXPECT_THROW(containment_counts(docs, {}, opts({2020})), Error);
}

TEST(Containment, DisjointSupportIsAdditive) {
  const std::vector<Document> docs = {doc(2020, "alpha", "1"), doc(2020, "beta", "2"), doc(2020, "omega", "3")};
  const auto u = containment_counts(docs, {"alpha", "beta"}, opts({2020}));
  EXPECT_EQ(u.hits[0], 2U);
}

TEST(Containment, UnionBoundsAndSingletonProperty) {
  const std::vector<int> years = {2020, 2021, 2022};
  for (std::uint64_t i = 0; i < 300; ++i) {
    testing::Gen g(testing::case_seed(12, i));
    const auto lex = g.lexicon(25);
    const auto docs = g.corpus(static_cast<std::size_t>(g.range(1, 120)), lex, 2020, 2022);
    const Vocabulary v(lex);
    const auto m = count_occurrences(docs, v, opts(years));
    std::set<std::string> set;
    for (std::int64_t k = g.range(1, 6); k > 0; --k) set.insert(lex[g.index(lex.size())]);
    const auto c = containment_counts(docs, set, opts(years, 2));
    ASSERT_EQ(c.totals, m.totals());
    for (std::size_t y = 0; y < years.size(); ++y) {
      std::uint64_t mx = 0, sum = 0;
      for (const auto& w : set) {
        mx = std::max(mx, m.count(*m.word_index(w), y));
        sum += m.count(*m.word_index(w), y);
      }
      ASSERT_LE(mx, c.hits[y]);
      ASSERT_LE(c.hits[y], std::min(sum, m.total(y)));
    }
    const std::string w = *set.begin();
    const auto single = containment_counts(docs, {w}, opts(years));
    const auto row = m.row(*m.word_index(w));
    ASSERT_TRUE(std::equal(row.begin(), row.end(), single.hits.begin()));
  }
}

TEST(Containment, MergeOfShards) {
  testing::Gen g(13);
  const auto lex = g.lexicon(20);
  const auto docs = g.corpus(200, lex, 2020, 2021);
  const std::span<const Document> all(docs);
  const std::set<std::string> set = {lex[0], lex[1]};
  auto a = containment_counts(all.subspan(0, 80), set, opts({2020, 2021}));
  a.merge(containment_counts(all.subspan(80), set, opts({2020, 2021})));
  EXPECT_EQ(a, containment_counts(all, set, opts({2020, 2021})));
}

TEST(MinFrequency, PerDocumentMinimum) {
  StringMap<double> cands;
  cands["rarely"] = 0.005;
  cands["often"] = 0.03;
  EXPECT_EQ(min_candidate_frequency("we often and rarely", cands), 0.005);
  EXPECT_EQ(min_candidate_frequency("often", cands), 0.03);
  EXPECT_EQ(min_candidate_frequency("neither word", cands), std::nullopt);
}

TEST(MinFrequency, ProfileThresholdSemantics) {
  const std::vector<Document> docs = {doc(2020, "rarely often", "1"), doc(2020, "often", "2"),
                                      doc(2020, "none", "3")};
  const std::map<std::string, double> cands = {{"rarely", 0.005}, {"often", 0.03}};
  const auto prof = min_marker_frequency_profile(docs, cands, opts({2020}));
  EXPECT_EQ(prof.count_below(2020, 0.01), 1U);   // the 0.03 word alone does not count
  EXPECT_EQ(prof.count_below(2020, 0.03), 1U);   // strict
  EXPECT_EQ(prof.count_below(2020, 0.031), 2U);
  EXPECT_EQ(prof.total(2020), 3U);
  EXPECT_THROW(prof.count_below(1999, 0.1), Error);
}

TEST(MinFrequency, RejectsBadCandidatesAndUnsortedQueries) {
  const std::vector<Document> docs = {doc(2020, "word")};
  EXPECT_THROW(min_marker_frequency_profile(docs, {}, opts({2020})), Error);
  EXPECT_THROW(min_marker_frequency_profile(docs, {{"word", 0.0}}, opts({2020})), Error);
  EXPECT_THROW(min_marker_frequency_profile(docs, {{"word", 1.5}}, opts({2020})), Error);
  MinFrequencyProfile p({2020});
  p.add(2020, 0.1);
  EXPECT_THROW(p.count_below(2020, 0.5), Error);
}

TEST(MinFrequency, SweepEqualsDirectContainmentProperty) {
  const std::vector<int> years = {2020, 2021};
  for (std::uint64_t i = 0; i < 50; ++i) {
    testing::Gen g(testing::case_seed(14, i));
    const auto lex = g.lexicon(30);
    const auto docs = g.corpus(500, lex, 2020, 2021, 8);
    std::map<std::string, double> cands;
    for (std::int64_t k = g.range(1, 10); k > 0; --k) cands[lex[g.index(lex.size())]] = g.log_uniform(1e-4, 1.0);
    const auto prof = min_marker_frequency_profile(docs, cands, opts(years, 3));
    std::set<double> thresholds = {1e-4, 1.0};
    for (const auto& [w, p] : cands) {
      thresholds.insert(p);
      thresholds.insert(std::nextafter(p, 2.0));
    }
    for (double t : thresholds) {
      std::set<std::string> subset;
      for (const auto& [w, p] : cands) {
        if (p < t) subset.insert(w);
      }
      const auto viaprof = prof.containment_below(t);
      if (subset.empty()) {
        ASSERT_EQ(viaprof.hits, (std::vector<std::uint64_t>{0, 0}));
        continue;
      }
      ASSERT_EQ(viaprof, containment_counts(docs, subset, opts(years))) << "t=" << t;
    }
  }
}

TEST(MinFrequency, ProfileMergeIsOrderFree) {
  MinFrequencyProfile a({2020}), b({2020});
  a.add(2020, 0.2);
  a.add(2020, std::nullopt);
  b.add(2020, 0.1);
  MinFrequencyProfile ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  ab.finalize();
  ba.finalize();
  EXPECT_EQ(ab.count_below(2020, 0.15), 1U);
  EXPECT_EQ(ba.count_below(2020, 0.15), 1U);
  EXPECT_EQ(ab.total(2020), 3U);
}

TEST(Count, FileSourceStreamsSameAsSpan) {
  testing::Gen g(15);
  const auto lex = g.lexicon(15);
  const auto docs = g.corpus(80, lex, 2020, 2021);
  SpanSource src(docs);
  EXPECT_EQ(count_occurrences(src, Vocabulary(lex), opts({2020, 2021}, 2)),
            count_occurrences(docs, Vocabulary(lex), opts({2020, 2021})));
}

}  // namespace
}  // namespace exvocab
