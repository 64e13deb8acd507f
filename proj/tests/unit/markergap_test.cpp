#include <gtest/gtest.h>

#include <functional>

#include "exvocab/count.hpp"
#include "exvocab/error.hpp"
#include "exvocab/excess.hpp"
#include "exvocab/markergap.hpp"
#include "generators.hpp"

namespace exvocab {
namespace {

const std::vector<int> kYears = {2021, 2022, 2023, 2024};

CountOptions options() {
  CountOptions o;
  o.years = kYears;
  return o;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInvalidArgument;
}

TEST(Gap, HandComputed) {
  const ContainmentCounts c{kYears, {9, 19, 50, 99}, {999, 999, 999, 999}};
  const GapResult g = gap(c, 2024);
  EXPECT_DOUBLE_EQ(g.P, 0.1);
  EXPECT_DOUBLE_EQ(g.P_minus2, 0.02);
  EXPECT_DOUBLE_EQ(g.P_minus3, 0.01);
  EXPECT_DOUBLE_EQ(g.Q, 0.04);
  EXPECT_EQ(g.Delta, g.P - g.Q);
  EXPECT_EQ(g.n_docs, 999U);
}

TEST(Gap, NegativeDeltaReportedAsIs) {
  const ContainmentCounts c{kYears, {10, 20, 20, 5}, {1000, 1000, 1000, 1000}};
  EXPECT_LT(gap(c, 2024).Delta, 0.0);
}

TEST(Gap, AbsentWordsGiveZero) {
  const std::vector<Document> docs = {{"1", 2021, "", "nothing relevant"},
                                      {"2", 2022, "", "nothing relevant"},
                                      {"3", 2023, "", "nothing relevant"},
                                      {"4", 2024, "", "nothing relevant"}};
  const auto c = containment_counts(std::span<const Document>(docs), {"zzzz", "yyyy"}, options());
  const GapResult g = gap(c, 2024);
  EXPECT_EQ(g.P, 0.5);  // (0+1)/(1+1)
  EXPECT_EQ(g.Q, g.P);
  EXPECT_EQ(g.Delta, 0.0);
}

TEST(Gap, MissingYear) {
  const ContainmentCounts c{{2022, 2023, 2024}, {1, 1, 1}, {5, 5, 5}};
  EXPECT_EQ(code_of([&] { gap(c, 2024); }), ErrorCode::kMissingYear);
}

// Singleton set gap equals the per-word delta bit for bit.
TEST(GapProperties, SingletonEqualsWordDelta) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    testing::Gen g(testing::case_seed(71, i));
    const auto lex = g.lexicon(g.range(1, 12));
    const auto docs = g.corpus(g.range(0, 60), lex, 2021, 2024, 6);
    const Vocabulary vocab(lex);
    const auto m = count_occurrences(std::span<const Document>(docs), vocab, options());
    const std::string& w = lex[g.index(lex.size())];
    const auto c = containment_counts(std::span<const Document>(docs), {w}, options());
    ExcessThresholds t;
    t.letters_only = false;
    const auto s = word_year_stats(m, w, 2024, t);
    const GapResult gr = gap(c, 2024);
    ASSERT_EQ(gr.Delta, s.delta) << "case " << i << " word " << w;
    ASSERT_EQ(gr.P, s.p);
    ASSERT_EQ(gr.Q, s.q);
  }
}

TEST(GapProperties, AddingAWordNeverLowersP) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    testing::Gen g(testing::case_seed(73, i));
    const auto lex = g.lexicon(10);
    const auto docs = g.corpus(80, lex, 2021, 2024, 4);
    std::set<std::string> set;
    std::vector<std::uint64_t> prev(kYears.size(), 0);
    for (const auto& w : lex) {
      set.insert(w);
      const auto c = containment_counts(std::span<const Document>(docs), set, options());
      for (std::size_t y = 0; y < kYears.size(); ++y) {
        ASSERT_GE(c.hits[y], prev[y]);
        prev[y] = c.hits[y];
      }
    }
  }
}

TEST(RareSweep, EqualsDirectGapPerThresholdAndPIsMonotone) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    testing::Gen g(testing::case_seed(79, i));
    const auto lex = g.lexicon(15);
    const auto docs = g.corpus(200, lex, 2021, 2024, 5);
    std::map<std::string, double> candidates;
    for (std::int64_t k = g.range(1, 10); k > 0; --k) {
      candidates[lex[g.index(lex.size())]] = g.log_uniform(1e-4, 0.5);
    }
    const auto profile =
        min_marker_frequency_profile(std::span<const Document>(docs), candidates, options());
    const auto thresholds = default_sweep_thresholds();
    const auto sweep = rare_sweep(profile, candidates, thresholds, 2024);

    std::size_t point = 0;
    double last_p = 0;
    for (double t : thresholds) {
      std::set<std::string> subset;
      for (const auto& [w, p] : candidates) {
        if (p < t) subset.insert(w);
      }
      if (subset.empty()) continue;  // skipped point
      ASSERT_LT(point, sweep.points.size());
      const auto& sp = sweep.points[point++];
      ASSERT_EQ(sp.threshold, t);
      ASSERT_EQ(sp.n_words, subset.size());
      const GapResult direct = gap(containment_counts(std::span<const Document>(docs), subset, options()), 2024);
      ASSERT_EQ(sp.P, direct.P);
      ASSERT_EQ(sp.Q, direct.Q);
      ASSERT_EQ(sp.Delta, direct.Delta);
      ASSERT_GE(sp.P, last_p);
      last_p = sp.P;
    }
    ASSERT_EQ(point, sweep.points.size());
    ASSERT_TRUE(sweep.best.has_value());
    for (const auto& p : sweep.points) ASSERT_LE(p.Delta, sweep.points[*sweep.best].Delta);
    for (const auto& w : sweep.best_words(candidates)) {
      ASSERT_LT(candidates.at(w), sweep.points[*sweep.best].threshold);
    }
  }
}

TEST(RareSweep, EmptyCandidatesAndTinyThresholds) {
  MinFrequencyProfile profile(kYears);
  profile.finalize();
  EXPECT_EQ(code_of([&] { rare_sweep(profile, {}, {0.1}, 2024); }), ErrorCode::kInvalidArgument);
  const auto sweep = rare_sweep(profile, {{"word", 0.01}}, {0.001, 0.005}, 2024);
  EXPECT_TRUE(sweep.points.empty());
  EXPECT_FALSE(sweep.best.has_value());
  EXPECT_TRUE(sweep.best_words({{"word", 0.01}}).empty());
}

TEST(RareSweep, DefaultGrid) {
  const auto t = default_sweep_thresholds();
  EXPECT_EQ(t.front(), 1e-4);
  EXPECT_EQ(t.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
  EXPECT_NE(std::find(t.begin(), t.end(), 0.02), t.end());
}

TEST(RareCandidates, ExcessStyleWordsOnly) {
  const OccurrenceMatrix m({2021, 2022, 2023, 2024}, {"delves", "hospital", "pandemic"},
                           {1, 1, 5, 30, 100, 100, 100, 100, 1, 1, 10, 40}, {10000, 10000, 10000, 10000});
  const auto ann = AnnotationTable::parse("delves,style,verb\nhospital,style,noun\npandemic,content,noun\n");
  const auto c = rare_candidates(excess_words(m, 2024, {}, &ann));
  ASSERT_EQ(c.size(), 1U);
  EXPECT_DOUBLE_EQ(c.at("delves"), 31.0 / 10001.0);
}

MarkerSet set_of(std::string name, std::set<std::string> words) {
  return MarkerSet{std::move(name), std::move(words), MarkerKind::kCustom};
}

TEST(Combined, MeanAndOverlap) {
  EXPECT_NEAR(combined_estimate(0.136, 0.134), 0.135, 1e-15);
  EXPECT_EQ(combined_estimate(0.07, 0.07), 0.07);
  EXPECT_EQ(combined_estimate(set_of("rare", {"delves"}), set_of("common", {"within"}), 0.2, 0.1),
            combined_estimate(0.2, 0.1));
  try {
    combined_estimate(set_of("rare", {"delves", "within"}), set_of("common", {"within"}), 0.2, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSetsOverlap);
    EXPECT_NE(std::string(e.what()).find("within"), std::string::npos);
  }
}

TEST(MarkerSets, ParsingAndStarterSet) {
  const auto common = starter_common_set();
  EXPECT_EQ(common.words, (std::set<std::string>{"across", "additionally", "comprehensive", "crucial",
                                                 "enhancing", "exhibited", "insights", "notably",
                                                 "particularly", "within"}));
  EXPECT_EQ(common.kind, MarkerKind::kCommon);
  const auto s = parse_marker_set("# rare\ndelves\n\nshowcasing\n", "rare", MarkerKind::kRare);
  EXPECT_EQ(s.words.size(), 2U);
  EXPECT_THROW(parse_marker_set("# nothing\n", "empty", MarkerKind::kRare), Error);
  EXPECT_FALSE(starter_covid_set().words.empty());
}

TEST(Greedy, StepsMatchDirectGapsAndIncrease) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    testing::Gen g(testing::case_seed(83, i));
    const auto lex = g.lexicon(12);
    auto docs = g.corpus(300, lex, 2021, 2024, 3);
    SpanSource src{std::span<const Document>(docs)};
    const auto steps = greedy_marker_set(src, lex, 2024, 5);
    ASSERT_LE(steps.size(), 5U);
    std::set<std::string> set;
    double prev = -1e300;
    for (const auto& st : steps) {
      ASSERT_TRUE(set.insert(st.word).second);
      const GapResult direct = gap(containment_counts(std::span<const Document>(docs), set, options()), 2024);
      ASSERT_EQ(st.gap.Delta, direct.Delta);
      ASSERT_GT(st.gap.Delta, prev);
      prev = st.gap.Delta;
    }
    if (!steps.empty()) {
      // The first pick is the best singleton.
      for (const auto& w : lex) {
        const GapResult single = gap(containment_counts(std::span<const Document>(docs), {w}, options()), 2024);
        ASSERT_LE(single.Delta, steps[0].gap.Delta);
      }
    }
  }
}

TEST(Csv, SweepAndGapHeaders) {
  SweepResult s;
  s.points.push_back({0.02, 3, 0.5, 0.25, 0.25});
  EXPECT_EQ(sweep_csv(s), "threshold,n_words,P,Q,delta\n0.02,3,0.5,0.25,0.25\n");
  GapResult g;
  g.year = 2024;
  g.P = 0.5;
  g.Q = 0.25;
  g.Delta = 0.25;
  g.n_docs = 7;
  EXPECT_EQ(gap_csv({{"rare", g}}), "set,year,P,Q,delta,n_docs\nrare,2024,0.5,0.25,0.25,7\n");
}

}  // namespace
}  // namespace exvocab
