#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "exvocab/clean.hpp"
#include "exvocab/error.hpp"
#include "generators.hpp"

namespace exvocab {
namespace {

const std::string kFixtures = EXVOCAB_FIXTURE_DIR;

TEST(Rules, LoadKeepsFileOrder) {
  const RuleSet rules = load_rules(
      "# comment\n"
      "r1\tPREFIX\tSTRIP_MATCH\tfoo\n"
      "r2\tANYWHERE\tSTRIP_TO_END\tbar\n"
      "\n"
      "r3\tSUFFIX\tDROP_DOCUMENT\tbaz\n");
  ASSERT_EQ(rules.size(), 3U);
  EXPECT_EQ(rules.rules()[0].id, "r1");
  EXPECT_EQ(rules.rules()[1].action, RuleAction::kStripToEnd);
  EXPECT_EQ(rules.rules()[2].anchor, RuleAnchor::kSuffix);
}

TEST(Rules, InvalidPatternNamesRule) {
  try {
    load_rules("r1\tANYWHERE\tSTRIP_MATCH\tok\nr2\tANYWHERE\tSTRIP_MATCH\t([\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidPattern);
    EXPECT_NE(std::string(e.what()).find("rule r2: invalid pattern"), std::string::npos) << e.what();
  }
}

TEST(Rules, DuplicateIdsAndBadColumnsRejected) {
  EXPECT_THROW(load_rules("a\tPREFIX\tSTRIP_MATCH\tx\na\tPREFIX\tSTRIP_MATCH\ty\n"), Error);
  EXPECT_THROW(load_rules("a\tSIDEWAYS\tSTRIP_MATCH\tx\n"), Error);
  EXPECT_THROW(load_rules("a\tPREFIX\tERASE\tx\n"), Error);
  EXPECT_THROW(load_rules("a\tPREFIX\n"), Error);
}

TEST(Rules, EmptyFileIsIdentity) {
  const RuleSet rules = load_rules("");
  EXPECT_TRUE(rules.empty());
  const auto out = clean_text("  anything at all ©  ", rules);
  EXPECT_EQ(out.text, "  anything at all ©  ");
  EXPECT_TRUE(out.applied.empty());
  EXPECT_FALSE(out.dropped);
}

TEST(Clean, SuffixCopyrightBlock) {
  const RuleSet rules = load_rules("copyright\tSUFFIX\tSTRIP_TO_END\tCopyright \xc2\xa9.*$\n");
  const auto out = clean_text("We report the results. Copyright \xc2\xa9 2022 Elsevier Inc.", rules);
  EXPECT_EQ(out.text, "We report the results.");
  EXPECT_EQ(out.applied, (std::vector<std::string>{"copyright"}));
}

TEST(Clean, StarterRulesStripKnownBlocks) {
  const RuleSet& rules = starter_rules();
  auto clean = [&](const std::string& s) { return clean_text(s, rules).text; };
  EXPECT_EQ(clean("How to cite this article: Smith J, et al. Title. J Med. 2019;12(3):45-50. Body text here."),
            "Body text here.");
  EXPECT_EQ(clean("Body of the abstract. Copyright \xc2\xa9 2022 Elsevier Inc. All rights reserved."),
            "Body of the abstract.");
  EXPECT_EQ(clean("Body of the abstract. (PsycInfo Database Record (c) 2023 APA, all rights reserved)."),
            "Body of the abstract.");
  EXPECT_EQ(clean("Body text. Communicated by: Ramaswamy H. Sarma"), "Body text.");
  EXPECT_EQ(clean("Body text.\nThis article is protected by copyright. All rights reserved."), "Body text.");
}

TEST(Clean, NoMatchLeavesTextIdentical) {
  const std::string text = "  A perfectly ordinary abstract about copyright law reform.  ";
  const auto out = clean_text(text, starter_rules());
  EXPECT_EQ(out.text, text);
  EXPECT_TRUE(out.applied.empty());
}

TEST(Clean, DropDocumentRecordsRule) {
  const auto out = clean_text("[This corrects the article DOI: 10.1000/xyz.]", starter_rules());
  EXPECT_TRUE(out.dropped);
  EXPECT_FALSE(out.applied.empty());
}

TEST(Clean, StripToStart) {
  const RuleSet rules = load_rules("head\tANYWHERE\tSTRIP_TO_START\tEND OF HEADER\n");
  EXPECT_EQ(clean_text("junk junk END OF HEADER body", rules).text, "body");
}

// Abstract-like texts assembled from contamination blocks around a body.
std::string contaminated(testing::Gen& g) {
  static const char* prefixes[] = {
      "", "Abstract: ", "How to cite this article: Doe A. A title. Ann Med. 2020;7(1):1-9. ",
      "[Editor's note: see the accompanying commentary.] "};
  static const char* bodies[] = {
      "We measured outcomes in a cohort of patients.",
      "Results suggest a modest benefit; further trials are needed.",
      "Copyright law is a topic; no notice follows here.",
      "Keywords are not listed here, and the authors declare no conflicts."};
  static const char* suffixes[] = {
      "", " Copyright \xc2\xa9 2021 Wiley Periodicals LLC.", " \xc2\xa9 The Author(s) 2023.",
      " All rights reserved.", " (PsycInfo Database Record (c) 2022 APA, all rights reserved).",
      " Communicated by Ramaswamy H. Sarma.", " Keywords: alpha; beta.",
      " doi: 10.1000/abc.123", " Published by Elsevier Ltd.",
      " This article is protected by copyright. All rights reserved.",
      " The Author(s) 2021. Published by Oxford University Press."};
  std::string s = prefixes[g.index(std::size(prefixes))];
  for (std::int64_t i = g.range(1, 3); i > 0; --i) s += std::string(bodies[g.index(std::size(bodies))]) + " ";
  for (std::int64_t i = g.range(0, 3); i > 0; --i) s += suffixes[g.index(std::size(suffixes))];
  return s;
}

TEST(Clean, StarterRulesIdempotentAndNeverLengthenProperty) {
  testing::Gen g(99);
  const RuleSet& rules = starter_rules();
  for (int i = 0; i < 1000; ++i) {
    const std::string text = contaminated(g);
    const auto once = clean_text(text, rules);
    ASSERT_LE(once.text.size(), text.size()) << text;
    if (once.dropped) {
      ASSERT_FALSE(once.applied.empty());
      continue;
    }
    const auto twice = clean_text(once.text, rules);
    ASSERT_EQ(twice.text, once.text) << "case " << i << ": " << text;
    ASSERT_TRUE(twice.applied.empty()) << once.text;
  }
}

TEST(CorrectionNotice, SpecExamples) {
  EXPECT_TRUE(is_correction_notice("Erratum: Gene expression in the developing mouse cortex"));
  EXPECT_FALSE(is_correction_notice("Correcting for batch effects in RNA-seq"));
  EXPECT_FALSE(is_correction_notice(""));
}

TEST(CorrectionNotice, HandLabeledTitles) {
  std::ifstream in(kFixtures + "/correction_titles.tsv");
  ASSERT_TRUE(in);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const bool label = line[0] == '1';
    const std::string title = line.substr(2);
    EXPECT_EQ(is_correction_notice(title), label) << title;
    ++n;
  }
  EXPECT_EQ(n, 50);
}

TEST(CleaningReport, CountsAndJson) {
  CleaningReport r;
  r.record(CleanOutcome{"x", {"a"}, false}, true);
  r.record(CleanOutcome{"", {"drop"}, true}, false);
  r.record(CleanOutcome{"y", {}, false}, false);
  EXPECT_EQ(r.documents_seen, 3U);
  EXPECT_EQ(r.documents_modified, 1U);
  EXPECT_EQ(r.documents_dropped, 1U);
  EXPECT_EQ(r.per_rule_counts.at("a"), 1U);
  const std::string json = r.to_json();
  EXPECT_NE(json.find("\"documents_modified\": 1"), std::string::npos);
  EXPECT_NE(json.find("\"per_rule_counts\""), std::string::npos);
}

}  // namespace
}  // namespace exvocab
