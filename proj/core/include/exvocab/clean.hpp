#pragma once

#include <cstdint>
#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace exvocab {

enum class RuleAction { kStripMatch, kStripToEnd, kStripToStart, kDropDocument };
enum class RuleAnchor { kAnywhere, kPrefix, kSuffix };

struct CleaningRule {
  std::string id;
  RuleAnchor anchor = RuleAnchor::kAnywhere;
  RuleAction action = RuleAction::kStripMatch;
  std::string pattern;
};

struct CleanOutcome {
  std::string text;
  std::vector<std::string> applied;
  bool dropped = false;
};

// An ordered, compiled rule set. Immutable after construction and safe to
// share between threads.
class RuleSet {
 public:
  RuleSet() = default;
  // Throws Error(kInvalidPattern) naming the rule id and its position, or
  // Error(kParse) for duplicate ids.
  explicit RuleSet(std::vector<CleaningRule> rules);

  const std::vector<CleaningRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  CleanOutcome clean(std::string_view text) const;

 private:
  std::vector<CleaningRule> rules_;
  std::vector<std::regex> compiled_;
};

// TSV: id<TAB>anchor<TAB>action<TAB>pattern, `#` comments, blank lines ignored.
// anchor in {ANYWHERE, PREFIX, SUFFIX}; action in {STRIP_MATCH, STRIP_TO_END,
// STRIP_TO_START, DROP_DOCUMENT}.
RuleSet load_rules(std::string_view tsv);
RuleSet starter_rules();

inline CleanOutcome clean_text(std::string_view text, const RuleSet& rules) {
  return rules.clean(text);
}

// True iff the title has the form of an erratum, corrigendum, correction,
// retraction or expression-of-concern notice.
bool is_correction_notice(std::string_view title);

struct CleaningReport {
  std::uint64_t documents_seen = 0;
  std::uint64_t documents_modified = 0;
  std::uint64_t documents_dropped = 0;      // DROP_DOCUMENT rules
  std::uint64_t correction_notices = 0;     // dropped by title
  std::uint64_t cleaned_too_short = 0;
  std::map<std::string, std::uint64_t> per_rule_counts;

  void record(const CleanOutcome& outcome, bool modified);
  std::string to_json() const;
};

}  // namespace exvocab
