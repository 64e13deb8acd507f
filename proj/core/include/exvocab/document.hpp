#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace exvocab {

// One abstract plus the metadata used for filtering and subgrouping.
struct Document {
  std::string id;
  int year = 0;
  std::string title;
  std::string text;
  std::optional<std::string> journal;
  std::optional<std::string> country;
  std::optional<std::string> language;  // declared language tag, e.g. "eng"
  std::set<std::string> fields;
  std::map<std::string, std::string> extra;

  friend bool operator==(const Document&, const Document&) = default;
};

inline constexpr int kMinDocumentYear = 1800;
inline constexpr int kMaxDocumentYear = 2100;

struct YearRange {
  int lo = 2010;
  int hi = 2024;

  bool contains(int year) const noexcept { return year >= lo && year <= hi; }
  int size() const noexcept { return hi - lo + 1; }
  std::vector<int> years() const;

  friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct FilterCriteria {
  int min_chars = 250;
  int max_chars = 4000;
  std::string language = "eng";
  YearRange year_range;

  // Throws if min_chars > max_chars or lo > hi.
  void validate() const;
};

enum class RejectReason {
  kTooShort,
  kTooLong,
  kWrongLanguage,
  kYearOutOfRange,
  kCleanedTooShort,
};

std::string_view reject_reason_name(RejectReason reason);

struct Accept {
  friend bool operator==(Accept, Accept) = default;
};
using FilterDecision = std::variant<Accept, RejectReason>;

inline bool accepted(const FilterDecision& d) { return std::holds_alternative<Accept>(d); }

// Number of Unicode scalar values in a UTF-8 string. Continuation bytes are
// not counted, so malformed input degrades gracefully rather than throwing.
std::size_t utf8_length(std::string_view text);

FilterDecision filter_document(const Document& doc, const FilterCriteria& criteria);

struct FieldRule {
  std::string field_name;
  std::string journal_substring;
};

// Field rule file: `field<TAB>journal substring` per line, `#` comments.
std::vector<FieldRule> parse_field_rules(std::string_view contents);
std::vector<FieldRule> starter_field_rules();

std::set<std::string> assign_fields(std::string_view journal, const std::vector<FieldRule>& rules);

}  // namespace exvocab
