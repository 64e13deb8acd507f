#include "exvocab/document.hpp"

#include "exvocab/embedded_data.hpp"
#include "exvocab/error.hpp"
#include "exvocab/io.hpp"

namespace exvocab {

std::vector<int> YearRange::years() const {
  std::vector<int> out;
  for (int y = lo; y <= hi; ++y) out.push_back(y);
  return out;
}

void FilterCriteria::validate() const {
  if (min_chars > max_chars) {
    throw Error(ErrorCode::kInvalidArgument, "filter: min_chars exceeds max_chars");
  }
  if (year_range.lo > year_range.hi) {
    throw Error(ErrorCode::kInvalidArgument, "filter: year range lo exceeds hi");
  }
}

std::string_view reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::kTooShort: return "TOO_SHORT";
    case RejectReason::kTooLong: return "TOO_LONG";
    case RejectReason::kWrongLanguage: return "WRONG_LANGUAGE";
    case RejectReason::kYearOutOfRange: return "YEAR_OUT_OF_RANGE";
    case RejectReason::kCleanedTooShort: return "CLEANED_TOO_SHORT";
  }
  return "UNKNOWN";
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

FilterDecision filter_document(const Document& doc, const FilterCriteria& criteria) {
  const std::size_t length = utf8_length(doc.text);
  if (length < static_cast<std::size_t>(criteria.min_chars)) return RejectReason::kTooShort;
  if (length > static_cast<std::size_t>(criteria.max_chars)) return RejectReason::kTooLong;
  if (doc.language && !criteria.language.empty() && *doc.language != criteria.language) {
    return RejectReason::kWrongLanguage;
  }
  if (!criteria.year_range.contains(doc.year)) return RejectReason::kYearOutOfRange;
  return Accept{};
}

std::vector<FieldRule> parse_field_rules(std::string_view contents) {
  std::vector<FieldRule> rules;
  std::size_t line_no = 0;
  while (!contents.empty()) {
    std::size_t nl = contents.find('\n');
    std::string_view line = contents.substr(0, nl);
    contents = nl == std::string_view::npos ? std::string_view{} : contents.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kParse,
                  "field rules line " + std::to_string(line_no) + ": expected field<TAB>substring");
    }
    FieldRule rule{std::string(trim(line.substr(0, tab))),
                   to_lower_ascii(trim(line.substr(tab + 1)))};
    if (rule.field_name.empty() || rule.journal_substring.empty()) {
      throw Error(ErrorCode::kParse,
                  "field rules line " + std::to_string(line_no) + ": empty field or substring");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<FieldRule> starter_field_rules() {
  return parse_field_rules(embedded_file("field_rules.tsv"));
}

std::set<std::string> assign_fields(std::string_view journal, const std::vector<FieldRule>& rules) {
  std::set<std::string> out;
  const std::string lowered = to_lower_ascii(journal);
  for (const auto& rule : rules) {
    if (lowered.find(to_lower_ascii(rule.journal_substring)) != std::string::npos) {
      out.insert(rule.field_name);
    }
  }
  return out;
}

}  // namespace exvocab
