#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exvocab/count.hpp"
#include "exvocab/markergap.hpp"

namespace exvocab {

// Metadata-only document filter. A JSON predicate object ANDs all of its
// keys:
//   {"country": "China"}                  case-insensitive equality
//   {"journal": "Sensors"}                case-insensitive equality
//   {"journal_in": ["A", "B"]}            pooled journal group
//   {"journal_glob": "*Oncology*"}        case-insensitive, `*` wildcard
//   {"field": "computation"}              membership in Document::fields
//   {"extra": {"key": "k", "value": "v"}} exact match on Document::extra
//   {"all": [ {...}, {...} ]}             explicit conjunction
struct SubgroupPredicate {
  enum class Kind { kAll, kCountry, kJournal, kJournalIn, kJournalGlob, kField, kExtra };
  Kind kind = Kind::kAll;
  std::string key;                   // kExtra only
  std::vector<std::string> values;   // lowercased except for kExtra
  std::vector<SubgroupPredicate> children;  // kAll

  bool matches(const Document& doc) const;
};

struct SubgroupSpec {
  std::string name;
  SubgroupPredicate predicate;
};

// JSON list of {"name": ..., "predicate": {...}}. Names must be unique.
std::vector<SubgroupSpec> parse_subgroup_specs(std::string_view json);

bool glob_match(std::string_view pattern, std::string_view text);  // `*` only, case-insensitive

struct SubgroupEligibility {
  int first_year = 2018;
  int last_year = 2023;
  std::uint64_t min_docs = 300;  // in every year of the window
};

struct SubgroupRow {
  std::string name;
  std::vector<std::uint64_t> n_per_year;  // aligned with the options' years
  bool eligible = false;
  std::string reason;  // why it was excluded
  GapResult rare;
  GapResult common;
  double delta = 0;  // combined estimate
};

// One corpus pass computing rare and common containment for every subgroup.
// Marker sets are the global ones; they are never re-derived per subgroup.
// Rows keep the order of `specs`; ineligible rows carry a reason and no gaps.
std::vector<SubgroupRow> subgroup_gaps(DocumentSource& corpus, const std::vector<SubgroupSpec>& specs,
                                       const MarkerSet& rare, const MarkerSet& common,
                                       int target_year, const SubgroupEligibility& eligibility,
                                       const CountOptions& options);

// subgroup,delta_rare,delta_common,delta,n_<year>...,excluded_reason
std::string subgroup_csv(const std::vector<SubgroupRow>& rows, const std::vector<int>& years);

}  // namespace exvocab
