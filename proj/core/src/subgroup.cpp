#include "exvocab/subgroup.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "exvocab/error.hpp"
#include "exvocab/io.hpp"
#include "exvocab/sharded.hpp"
#include "exvocab/tokenize.hpp"

namespace exvocab {

using nlohmann::json;

bool glob_match(std::string_view pattern, std::string_view text) {
  auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (p < pattern.size() && lower(pattern[p]) == lower(text[t])) {
      ++p;
      ++t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

bool SubgroupPredicate::matches(const Document& doc) const {
  auto eq = [](const std::optional<std::string>& field, const std::string& lowered) {
    return field && to_lower_ascii(*field) == lowered;
  };
  switch (kind) {
    case Kind::kAll:
      return std::all_of(children.begin(), children.end(),
                         [&](const SubgroupPredicate& c) { return c.matches(doc); });
    case Kind::kCountry: return eq(doc.country, values.front());
    case Kind::kJournal: return eq(doc.journal, values.front());
    case Kind::kJournalIn:
      return std::any_of(values.begin(), values.end(),
                         [&](const std::string& v) { return eq(doc.journal, v); });
    case Kind::kJournalGlob: return doc.journal && glob_match(values.front(), *doc.journal);
    case Kind::kField:
      return std::any_of(doc.fields.begin(), doc.fields.end(),
                         [&](const std::string& f) { return to_lower_ascii(f) == values.front(); });
    case Kind::kExtra: {
      auto it = doc.extra.find(key);
      return it != doc.extra.end() && it->second == values.front();
    }
  }
  return false;
}

namespace {

std::string need_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw Error(ErrorCode::kParse, "subgroup spec: " + where + " must be a string");
  return j.get<std::string>();
}

SubgroupPredicate parse_predicate(const json& j, const std::string& where) {
  if (!j.is_object() || j.empty()) {
    throw Error(ErrorCode::kParse, "subgroup spec: " + where + " must be a non-empty object");
  }
  SubgroupPredicate all;
  all.kind = SubgroupPredicate::Kind::kAll;
  for (const auto& [k, v] : j.items()) {
    SubgroupPredicate p;
    const std::string at = where + "." + k;
    if (k == "country" || k == "journal" || k == "journal_glob" || k == "field") {
      p.kind = k == "country"   ? SubgroupPredicate::Kind::kCountry
               : k == "journal" ? SubgroupPredicate::Kind::kJournal
               : k == "field"   ? SubgroupPredicate::Kind::kField
                                : SubgroupPredicate::Kind::kJournalGlob;
      p.values.push_back(to_lower_ascii(need_string(v, at)));
    } else if (k == "journal_in") {
      if (!v.is_array() || v.empty()) {
        throw Error(ErrorCode::kParse, "subgroup spec: " + at + " must be a non-empty array");
      }
      p.kind = SubgroupPredicate::Kind::kJournalIn;
      for (const auto& e : v) p.values.push_back(to_lower_ascii(need_string(e, at)));
    } else if (k == "extra") {
      if (!v.is_object() || !v.contains("key") || !v.contains("value")) {
        throw Error(ErrorCode::kParse, "subgroup spec: " + at + " needs 'key' and 'value'");
      }
      p.kind = SubgroupPredicate::Kind::kExtra;
      p.key = need_string(v["key"], at + ".key");
      p.values.push_back(need_string(v["value"], at + ".value"));
    } else if (k == "all") {
      if (!v.is_array() || v.empty()) {
        throw Error(ErrorCode::kParse, "subgroup spec: " + at + " must be a non-empty array");
      }
      p.kind = SubgroupPredicate::Kind::kAll;
      for (std::size_t i = 0; i < v.size(); ++i) {
        p.children.push_back(parse_predicate(v[i], at + "[" + std::to_string(i) + "]"));
      }
    } else {
      throw Error(ErrorCode::kParse, "subgroup spec: unknown predicate key '" + k + "' in " + where);
    }
    all.children.push_back(std::move(p));
  }
  if (all.children.size() == 1) return std::move(all.children.front());
  return all;
}

}  // namespace

std::vector<SubgroupSpec> parse_subgroup_specs(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("subgroup spec: invalid JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::kParse, "subgroup spec: top level must be a list");
  std::vector<SubgroupSpec> specs;
  std::set<std::string> names;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string where = "entry " + std::to_string(i);
    if (!e.is_object() || !e.contains("name") || !e.contains("predicate")) {
      throw Error(ErrorCode::kParse, "subgroup spec: " + where + " needs 'name' and 'predicate'");
    }
    SubgroupSpec spec;
    spec.name = need_string(e["name"], where + ".name");
    if (!names.insert(spec.name).second) {
      throw Error(ErrorCode::kParse, "subgroup spec: duplicate name '" + spec.name + "'");
    }
    spec.predicate = parse_predicate(e["predicate"], spec.name);
    specs.push_back(std::move(spec));
  }
  return specs;
}

namespace {

struct GroupCounts {
  std::vector<std::uint64_t> rare, common, totals;
};

struct SubgroupState {
  std::vector<GroupCounts> groups;
  std::string scratch;
};

}  // namespace

std::vector<SubgroupRow> subgroup_gaps(DocumentSource& corpus, const std::vector<SubgroupSpec>& specs,
                                       const MarkerSet& rare, const MarkerSet& common,
                                       int target_year, const SubgroupEligibility& eligibility,
                                       const CountOptions& options) {
  rare.validate();
  common.validate();
  combined_estimate(rare, common, 0.0, 0.0);  // rejects overlapping sets up front
  const std::vector<int>& years = options.years;
  auto year_slot = [&](int year) -> std::optional<std::size_t> {
    auto it = std::find(years.begin(), years.end(), year);
    if (it == years.end()) return std::nullopt;
    return static_cast<std::size_t>(it - years.begin());
  };
  for (int y : {target_year, target_year - 2, target_year - 3}) {
    if (!year_slot(y)) {
      throw Error(ErrorCode::kMissingYear, "subgroups: year " + std::to_string(y) + " not in range");
    }
  }
  for (int y = eligibility.first_year; y <= eligibility.last_year; ++y) {
    if (!year_slot(y)) {
      throw Error(ErrorCode::kMissingYear,
                  "subgroups: eligibility year " + std::to_string(y) + " not in range");
    }
  }
  StringMap<std::uint8_t> markers;  // bit 0 rare, bit 1 common
  for (const auto& w : rare.words) markers[w] |= 1;
  for (const auto& w : common.words) markers[w] |= 2;

  const std::size_t n_years = years.size();
  auto states = run_sharded<SubgroupState>(
      corpus, ShardOptions{options.workers, options.batch_size},
      [&] {
        SubgroupState s;
        s.groups.assign(specs.size(), GroupCounts{std::vector<std::uint64_t>(n_years, 0),
                                                  std::vector<std::uint64_t>(n_years, 0),
                                                  std::vector<std::uint64_t>(n_years, 0)});
        return s;
      },
      [&](SubgroupState& s, const Document& doc) {
        auto y = year_slot(doc.year);
        if (!y) {
          if (options.strict) {
            throw Error(ErrorCode::kYearOutOfRange, "document " + doc.id + ": year " +
                                                        std::to_string(doc.year) + " outside range");
          }
          return;
        }
        bool scanned = false;
        std::uint8_t bits = 0;
        for (std::size_t g = 0; g < specs.size(); ++g) {
          if (!specs[g].predicate.matches(doc)) continue;
          if (!scanned) {
            for_each_token(doc.text, s.scratch, [&](std::string_view token) {
              if (bits == 3) return;
              auto it = markers.find(token);
              if (it != markers.end()) bits |= it->second;
            });
            scanned = true;
          }
          auto& c = s.groups[g];
          ++c.totals[*y];
          if (bits & 1) ++c.rare[*y];
          if (bits & 2) ++c.common[*y];
        }
      });
  for (std::size_t i = 1; i < states.size(); ++i) {
    for (std::size_t g = 0; g < specs.size(); ++g) {
      for (std::size_t y = 0; y < n_years; ++y) {
        states[0].groups[g].rare[y] += states[i].groups[g].rare[y];
        states[0].groups[g].common[y] += states[i].groups[g].common[y];
        states[0].groups[g].totals[y] += states[i].groups[g].totals[y];
      }
    }
  }

  std::vector<SubgroupRow> rows;
  for (std::size_t g = 0; g < specs.size(); ++g) {
    const auto& c = states[0].groups[g];
    SubgroupRow row;
    row.name = specs[g].name;
    row.n_per_year = c.totals;
    row.eligible = true;
    for (int y = eligibility.first_year; y <= eligibility.last_year; ++y) {
      const std::uint64_t n = c.totals[*year_slot(y)];
      if (n < eligibility.min_docs) {
        row.eligible = false;
        row.reason = std::to_string(n) + " papers in " + std::to_string(y) + " (minimum " +
                     std::to_string(eligibility.min_docs) + ")";
        break;
      }
    }
    if (row.eligible) {
      row.rare = gap(ContainmentCounts{years, c.rare, c.totals}, target_year);
      row.common = gap(ContainmentCounts{years, c.common, c.totals}, target_year);
      row.delta = combined_estimate(row.rare.Delta, row.common.Delta);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string subgroup_csv(const std::vector<SubgroupRow>& rows, const std::vector<int>& years) {
  std::string out = "subgroup,delta_rare,delta_common,delta";
  for (int y : years) out += ",n_" + std::to_string(y);
  out += ",excluded_reason\n";
  for (const auto& r : rows) {
    out += csv_escape(r.name);
    if (r.eligible) {
      out += ',' + format_double(r.rare.Delta) + ',' + format_double(r.common.Delta) + ',' +
             format_double(r.delta);
    } else {
      out += ",,,";
    }
    for (std::uint64_t n : r.n_per_year) out += ',' + std::to_string(n);
    out += ',' + csv_escape(r.reason) + '\n';
  }
  return out;
}

}  // namespace exvocab
