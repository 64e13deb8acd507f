#include "exvocab/clean.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "exvocab/embedded_data.hpp"
#include "exvocab/error.hpp"
#include "exvocab/io.hpp"

namespace exvocab {

namespace {

RuleAnchor parse_anchor(std::string_view s, const std::string& id) {
  if (s == "ANYWHERE") return RuleAnchor::kAnywhere;
  if (s == "PREFIX") return RuleAnchor::kPrefix;
  if (s == "SUFFIX") return RuleAnchor::kSuffix;
  throw Error(ErrorCode::kParse, "rule " + id + ": unknown anchor '" + std::string(s) + "'");
}

RuleAction parse_action(std::string_view s, const std::string& id) {
  if (s == "STRIP_MATCH") return RuleAction::kStripMatch;
  if (s == "STRIP_TO_END") return RuleAction::kStripToEnd;
  if (s == "STRIP_TO_START") return RuleAction::kStripToStart;
  if (s == "DROP_DOCUMENT") return RuleAction::kDropDocument;
  throw Error(ErrorCode::kParse, "rule " + id + ": unknown action '" + std::string(s) + "'");
}

// A leading "(?i)" selects case-insensitive matching, which ECMAScript syntax
// cannot express inline.
std::regex compile_rule(const CleaningRule& rule) {
  std::string_view pattern = rule.pattern;
  auto flags = std::regex::ECMAScript | std::regex::optimize;
  if (pattern.starts_with("(?i)")) {
    pattern.remove_prefix(4);
    flags |= std::regex::icase;
  }
  std::string source(pattern);
  if (rule.anchor == RuleAnchor::kPrefix) source = "^(?:" + source + ")";
  if (rule.anchor == RuleAnchor::kSuffix) source = "(?:" + source + ")$";
  return std::regex(source, flags);
}

}  // namespace

RuleSet::RuleSet(std::vector<CleaningRule> rules) : rules_(std::move(rules)) {
  std::set<std::string> seen;
  compiled_.reserve(rules_.size());
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& rule = rules_[i];
    if (!seen.insert(rule.id).second) {
      throw Error(ErrorCode::kParse, "rule " + rule.id + ": duplicate id");
    }
    try {
      compiled_.push_back(compile_rule(rule));
    } catch (const std::regex_error&) {
      throw Error(ErrorCode::kInvalidPattern,
                  "rule " + rule.id + ": invalid pattern (rule " + std::to_string(i + 1) + ")");
    }
  }
}

// Passes repeat until the text stops changing: stripping one block can
// expose another (or a second copy of the same trailer).
CleanOutcome RuleSet::clean(std::string_view input) const {
  CleanOutcome out;
  out.text.assign(input);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      std::smatch m;
      if (!std::regex_search(out.text, m, compiled_[i])) continue;
      const auto pos = static_cast<std::size_t>(m.position(0));
      const auto len = static_cast<std::size_t>(m.length(0));
      const std::size_t before = out.text.size();
      switch (rules_[i].action) {
        case RuleAction::kDropDocument:
          out.dropped = true;
          out.applied.push_back(rules_[i].id);
          return out;
        case RuleAction::kStripMatch: out.text.erase(pos, len); break;
        case RuleAction::kStripToEnd: out.text.erase(pos); break;
        case RuleAction::kStripToStart: out.text.erase(0, pos + len); break;
      }
      out.text = std::string(trim(out.text));
      if (out.text.size() == before) continue;
      changed = true;
      if (std::find(out.applied.begin(), out.applied.end(), rules_[i].id) == out.applied.end()) {
        out.applied.push_back(rules_[i].id);
      }
    }
  }
  return out;
}

RuleSet load_rules(std::string_view tsv) {
  std::vector<CleaningRule> rules;
  std::size_t line_no = 0;
  while (!tsv.empty()) {
    std::size_t nl = tsv.find('\n');
    std::string_view line = tsv.substr(0, nl);
    tsv = nl == std::string_view::npos ? std::string_view{} : tsv.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string_view::npos) break;
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (cols.size() != 3) {
      throw Error(ErrorCode::kParse, "rules line " + std::to_string(line_no) +
                                         ": expected id<TAB>anchor<TAB>action<TAB>pattern");
    }
    CleaningRule rule;
    rule.id = std::string(trim(cols[0]));
    rule.anchor = parse_anchor(trim(cols[1]), rule.id);
    rule.action = parse_action(trim(cols[2]), rule.id);
    rule.pattern = std::string(line.substr(start));
    rules.push_back(std::move(rule));
  }
  return RuleSet(std::move(rules));
}

RuleSet starter_rules() { return load_rules(embedded_file("cleaning_rules.tsv")); }

bool is_correction_notice(std::string_view title) {
  static const std::vector<std::regex> patterns = [] {
    std::vector<std::regex> out;
    std::string_view text = embedded_file("correction_patterns.txt");
    while (!text.empty()) {
      std::size_t nl = text.find('\n');
      std::string_view line = trim(text.substr(0, nl));
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      if (line.empty() || line.front() == '#') continue;
      out.emplace_back(std::string(line), std::regex::ECMAScript | std::regex::icase);
    }
    return out;
  }();
  const std::string t(trim(title));
  if (t.empty()) return false;
  for (const auto& re : patterns) {
    if (std::regex_search(t, re)) return true;
  }
  return false;
}

void CleaningReport::record(const CleanOutcome& outcome, bool modified) {
  ++documents_seen;
  if (outcome.dropped) ++documents_dropped;
  else if (modified) ++documents_modified;
  for (const auto& id : outcome.applied) ++per_rule_counts[id];
}

std::string CleaningReport::to_json() const {
  nlohmann::ordered_json j;
  j["documents_seen"] = documents_seen;
  j["documents_modified"] = documents_modified;
  j["documents_dropped"] = documents_dropped;
  j["correction_notices"] = correction_notices;
  j["cleaned_too_short"] = cleaned_too_short;
  nlohmann::ordered_json per_rule = nlohmann::ordered_json::object();
  for (const auto& [id, n] : per_rule_counts) per_rule[id] = n;
  j["per_rule_counts"] = std::move(per_rule);
  return j.dump(2);
}

}  // namespace exvocab
