#include "exvocab/lemma.hpp"

#include <algorithm>
#include <set>

#include "exvocab/embedded_data.hpp"
#include "exvocab/error.hpp"
#include "exvocab/io.hpp"

namespace exvocab {

StringMap<std::string> parse_word_map(std::string_view contents) {
  StringMap<std::string> out;
  std::size_t line_no = 0;
  while (!contents.empty()) {
    std::size_t nl = contents.find('\n');
    std::string_view line = trim(contents.substr(0, nl));
    contents = nl == std::string_view::npos ? std::string_view{} : contents.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 2) {
      throw Error(ErrorCode::kParse,
                  "word map line " + std::to_string(line_no) + ": expected two columns");
    }
    std::string from = to_lower_ascii(trim(cells[0]));
    std::string to = to_lower_ascii(trim(cells[1]));
    if (line_no == 1 && from == "word") continue;  // header
    if (from.empty() || to.empty()) {
      throw Error(ErrorCode::kParse, "word map line " + std::to_string(line_no) + ": empty cell");
    }
    out.insert_or_assign(std::move(from), std::move(to));
  }
  return out;
}

StringMap<std::string> starter_lemma_overrides() {
  return parse_word_map(embedded_file("lemma_overrides.csv"));
}

StringMap<std::string> starter_spelling_map() {
  return parse_word_map(embedded_file("spelling_us.csv"));
}

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Porter-style: y counts as a vowel after a consonant.
bool vowel_at(std::string_view w, std::size_t i) {
  if (is_vowel(w[i])) return true;
  return w[i] == 'y' && i > 0 && !is_vowel(w[i - 1]);
}

bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (vowel_at(w, i)) return true;
  }
  return false;
}

bool ends_with(std::string_view w, std::string_view s) { return w.ends_with(s); }

// Number of vowel-consonant sequences.
int measure(std::string_view w) {
  int m = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (vowel_at(w, i - 1) && !vowel_at(w, i)) ++m;
  }
  return m;
}

bool consonant_at(std::string_view w, std::size_t i) { return !vowel_at(w, i); }

// Heuristic for stems that lost a silent e before -ing/-ed.
bool needs_e(std::string_view s) {
  const std::size_t n = s.size();
  if (n <= 2) return true;
  const char last = s[n - 1];
  const char prev = s[n - 2];
  const bool prev2_consonant = n >= 3 && consonant_at(s, n - 3);
  if (last == 'v' || last == 'c') return true;
  if (last == 'z' && prev != 'z') return true;
  if (ends_with(s, "dg") || ends_with(s, "rg") || ends_with(s, "ang") || ends_with(s, "eng")) {
    return true;
  }
  if (last == 's' && prev != 's') {
    if (prev == 'a' || prev == 'i' || prev == 'o') return true;
    if (prev == 'u' && n >= 3 && vowel_at(s, n - 3)) return true;
  }
  if (ends_with(s, "at") && n >= 3 && s[n - 3] != 'e' && s[n - 3] != 'o' && s[n - 3] != 'a') {
    return true;
  }
  if (prev2_consonant && (ends_with(s, "ut") || ends_with(s, "ur") || ends_with(s, "ir") ||
                          ends_with(s, "id") || ends_with(s, "ud") || ends_with(s, "in") ||
                          ends_with(s, "ag"))) {
    return true;
  }
  if (last == 'k' && is_vowel(prev) && prev2_consonant) return true;
  if (last == 'l' && consonant_at(s, n - 2) && prev != 'l' && prev != 'r' && prev != 'w') {
    return true;
  }
  // Porter *o with m == 1: consonant-vowel-consonant, final not w, x, y.
  if (measure(s) == 1 && consonant_at(s, n - 1) && vowel_at(s, n - 2) && consonant_at(s, n - 3) &&
      last != 'w' && last != 'x' && last != 'y') {
    return true;
  }
  return false;
}

bool shape_ok(std::string_view c) { return c.size() >= 3 && has_vowel(c); }

}  // namespace

Lemmatizer::Lemmatizer() : Lemmatizer(starter_lemma_overrides(), starter_spelling_map()) {}

Lemmatizer::Lemmatizer(StringMap<std::string> overrides, StringMap<std::string> spelling,
                       const Vocabulary* lexicon)
    : overrides_(std::move(overrides)), spelling_(std::move(spelling)), lexicon_(lexicon) {}

bool Lemmatizer::acceptable(const std::string& candidate) const {
  if (!shape_ok(candidate)) return false;
  return lexicon_ == nullptr || lexicon_->contains(candidate);
}

std::string Lemmatizer::restore_stem(const std::string& stem) const {
  // Ordered candidates; the first acceptable one wins.
  std::vector<std::string> candidates;
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !vowel_at(stem, n - 1)) {
    const std::string undoubled = stem.substr(0, n - 1);
    if (std::string_view("bdgmnprt").find(stem[n - 1]) != std::string_view::npos) {
      candidates = {undoubled, stem};
    } else {
      candidates = {stem, undoubled};
    }
  } else if (needs_e(stem)) {
    candidates = {stem + "e", stem};
  } else {
    candidates = {stem, stem + "e"};
  }
  for (const auto& c : candidates) {
    if (acceptable(c)) return c;
  }
  return {};
}

std::string Lemmatizer::suffix_step(const std::string& w) const {
  const std::size_t n = w.size();
  auto first_acceptable = [&](std::initializer_list<std::string> candidates) -> std::string {
    for (const auto& c : candidates) {
      if (acceptable(c)) return c;
    }
    return {};
  };
  auto drop = [&](std::size_t k) { return w.substr(0, n - k); };

  std::string out;
  if (n >= 4 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is")) {
    if (ends_with(w, "ies") && n >= 5) {
      out = first_acceptable({drop(3) + "y", drop(1)});
    } else if (ends_with(w, "sses") || ends_with(w, "ches") || ends_with(w, "shes") ||
               ends_with(w, "xes") || ends_with(w, "zzes")) {
      out = first_acceptable({drop(2), drop(1)});
    } else if (ends_with(w, "ses") && lexicon_ != nullptr) {
      out = first_acceptable({drop(1), drop(2)});
    } else {
      out = first_acceptable({drop(1)});
    }
  } else if (n >= 5 && ends_with(w, "ing")) {
    const std::string stem = drop(3);
    if (has_vowel(stem)) out = restore_stem(stem);
  } else if (n >= 5 && ends_with(w, "ied")) {
    out = first_acceptable({drop(3) + "y", drop(1)});
  } else if (n >= 5 && ends_with(w, "eed")) {
    // exceed, proceed, need: base forms far outnumber agreed/freed, so
    // only a lexicon can justify stripping here.
    if (lexicon_ != nullptr) out = first_acceptable({drop(1)});
  } else if (n >= 5 && ends_with(w, "ed")) {
    const std::string stem = drop(2);
    if (has_vowel(stem)) out = restore_stem(stem);
  }
  return out.empty() ? w : out;
}

std::string Lemmatizer::step(std::string_view word) const {
  if (auto it = spelling_.find(word); it != spelling_.end()) return it->second;
  if (auto it = overrides_.find(word); it != overrides_.end()) return it->second;
  return suffix_step(std::string(word));
}

std::string Lemmatizer::lemmatize(std::string_view word) const {
  std::string current(word);
  std::vector<std::string> seen{current};
  for (int i = 0; i < 64; ++i) {
    std::string next = step(current);
    if (next == current) return current;
    auto cycle = std::find(seen.begin(), seen.end(), next);
    if (cycle != seen.end()) {
      // A cycle in the tables. Its smallest member is a stable choice reached
      // from every entry point.
      return *std::min_element(cycle, seen.end());
    }
    seen.push_back(next);
    current = std::move(next);
  }
  throw Error(ErrorCode::kInvalidArgument, "lemmatizer did not converge on '" + std::string(word) + "'");
}

}  // namespace exvocab
