#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "exvocab/vocabulary.hpp"

namespace exvocab {

// Two-column `from,to` CSV; `#` comments and an optional `word,lemma` style
// header are skipped. Keys are lowercased.
StringMap<std::string> parse_word_map(std::string_view contents);

// Shipped defaults (core/data/lemma_overrides.csv, core/data/spelling_us.csv).
StringMap<std::string> starter_lemma_overrides();
StringMap<std::string> starter_spelling_map();

// Rule-based lemmatizer. One step tries, in order: the British-to-US
// spelling map, the override table, then suffix rules (-ies, -es after
// sibilants, plural -s, -ing/-ed with undoubling and silent-e restoration).
// lemmatize() repeats the step until it reaches a fixed point, so the result
// is always idempotent.
//
// With a lexicon (typically the matrix vocabulary) a suffix candidate is only
// accepted if the lexicon contains it; without one, heuristics decide
// whether to restore a silent e.
class Lemmatizer {
 public:
  Lemmatizer();  // starter tables, no lexicon
  Lemmatizer(StringMap<std::string> overrides, StringMap<std::string> spelling,
             const Vocabulary* lexicon = nullptr);

  std::string lemmatize(std::string_view word) const;
  std::string step(std::string_view word) const;

 private:
  std::string suffix_step(const std::string& word) const;
  bool acceptable(const std::string& candidate) const;
  std::string restore_stem(const std::string& stem) const;

  StringMap<std::string> overrides_;
  StringMap<std::string> spelling_;
  const Vocabulary* lexicon_ = nullptr;
};

}  // namespace exvocab
