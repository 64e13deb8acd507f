#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exvocab/lemma.hpp"
#include "exvocab/matrix.hpp"
#include "exvocab/vocabulary.hpp"

namespace exvocab {

// (a+1)/(b+1). Throws Error(kInvalidArgument) when a > b.
double smoothed_frequency(std::uint64_t a, std::uint64_t b);

// Linear extrapolation two years ahead from the frequencies three and two
// years before the target, never below p_minus2 and capped at 1.
double counterfactual(double p_minus3, double p_minus2);

struct ExcessThresholds {
  double delta_min = 0.01;
  // Ratio line in log10(r) vs log10(p): log10 r_min(p) = intercept + slope * log10 p.
  // Defaults give r_min = 2 at p = 1e-4 and r_min = 1 at p = 1.
  double ratio_line_slope = -0.075257498915995;  // -(log10 2) / 4
  double ratio_line_intercept = 0.0;
  double eligibility_min_freq = 1e-4;  // required in Y and Y-1
  bool letters_only = true;            // analysis-time filter: >= 4 letters a-z
  bool smoothing = true;               // false: raw a/b, for exact scaling tests

  void validate() const;
};

double ratio_threshold(double p, const ExcessThresholds& t);

enum class ExcessVia { kGap, kRatio, kBoth, kNone };
std::string_view excess_via_name(ExcessVia via);

struct WordYearStats {
  std::string word;
  int year = 0;
  double p = 0;        // target year
  double q = 0;        // counterfactual
  double delta = 0;    // p - q
  double ratio = 0;    // p / q
  double p_prev = 0;   // Y-1
  double p_minus2 = 0;
  double p_minus3 = 0;
  bool eligible = false;
  bool excess = false;
  ExcessVia excess_via = ExcessVia::kNone;
};

// Classification by gap and ratio line alone; eligibility is the caller's
// concern.
ExcessVia classify_excess(double p, double delta, double ratio, const ExcessThresholds& t);
bool is_excess(const WordYearStats& stats, const ExcessThresholds& t, ExcessVia* via = nullptr);

// Throws Error(kWordUnknown) / Error(kMissingYear) when the word or any of
// the years Y-3..Y is absent.
WordYearStats word_year_stats(const OccurrenceMatrix& m, std::string_view word, int target_year,
                              const ExcessThresholds& t = {});
WordYearStats word_year_stats(const OccurrenceMatrix& m, std::size_t word_index, int target_year,
                              const ExcessThresholds& t = {});

enum class WordLabel { kContent, kStyle, kAmbiguous };
enum class PartOfSpeech { kNoun, kVerb, kAdjective, kAdverb, kOther };
std::string_view word_label_name(WordLabel label);
std::string_view part_of_speech_name(PartOfSpeech pos);

struct Annotation {
  WordLabel label = WordLabel::kAmbiguous;
  PartOfSpeech pos = PartOfSpeech::kOther;
};

// CSV `word,label,pos`. Columns are located by header name when a header is
// present (word / label|type|class|annotation / pos|part_of_speech), else
// taken positionally. Labels accept content|c, style|s, ambiguous|a|empty.
class AnnotationTable {
 public:
  AnnotationTable() = default;
  static AnnotationTable parse(std::string_view csv);
  static AnnotationTable load(const std::filesystem::path& path);

  const Annotation* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  void set(std::string word, Annotation a) { entries_.insert_or_assign(std::move(word), a); }

 private:
  StringMap<Annotation> entries_;
};

struct ExcessRow {
  WordYearStats stats;
  std::optional<Annotation> annotation;
  std::string lemma;  // empty unless a lemmatizer was supplied
};

struct LabelCounts {
  std::size_t total = 0;
  std::size_t content = 0;
  std::size_t style = 0;
  std::size_t ambiguous = 0;
  std::size_t unannotated = 0;
};

struct ExcessCensus {
  int year = 0;
  std::vector<ExcessRow> rows;  // every eligible word, ratio descending, then word

  std::size_t eligible_count() const { return rows.size(); }
  std::vector<WordYearStats> excess() const;
  LabelCounts excess_label_counts() const;
};

// Classifies every eligible word of the matrix for the target year. Result
// does not depend on matrix row order.
ExcessCensus excess_words(const OccurrenceMatrix& m, int target_year,
                          const ExcessThresholds& t = {},
                          const AnnotationTable* annotations = nullptr,
                          const Lemmatizer* lemmatizer = nullptr);

std::size_t unique_lemma_count(const std::vector<std::string>& words, const Lemmatizer& lemmatizer);
// Distinct lemmas among the excess rows, overall and per label.
LabelCounts unique_lemma_counts(const ExcessCensus& census, const Lemmatizer& lemmatizer);

// Qualifying word (p > p_min, ratio > r_min) with the highest ratio; ties go
// to the lexicographically smaller word.
std::optional<std::string> representative_word(const std::vector<WordYearStats>& stats,
                                               double p_min = 0.0015, double r_min = 3.0);

// Header: word,year,p,q,delta,ratio,excess,excess_via,label,pos,lemma
std::string stats_csv(const ExcessCensus& census, bool excess_only = false);

}  // namespace exvocab
