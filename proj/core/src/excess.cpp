#include "exvocab/excess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "exvocab/error.hpp"
#include "exvocab/io.hpp"
#include "exvocab/tokenize.hpp"

namespace exvocab {

double smoothed_frequency(std::uint64_t a, std::uint64_t b) {
  if (a > b) {
    throw Error(ErrorCode::kInvalidArgument, "smoothed_frequency: count " + std::to_string(a) +
                                                 " exceeds total " + std::to_string(b));
  }
  return (static_cast<double>(a) + 1.0) / (static_cast<double>(b) + 1.0);
}

double counterfactual(double p_minus3, double p_minus2) {
  const double q = p_minus2 + 2.0 * std::max(p_minus2 - p_minus3, 0.0);
  return std::min(q, 1.0);
}

void ExcessThresholds::validate() const {
  if (!(delta_min > 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta_min must be > 0");
  if (!(eligibility_min_freq > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eligibility_min_freq must be > 0");
  }
  if (!std::isfinite(ratio_line_slope) || !std::isfinite(ratio_line_intercept)) {
    throw Error(ErrorCode::kInvalidArgument, "ratio line parameters must be finite");
  }
}

double ratio_threshold(double p, const ExcessThresholds& t) {
  return std::pow(10.0, t.ratio_line_intercept + t.ratio_line_slope * std::log10(p));
}

std::string_view excess_via_name(ExcessVia via) {
  switch (via) {
    case ExcessVia::kGap: return "GAP";
    case ExcessVia::kRatio: return "RATIO";
    case ExcessVia::kBoth: return "BOTH";
    case ExcessVia::kNone: return "NONE";
  }
  return "NONE";
}

ExcessVia classify_excess(double p, double delta, double ratio, const ExcessThresholds& t) {
  const bool by_gap = delta > t.delta_min;
  const bool by_ratio =
      ratio > 0.0 && std::log10(ratio) > t.ratio_line_intercept + t.ratio_line_slope * std::log10(p);
  if (by_gap && by_ratio) return ExcessVia::kBoth;
  if (by_gap) return ExcessVia::kGap;
  if (by_ratio) return ExcessVia::kRatio;
  return ExcessVia::kNone;
}

bool is_excess(const WordYearStats& s, const ExcessThresholds& t, ExcessVia* via) {
  const ExcessVia v = classify_excess(s.p, s.delta, s.ratio, t);
  if (via != nullptr) *via = v;
  return v != ExcessVia::kNone;
}

namespace {

struct YearSlots {
  std::size_t y, y1, y2, y3;
};

YearSlots find_slots(const OccurrenceMatrix& m, int target_year) {
  auto need = [&](int year) {
    auto i = m.year_index(year);
    if (!i) {
      throw Error(ErrorCode::kMissingYear, "matrix has no column for year " + std::to_string(year) +
                                               " (needed for target year " +
                                               std::to_string(target_year) + ")");
    }
    return *i;
  };
  return {need(target_year), need(target_year - 1), need(target_year - 2), need(target_year - 3)};
}

double frequency(const OccurrenceMatrix& m, std::size_t w, std::size_t y, bool smoothing) {
  if (smoothing) return smoothed_frequency(m.count(w, y), m.total(y));
  if (m.total(y) == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "unsmoothed frequency undefined: no documents in " + std::to_string(m.years()[y]));
  }
  return static_cast<double>(m.count(w, y)) / static_cast<double>(m.total(y));
}

WordYearStats stats_at(const OccurrenceMatrix& m, std::size_t w, int target_year,
                       const YearSlots& slots, const ExcessThresholds& t) {
  WordYearStats s;
  s.word = m.words()[w];
  s.year = target_year;
  s.p = frequency(m, w, slots.y, t.smoothing);
  s.p_prev = frequency(m, w, slots.y1, t.smoothing);
  s.p_minus2 = frequency(m, w, slots.y2, t.smoothing);
  s.p_minus3 = frequency(m, w, slots.y3, t.smoothing);
  s.q = counterfactual(s.p_minus3, s.p_minus2);
  s.delta = s.p - s.q;
  s.ratio = s.p / s.q;
  s.eligible = s.p > t.eligibility_min_freq && s.p_prev > t.eligibility_min_freq &&
               (!t.letters_only || is_eligible_word(s.word));
  if (s.eligible) {
    s.excess = is_excess(s, t, &s.excess_via);
  }
  return s;
}

}  // namespace

WordYearStats word_year_stats(const OccurrenceMatrix& m, std::string_view word, int target_year,
                              const ExcessThresholds& t) {
  auto w = m.word_index(word);
  if (!w) throw Error(ErrorCode::kWordUnknown, "word '" + std::string(word) + "' not in matrix");
  return word_year_stats(m, *w, target_year, t);
}

WordYearStats word_year_stats(const OccurrenceMatrix& m, std::size_t word_index, int target_year,
                              const ExcessThresholds& t) {
  if (word_index >= m.word_count()) {
    throw Error(ErrorCode::kWordUnknown, "word index " + std::to_string(word_index) + " out of range");
  }
  return stats_at(m, word_index, target_year, find_slots(m, target_year), t);
}

// ---------------------------------------------------------------------------

std::string_view word_label_name(WordLabel label) {
  switch (label) {
    case WordLabel::kContent: return "content";
    case WordLabel::kStyle: return "style";
    case WordLabel::kAmbiguous: return "ambiguous";
  }
  return "ambiguous";
}

std::string_view part_of_speech_name(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::kNoun: return "noun";
    case PartOfSpeech::kVerb: return "verb";
    case PartOfSpeech::kAdjective: return "adjective";
    case PartOfSpeech::kAdverb: return "adverb";
    case PartOfSpeech::kOther: return "other";
  }
  return "other";
}

namespace {

std::optional<WordLabel> parse_label(std::string_view s) {
  const std::string v = to_lower_ascii(trim(s));
  if (v == "content" || v == "c") return WordLabel::kContent;
  if (v == "style" || v == "s") return WordLabel::kStyle;
  if (v.empty() || v == "ambiguous" || v == "a") return WordLabel::kAmbiguous;
  return std::nullopt;
}

std::optional<PartOfSpeech> parse_pos(std::string_view s) {
  const std::string v = to_lower_ascii(trim(s));
  if (v == "noun" || v == "n") return PartOfSpeech::kNoun;
  if (v == "verb" || v == "v") return PartOfSpeech::kVerb;
  if (v == "adjective" || v == "adj") return PartOfSpeech::kAdjective;
  if (v == "adverb" || v == "adv") return PartOfSpeech::kAdverb;
  if (v.empty() || v == "other") return PartOfSpeech::kOther;
  return std::nullopt;
}

}  // namespace

AnnotationTable AnnotationTable::parse(std::string_view csv) {
  AnnotationTable table;
  std::size_t word_col = 0, label_col = 1;
  std::optional<std::size_t> pos_col = 2;
  std::size_t line_no = 0;
  bool first = true;
  while (!csv.empty()) {
    std::size_t nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (first) {
      first = false;
      std::optional<std::size_t> w, l, p;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string h = to_lower_ascii(trim(cells[i]));
        if (h == "word") w = i;
        else if (h == "label" || h == "type" || h == "class" || h == "annotation") l = i;
        else if (h == "pos" || h == "part_of_speech" || h == "part of speech") p = i;
      }
      if (w) {
        if (!l) throw Error(ErrorCode::kParse, "annotations: header has no label column");
        word_col = *w;
        label_col = *l;
        pos_col = p;
        continue;
      }
    }
    auto cell = [&](std::optional<std::size_t> i) -> std::string_view {
      return i && *i < cells.size() ? std::string_view(cells[*i]) : std::string_view{};
    };
    const std::string word = to_lower_ascii(trim(cell(word_col)));
    if (word.empty()) {
      throw Error(ErrorCode::kParse, "annotations line " + std::to_string(line_no) + ": empty word");
    }
    auto label = parse_label(cell(label_col));
    if (!label) {
      throw Error(ErrorCode::kParse, "annotations line " + std::to_string(line_no) +
                                         ": unknown label '" + std::string(cell(label_col)) + "'");
    }
    auto pos = parse_pos(cell(pos_col));
    if (!pos) {
      throw Error(ErrorCode::kParse, "annotations line " + std::to_string(line_no) +
                                         ": unknown part of speech '" +
                                         std::string(cell(pos_col)) + "'");
    }
    table.entries_.insert_or_assign(word, Annotation{*label, *pos});
  }
  return table;
}

AnnotationTable AnnotationTable::load(const std::filesystem::path& path) {
  return parse(gunzip_if_needed(read_file(path)));
}

const Annotation* AnnotationTable::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

std::vector<WordYearStats> ExcessCensus::excess() const {
  std::vector<WordYearStats> out;
  for (const auto& r : rows) {
    if (r.stats.excess) out.push_back(r.stats);
  }
  return out;
}

LabelCounts ExcessCensus::excess_label_counts() const {
  LabelCounts c;
  for (const auto& r : rows) {
    if (!r.stats.excess) continue;
    ++c.total;
    if (!r.annotation) {
      ++c.unannotated;
      continue;
    }
    switch (r.annotation->label) {
      case WordLabel::kContent: ++c.content; break;
      case WordLabel::kStyle: ++c.style; break;
      case WordLabel::kAmbiguous: ++c.ambiguous; break;
    }
  }
  return c;
}

ExcessCensus excess_words(const OccurrenceMatrix& m, int target_year, const ExcessThresholds& t,
                          const AnnotationTable* annotations, const Lemmatizer* lemmatizer) {
  t.validate();
  const YearSlots slots = find_slots(m, target_year);
  ExcessCensus census;
  census.year = target_year;
  for (std::size_t w = 0; w < m.word_count(); ++w) {
    if (t.letters_only && !is_eligible_word(m.words()[w])) continue;
    WordYearStats s = stats_at(m, w, target_year, slots, t);
    if (!s.eligible) continue;
    ExcessRow row;
    row.stats = std::move(s);
    if (annotations != nullptr) {
      if (const Annotation* a = annotations->find(row.stats.word)) row.annotation = *a;
    }
    if (lemmatizer != nullptr) row.lemma = lemmatizer->lemmatize(row.stats.word);
    census.rows.push_back(std::move(row));
  }
  std::sort(census.rows.begin(), census.rows.end(), [](const ExcessRow& a, const ExcessRow& b) {
    if (a.stats.ratio != b.stats.ratio) return a.stats.ratio > b.stats.ratio;
    return a.stats.word < b.stats.word;
  });
  return census;
}

std::size_t unique_lemma_count(const std::vector<std::string>& words, const Lemmatizer& lemmatizer) {
  std::set<std::string> lemmas;
  for (const auto& w : words) lemmas.insert(lemmatizer.lemmatize(w));
  return lemmas.size();
}

LabelCounts unique_lemma_counts(const ExcessCensus& census, const Lemmatizer& lemmatizer) {
  std::set<std::string> all, content, style, ambiguous, unannotated;
  for (const auto& r : census.rows) {
    if (!r.stats.excess) continue;
    std::string lemma = r.lemma.empty() ? lemmatizer.lemmatize(r.stats.word) : r.lemma;
    all.insert(lemma);
    if (!r.annotation) {
      unannotated.insert(lemma);
      continue;
    }
    switch (r.annotation->label) {
      case WordLabel::kContent: content.insert(lemma); break;
      case WordLabel::kStyle: style.insert(lemma); break;
      case WordLabel::kAmbiguous: ambiguous.insert(lemma); break;
    }
  }
  return {all.size(), content.size(), style.size(), ambiguous.size(), unannotated.size()};
}

std::optional<std::string> representative_word(const std::vector<WordYearStats>& stats,
                                               double p_min, double r_min) {
  const WordYearStats* best = nullptr;
  for (const auto& s : stats) {
    if (!(s.p > p_min && s.ratio > r_min)) continue;
    if (best == nullptr || s.ratio > best->ratio ||
        (s.ratio == best->ratio && s.word < best->word)) {
      best = &s;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->word;
}

std::string stats_csv(const ExcessCensus& census, bool excess_only) {
  std::string out = "word,year,p,q,delta,ratio,excess,excess_via,label,pos,lemma\n";
  for (const auto& r : census.rows) {
    const auto& s = r.stats;
    if (excess_only && !s.excess) continue;
    out += csv_escape(s.word);
    out += ',' + std::to_string(s.year);
    out += ',' + format_double(s.p);
    out += ',' + format_double(s.q);
    out += ',' + format_double(s.delta);
    out += ',' + format_double(s.ratio);
    out += s.excess ? ",1," : ",0,";
    out += excess_via_name(s.excess_via);
    out += ',';
    if (r.annotation) out += word_label_name(r.annotation->label);
    out += ',';
    if (r.annotation) out += part_of_speech_name(r.annotation->pos);
    out += ',';
    out += csv_escape(r.lemma);
    out += '\n';
  }
  return out;
}

}  // namespace exvocab
