#include "exvocab/count.hpp"

#include <algorithm>

#include "exvocab/error.hpp"
#include "exvocab/sharded.hpp"
#include "exvocab/tokenize.hpp"

namespace exvocab {

namespace {

std::optional<std::size_t> find_year(const std::vector<int>& years, int year) {
  auto it = std::lower_bound(years.begin(), years.end(), year);
  if (it == years.end() || *it != year) return std::nullopt;
  return static_cast<std::size_t>(it - years.begin());
}

void check_options(const CountOptions& options) {
  if (options.years.empty()) throw Error(ErrorCode::kInvalidArgument, "count: no years given");
  for (std::size_t i = 1; i < options.years.size(); ++i) {
    if (options.years[i] <= options.years[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "count: years must be strictly increasing");
    }
  }
}

[[noreturn]] void throw_out_of_range(const Document& doc) {
  throw Error(ErrorCode::kYearOutOfRange,
              "document " + doc.id + ": year " + std::to_string(doc.year) + " outside matrix range");
}

}  // namespace

OccurrenceCounter::OccurrenceCounter(const Vocabulary& vocab, std::vector<int> years, bool strict)
    : vocab_(&vocab),
      matrix_(std::move(years), vocab.words()),
      stamp_(vocab.size(), 0),
      strict_(strict) {}

void OccurrenceCounter::add(const Document& doc) {
  ++tally_.documents;
  auto yi = find_year(matrix_.years(), doc.year);
  if (!yi) {
    if (strict_) throw_out_of_range(doc);
    ++tally_.out_of_range;
    return;
  }
  const std::uint64_t serial = ++serial_;
  const std::size_t y = *yi;
  ++matrix_.mutable_total(y);
  for_each_token(doc.text, scratch_, [&](std::string_view token) {
    auto w = vocab_->index(token);
    if (!w || stamp_[*w] == serial) return;
    stamp_[*w] = serial;
    ++matrix_.mutable_row(*w)[y];
  });
}

OccurrenceMatrix count_occurrences(DocumentSource& corpus, const Vocabulary& vocab,
                                   const CountOptions& options, CountTally* tally) {
  check_options(options);
  auto states = run_sharded<OccurrenceCounter>(
      corpus, ShardOptions{options.workers, options.batch_size},
      [&] { return OccurrenceCounter(vocab, options.years, options.strict); },
      [](OccurrenceCounter& c, const Document& doc) { c.add(doc); });
  OccurrenceMatrix result = states[0].take();
  CountTally total = states[0].tally();
  for (std::size_t i = 1; i < states.size(); ++i) {
    result = merge(result, states[i].matrix());
    total.documents += states[i].tally().documents;
    total.out_of_range += states[i].tally().out_of_range;
  }
  if (tally != nullptr) *tally = total;
  return result;
}

OccurrenceMatrix count_occurrences(std::span<const Document> corpus, const Vocabulary& vocab,
                                   const CountOptions& options, CountTally* tally) {
  SpanSource source(corpus);
  return count_occurrences(source, vocab, options, tally);
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> ContainmentCounts::year_index(int year) const {
  return find_year(years, year);
}

void ContainmentCounts::merge(const ContainmentCounts& other) {
  if (years != other.years) throw Error(ErrorCode::kShapeMismatch, "containment: years differ");
  for (std::size_t i = 0; i < years.size(); ++i) {
    hits[i] += other.hits[i];
    totals[i] += other.totals[i];
  }
}

namespace {

struct ContainmentState {
  ContainmentCounts counts;
  std::string scratch;
};

}  // namespace

ContainmentCounts containment_counts(DocumentSource& corpus, const std::set<std::string>& words,
                                     const CountOptions& options) {
  check_options(options);
  if (words.empty()) throw Error(ErrorCode::kInvalidArgument, "containment: empty word set");
  StringMap<bool> lookup;
  for (const auto& w : words) lookup.emplace(w, true);
  const std::size_t n_years = options.years.size();

  auto states = run_sharded<ContainmentState>(
      corpus, ShardOptions{options.workers, options.batch_size},
      [&] {
        return ContainmentState{
            ContainmentCounts{options.years, std::vector<std::uint64_t>(n_years, 0),
                              std::vector<std::uint64_t>(n_years, 0)},
            {}};
      },
      [&](ContainmentState& s, const Document& doc) {
        auto yi = find_year(options.years, doc.year);
        if (!yi) {
          if (options.strict) throw_out_of_range(doc);
          return;
        }
        ++s.counts.totals[*yi];
        bool hit = false;
        for_each_token(doc.text, s.scratch, [&](std::string_view token) {
          if (!hit && lookup.find(token) != lookup.end()) hit = true;
        });
        if (hit) ++s.counts.hits[*yi];
      });
  for (std::size_t i = 1; i < states.size(); ++i) states[0].counts.merge(states[i].counts);
  return std::move(states[0].counts);
}

ContainmentCounts containment_counts(std::span<const Document> corpus,
                                     const std::set<std::string>& words,
                                     const CountOptions& options) {
  SpanSource source(corpus);
  return containment_counts(source, words, options);
}

// ---------------------------------------------------------------------------

std::optional<double> min_candidate_frequency(std::string_view text,
                                              const StringMap<double>& candidates) {
  std::optional<double> best;
  std::string scratch;
  for_each_token(text, scratch, [&](std::string_view token) {
    auto it = candidates.find(token);
    if (it != candidates.end() && (!best || it->second < *best)) best = it->second;
  });
  return best;
}

MinFrequencyProfile::MinFrequencyProfile(std::vector<int> years)
    : years_(std::move(years)), minima_(years_.size()), totals_(years_.size(), 0) {}

std::optional<std::size_t> MinFrequencyProfile::year_index(int year) const {
  return find_year(years_, year);
}

void MinFrequencyProfile::add(int year, std::optional<double> min_frequency) {
  auto yi = find_year(years_, year);
  if (!yi) throw Error(ErrorCode::kYearOutOfRange, "profile: year " + std::to_string(year));
  ++totals_[*yi];
  if (min_frequency) minima_[*yi].push_back(*min_frequency);
  sorted_ = false;
}

void MinFrequencyProfile::merge(const MinFrequencyProfile& other) {
  if (years_ != other.years_) throw Error(ErrorCode::kShapeMismatch, "profile: years differ");
  for (std::size_t i = 0; i < years_.size(); ++i) {
    minima_[i].insert(minima_[i].end(), other.minima_[i].begin(), other.minima_[i].end());
    totals_[i] += other.totals_[i];
  }
  sorted_ = false;
}

void MinFrequencyProfile::finalize() {
  for (auto& v : minima_) std::sort(v.begin(), v.end());
  sorted_ = true;
}

std::uint64_t MinFrequencyProfile::count_below(int year, double threshold) const {
  if (!sorted_) throw Error(ErrorCode::kInvalidArgument, "profile queried before finalize()");
  auto yi = find_year(years_, year);
  if (!yi) throw Error(ErrorCode::kMissingYear, "profile: no year " + std::to_string(year));
  const auto& v = minima_[*yi];
  return static_cast<std::uint64_t>(std::lower_bound(v.begin(), v.end(), threshold) - v.begin());
}

std::uint64_t MinFrequencyProfile::total(int year) const {
  auto yi = find_year(years_, year);
  if (!yi) throw Error(ErrorCode::kMissingYear, "profile: no year " + std::to_string(year));
  return totals_[*yi];
}

ContainmentCounts MinFrequencyProfile::containment_below(double threshold) const {
  ContainmentCounts out{years_, std::vector<std::uint64_t>(years_.size(), 0), totals_};
  for (std::size_t i = 0; i < years_.size(); ++i) out.hits[i] = count_below(years_[i], threshold);
  return out;
}

namespace {

struct ProfileState {
  MinFrequencyProfile profile;
  std::string scratch;
};

}  // namespace

MinFrequencyProfile min_marker_frequency_profile(DocumentSource& corpus,
                                                 const std::map<std::string, double>& candidates,
                                                 const CountOptions& options) {
  check_options(options);
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "profile: no candidates");
  StringMap<double> lookup;
  for (const auto& [w, p] : candidates) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "profile: frequency of '" + w + "' not in (0,1]");
    }
    lookup.emplace(w, p);
  }
  auto states = run_sharded<ProfileState>(
      corpus, ShardOptions{options.workers, options.batch_size},
      [&] { return ProfileState{MinFrequencyProfile(options.years), {}}; },
      [&](ProfileState& s, const Document& doc) {
        if (!find_year(options.years, doc.year)) {
          if (options.strict) throw_out_of_range(doc);
          return;
        }
        std::optional<double> best;
        for_each_token(doc.text, s.scratch, [&](std::string_view token) {
          auto it = lookup.find(token);
          if (it != lookup.end() && (!best || it->second < *best)) best = it->second;
        });
        s.profile.add(doc.year, best);
      });
  for (std::size_t i = 1; i < states.size(); ++i) states[0].profile.merge(states[i].profile);
  states[0].profile.finalize();
  return std::move(states[0].profile);
}

MinFrequencyProfile min_marker_frequency_profile(std::span<const Document> corpus,
                                                 const std::map<std::string, double>& candidates,
                                                 const CountOptions& options) {
  SpanSource source(corpus);
  return min_marker_frequency_profile(source, candidates, options);
}

}  // namespace exvocab
