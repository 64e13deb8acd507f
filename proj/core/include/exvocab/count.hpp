#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "exvocab/ingest.hpp"
#include "exvocab/matrix.hpp"
#include "exvocab/vocabulary.hpp"

namespace exvocab {

struct CountOptions {
  std::vector<int> years;   // matrix columns; strictly increasing
  bool strict = true;       // out-of-range year: throw (strict) or tally (lenient)
  unsigned workers = 1;
  std::size_t batch_size = 4096;
};

struct CountTally {
  std::uint64_t documents = 0;
  std::uint64_t out_of_range = 0;
};

// Single-threaded accumulator behind count_occurrences; one per shard.
class OccurrenceCounter {
 public:
  OccurrenceCounter(const Vocabulary& vocab, std::vector<int> years, bool strict);

  void add(const Document& doc);
  const OccurrenceMatrix& matrix() const { return matrix_; }
  OccurrenceMatrix take() { return std::move(matrix_); }
  const CountTally& tally() const { return tally_; }

 private:
  const Vocabulary* vocab_;
  OccurrenceMatrix matrix_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t serial_ = 0;
  bool strict_;
  CountTally tally_;
  std::string scratch_;
};

OccurrenceMatrix count_occurrences(DocumentSource& corpus, const Vocabulary& vocab,
                                   const CountOptions& options, CountTally* tally = nullptr);
OccurrenceMatrix count_occurrences(std::span<const Document> corpus, const Vocabulary& vocab,
                                   const CountOptions& options, CountTally* tally = nullptr);

// Per-year number of documents containing at least one word of a set. This
// is a union and cannot be recovered from per-word counts.
struct ContainmentCounts {
  std::vector<int> years;
  std::vector<std::uint64_t> hits;
  std::vector<std::uint64_t> totals;

  std::optional<std::size_t> year_index(int year) const;
  void merge(const ContainmentCounts& other);
  friend bool operator==(const ContainmentCounts&, const ContainmentCounts&) = default;
};

ContainmentCounts containment_counts(DocumentSource& corpus, const std::set<std::string>& words,
                                     const CountOptions& options);
ContainmentCounts containment_counts(std::span<const Document> corpus,
                                     const std::set<std::string>& words,
                                     const CountOptions& options);

// For one document: the smallest frequency among the candidate words it
// contains, or nullopt if it contains none. A document belongs to the
// containment set of {w : p_w < T} exactly when this minimum is < T.
std::optional<double> min_candidate_frequency(std::string_view text,
                                              const StringMap<double>& candidates);

// Per-year sorted multiset of per-document minimum candidate frequencies.
// One corpus pass yields containment counts for every threshold.
class MinFrequencyProfile {
 public:
  MinFrequencyProfile() = default;
  explicit MinFrequencyProfile(std::vector<int> years);

  void add(int year, std::optional<double> min_frequency);  // before finalize()
  void merge(const MinFrequencyProfile& other);
  void finalize();  // sorts; required before queries

  const std::vector<int>& years() const { return years_; }
  std::optional<std::size_t> year_index(int year) const;
  // Documents of `year` whose minimum candidate frequency is < threshold.
  std::uint64_t count_below(int year, double threshold) const;
  std::uint64_t total(int year) const;
  ContainmentCounts containment_below(double threshold) const;

 private:
  std::vector<int> years_;
  std::vector<std::vector<double>> minima_;
  std::vector<std::uint64_t> totals_;
  bool sorted_ = false;
};

MinFrequencyProfile min_marker_frequency_profile(DocumentSource& corpus,
                                                 const std::map<std::string, double>& candidates,
                                                 const CountOptions& options);
MinFrequencyProfile min_marker_frequency_profile(std::span<const Document> corpus,
                                                 const std::map<std::string, double>& candidates,
                                                 const CountOptions& options);

}  // namespace exvocab
